//! Chart-based Riemannian curvature engine and verifier.
//!
//! Given a metric on a closed box chart and a potential v without critical
//! points, this crate builds the conformal metrics g_u = e^{2u} g with
//! u = e^{Nv}, computes the tau-family of modified Schouten tensors, and
//! certifies on sample grids that the eigenvalue vector relative to the
//! background metric lies in a prescribed Garding cone Gamma_k — including
//! the dimension-3 negative-sectional-curvature consequence through the
//! Einstein tensor.
//!
//! The library surface is organized the way the computation flows:
//!
//! - [`expr`] / [`jet`]: closed-form scalar expressions evaluated to second
//!   order by forward-mode dual arithmetic;
//! - [`chart`]: box domains, boundary-inclusive sample grids, metric and
//!   potential fields;
//! - [`curvature`]: Christoffel symbols, Riemann/Ricci/scalar and sectional
//!   curvature, Schouten and Einstein tensors, covariant Hessians;
//! - [`eigen`]: generalized symmetric eigenvalues via Cholesky whitening and
//!   cyclic Jacobi;
//! - [`cones`]: Gamma_k membership with scale-invariant margins;
//! - [`conformal`]: the conformal transformation laws plus an independent
//!   direct-recomputation oracle;
//! - [`construct`]: the e^{Nv} potential, margin verification over grids,
//!   the minimal-N search, and the dimension-3 sectional verifier;
//! - [`manifest`]: JSON manifests and reports for batch runs.
//!
//! The `examples/` directory exercises each capability end to end; the
//! `schouten` binary drives manifests from the command line.

// explicit index loops mirror the tensor formulas; negated comparisons are
// NaN-rejecting guards
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chart;
pub mod cones;
pub mod conformal;
pub mod construct;
pub mod curvature;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod manifest;
pub mod sampling;

pub use error::{Error, Result};
