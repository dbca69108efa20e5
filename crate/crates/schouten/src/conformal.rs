//! Conformal transformation laws for the modified Schouten tensor family,
//! and an independent direct-recomputation oracle.
//!
//! Two computation paths exist on purpose. The closed-form laws here rewrite
//! the tensor of g_u = e^{2u} g in terms of background quantities; the oracle
//! instead builds the metric e^{2u} g componentwise and reruns the whole
//! curvature stack on it. Their agreement is the crate's main correctness
//! instrument.

use crate::chart::{MetricField, MetricJets, ScalarField};
use crate::curvature::{self, CovariantJet};
use crate::eigen::{self, EigList};
use crate::error::{Error, Result};
use crate::linalg::Mat;

/// The two derived constants of the tau-family, defined for tau != 1:
/// rho = (n-2)/(tau-1) and gamma = (tau-2)(n-2)/(2(tau-1)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalConstants {
    pub tau: f64,
    pub rho: f64,
    pub gamma: f64,
}

impl ConformalConstants {
    pub fn new(tau: f64, n: usize) -> Result<Self> {
        if tau == 1.0 {
            return Err(Error::TauIsOne);
        }
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        let nf = n as f64;
        Ok(ConformalConstants {
            tau,
            rho: (nf - 2.0) / (tau - 1.0),
            gamma: (tau - 2.0) * (nf - 2.0) / (2.0 * (tau - 1.0)),
        })
    }
}

/// Tensor of g_u = e^{2u} g in the tau-family, expressed in the background
/// frame:
///
/// A^tau(g_u) = A^tau(g) + (tau-1)/(n-2) (lap u) g - hess u
///              + (tau-2)/2 |grad u|^2 g + du (x) du
///
/// Eigenvalues relative to g_u differ from eigenvalues relative to g by the
/// factor e^{-2u}; see [`eigs_vs_conformal`].
pub fn transform_modified_schouten(
    a_tau_g: &Mat,
    u: &CovariantJet,
    gval: &Mat,
    tau: f64,
) -> Result<Mat> {
    let n = gval.len();
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let nf = n as f64;
    let c_lap = (tau - 1.0) / (nf - 2.0) * u.laplacian;
    let c_grad = 0.5 * (tau - 2.0) * u.grad_norm_sq;
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a_tau_g[i][j] + (c_lap + c_grad) * gval[i][j] - u.hess[i][j]
                + u.grad[i] * u.grad[j];
        }
    }
    Ok(out)
}

/// Schouten tensor of g_u in the background frame:
/// A(g_u) = A(g) - hess u - 1/2 |grad u|^2 g + du (x) du.
pub fn transform_schouten(a_g: &Mat, u: &CovariantJet, gval: &Mat) -> Result<Mat> {
    let n = gval.len();
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let c_grad = -0.5 * u.grad_norm_sq;
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] =
                a_g[i][j] - u.hess[i][j] + c_grad * gval[i][j] + u.grad[i] * u.grad[j];
        }
    }
    Ok(out)
}

/// The rescaled transformation operator
///
/// `V[u]` = (lap u) g - rho hess u + gamma |grad u|^2 g + rho du (x) du + A,
///
/// which with A = rho A^tau(g) satisfies `V[u]` = rho A^tau(g_u). Undefined at
/// tau = 1 (use [`transform_schouten`] there).
pub fn v_operator(u: &CovariantJet, a: &Mat, gval: &Mat, tau: f64) -> Result<Mat> {
    let n = gval.len();
    let constants = ConformalConstants::new(tau, n)?;
    let c_g = u.laplacian + constants.gamma * u.grad_norm_sq;
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = c_g * gval[i][j] - constants.rho * u.hess[i][j]
                + constants.rho * u.grad[i] * u.grad[j]
                + a[i][j];
        }
    }
    Ok(out)
}

/// Jets of the conformally scaled metric h = e^{2u} g, assembled from the
/// jets of u and of every metric component via product and chain rules.
pub fn conformal_metric_jets(g: &MetricField, u: &ScalarField, x: &[f64]) -> Result<MetricJets> {
    let n = g.dim();
    let u_jet = u.jet(x)?;
    let w = u_jet.scale(2.0).exp(); // e^{2u}
    let mut out = MetricJets {
        n,
        g: vec![vec![0.0; n]; n],
        dg: vec![vec![vec![0.0; n]; n]; n],
        ddg: vec![vec![vec![vec![0.0; n]; n]; n]; n],
    };
    for i in 0..n {
        for j in 0..=i {
            let entry = g.entry(i, j).jet(x)?;
            let scaled = w.mul(&entry);
            out.set_entry(i, j, &scaled);
        }
    }
    Ok(out)
}

/// Direct-recomputation oracle: the tau-family tensor of e^{2u} g at `x`,
/// obtained by running the curvature stack on the scaled metric. Makes no
/// use of the closed-form transformation laws.
pub fn direct_modified_schouten(
    g: &MetricField,
    u: &ScalarField,
    tau: f64,
    x: &[f64],
) -> Result<Mat> {
    let jets = conformal_metric_jets(g, u, x)?;
    let curv = curvature::riemann(&jets)?;
    curvature::modified_schouten(&curv.ric, curv.scal, &jets.g, tau, 1.0)
}

/// Eigenvalues of the tensor relative to the background metric g.
pub fn eigs_vs_background(a: &Mat, gval: &Mat) -> Result<EigList> {
    eigen::generalized_eigs(a, gval)
}

/// Eigenvalues of the tensor relative to g_u = e^{2u} g; these are the
/// background eigenvalues scaled by e^{-2u}, so cone membership is shared.
pub fn eigs_vs_conformal(a: &Mat, gval: &Mat, u_val: f64) -> Result<EigList> {
    Ok(eigen::generalized_eigs(a, gval)?.scaled((-2.0 * u_val).exp()))
}

/// Convenience: covariant second-order data of a scalar field on a metric at
/// a point (jets, Christoffels, covariant Hessian in one call).
pub fn covariant_data(g: &MetricField, u: &ScalarField, x: &[f64]) -> Result<CovariantJet> {
    let jets = g.jets(x)?;
    let gamma = curvature::christoffel(&jets.g, &jets.dg)?;
    let u_jet = u.jet(x)?;
    curvature::covariant_hessian(&u_jet, &gamma, &jets.g)
}
