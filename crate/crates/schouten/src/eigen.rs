//! Generalized symmetric eigenvalues lambda(g^{-1} T) for SPD g.
//!
//! The input tensor is first normalized by its sup norm (the amplified
//! tensors downstream carry factors like N^2 e^{2Nv}, and cone membership is
//! scale-invariant, so this costs nothing), then whitened with the Cholesky
//! factor of g, and finally diagonalized by cyclic Jacobi rotations.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

const MAX_SWEEPS: usize = 50;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigList(Vec<f64>);

impl EigList {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    /// Elementwise rescaling, preserving the sort for c > 0.
    pub fn scaled(&self, c: f64) -> EigList {
        debug_assert!(c > 0.0);
        EigList(self.0.iter().map(|v| c * v).collect())
    }
}

/// Eigenvalues of g^{-1} T, i.e. of L^{-1} T L^{-T} with g = L L^T.
pub fn generalized_eigs(t: &Mat, gval: &Mat) -> Result<EigList> {
    let n = t.len();
    let l = linalg::cholesky(gval).ok_or(Error::EigenNotSpd)?;

    let scale = linalg::sup_norm(t);
    if scale == 0.0 {
        return Ok(EigList(vec![0.0; n]));
    }
    if !scale.is_finite() {
        return Err(Error::OverflowGuard(
            "tensor contains non-finite entries".into(),
        ));
    }
    let t_hat = linalg::scale(t, 1.0 / scale);

    // whiten: m = L^{-1} t_hat L^{-T}
    let mut cols: Mat = vec![vec![0.0; n]; n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| t_hat[i][j]).collect();
        let y = linalg::solve_lower(&l, &col);
        for i in 0..n {
            cols[i][j] = y[i];
        }
    }
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        let row: Vec<f64> = cols[i].clone();
        let y = linalg::solve_lower(&l, &row);
        m[i] = y;
    }
    // symmetrize the whitened matrix before rotating
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }

    let mut eigs = jacobi(&mut m)?;
    for v in eigs.iter_mut() {
        *v *= scale;
    }
    eigs.sort_by(f64::total_cmp);
    Ok(EigList(eigs))
}

/// Eigenvalues of a plain symmetric matrix (g = identity).
pub fn sym_eigs(t: &Mat) -> Result<EigList> {
    generalized_eigs(t, &linalg::identity(t.len()))
}

fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i][j] * a[i][j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm drops below
/// `OFF_DIAGONAL_TOL` times the (rotation-invariant) Frobenius norm of the
/// input. Convergence failure is an error, never silently truncated.
fn jacobi(a: &mut Mat) -> Result<Vec<f64>> {
    let n = a.len();
    if n == 1 {
        return Ok(vec![a[0][0]]);
    }
    let fro = linalg::frobenius(a);
    if fro == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = OFF_DIAGONAL_TOL * fro;

    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(a) < target {
            return Ok((0..n).map(|i| a[i][i]).collect());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                // stable rotation angle
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let off = off_diagonal_norm(a);
    if off < target {
        return Ok((0..n).map(|i| a[i][i]).collect());
    }
    Err(Error::JacobiNonConvergence {
        sweeps: MAX_SWEEPS,
        off,
    })
}
