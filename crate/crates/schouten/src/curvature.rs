//! Pointwise curvature of a metric from its second-order jets: Christoffel
//! symbols, the lowered Riemann tensor, Ricci and scalar curvature, sectional
//! curvature, covariant Hessians, and the Schouten / Einstein tensor family.
//!
//! Index conventions, fixed once and pinned by the round-sphere test:
//!
//! ```text
//! Gamma^k_ij   = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
//! R^r_smn      = d_m Gamma^r_ns - d_n Gamma^r_ms
//!                + Gamma^r_ml Gamma^l_ns - Gamma^r_nl Gamma^l_ms
//! R_rsmn       = g_rl R^l_smn
//! Ric_sn       = g^{rm} R_rsmn          (unit sphere: Ric = (n-1) g)
//! R            = g^{sn} Ric_sn          (unit sphere: R = n(n-1) > 0)
//! K(v1, v2)    = R_rsmn v1^r v2^s v1^m v2^n / (|v1|^2 |v2|^2 - <v1,v2>^2)
//! ```

use crate::chart::MetricJets;
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::linalg::{self, Mat};

/// Christoffel symbols, lowered Riemann tensor, Ricci tensor and scalar
/// curvature at one point.
#[derive(Debug, Clone)]
pub struct CurvaturePoint {
    /// `gamma[k][i][j]` = Gamma^k_ij, symmetric in (i, j).
    pub gamma: Vec<Mat>,
    /// `riem[i][j][k][l]` = R_ijkl, all four-index symmetries.
    pub riem: Vec<Vec<Mat>>,
    pub ric: Mat,
    pub scal: f64,
}

/// Two linearly independent tangent vectors spanning a 2-plane.
#[derive(Debug, Clone)]
pub struct TangentPlane {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
}

const GRAM_TOL: f64 = 1e-12;

/// Gamma^k_ij from the metric value and its first derivatives.
pub fn christoffel(gval: &Mat, dg: &[Mat]) -> Result<Vec<Mat>> {
    let n = gval.len();
    let ginv = linalg::spd_inverse(gval)?;
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                let v = 0.5 * s;
                gamma[k][i][j] = v;
                gamma[k][j][i] = v;
            }
        }
    }
    Ok(gamma)
}

/// Lowered Riemann tensor, Ricci, and scalar curvature from metric jets.
pub fn riemann(jets: &MetricJets) -> Result<CurvaturePoint> {
    let n = jets.n;
    let g = &jets.g;
    let ginv = linalg::spd_inverse(g)?;
    let gamma = christoffel(g, &jets.dg)?;

    // d_m g^{kl} = -g^{ka} (d_m g_ab) g^{bl}
    let mut dginv = vec![vec![vec![0.0; n]; n]; n];
    for m in 0..n {
        for k in 0..n {
            for l in 0..n {
                let mut s = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        s -= ginv[k][a] * jets.dg[m][a][b] * ginv[b][l];
                    }
                }
                dginv[m][k][l] = s;
            }
        }
    }

    // d_m Gamma^k_ij
    let mut dgamma = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for m in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..=i {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += dginv[m][k][l]
                            * (jets.dg[i][j][l] + jets.dg[j][i][l] - jets.dg[l][i][j]);
                        s += ginv[k][l]
                            * (jets.ddg[m][i][j][l] + jets.ddg[m][j][i][l]
                                - jets.ddg[m][l][i][j]);
                    }
                    let v = 0.5 * s;
                    dgamma[m][k][i][j] = v;
                    dgamma[m][k][j][i] = v;
                }
            }
        }
    }

    // R^r_smn, then lower the first index
    let mut riem = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for r in 0..n {
        for s in 0..n {
            for m in 0..n {
                for nu in 0..n {
                    let mut up = dgamma[m][r][nu][s] - dgamma[nu][r][m][s];
                    for l in 0..n {
                        up += gamma[r][m][l] * gamma[l][nu][s]
                            - gamma[r][nu][l] * gamma[l][m][s];
                    }
                    riem[r][s][m][nu] = up;
                }
            }
        }
    }
    let mut lowered = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for r in 0..n {
        for s in 0..n {
            for m in 0..n {
                for nu in 0..n {
                    let mut v = 0.0;
                    for l in 0..n {
                        v += g[r][l] * riem[l][s][m][nu];
                    }
                    lowered[r][s][m][nu] = v;
                }
            }
        }
    }

    let mut ric = vec![vec![0.0; n]; n];
    for s in 0..n {
        for nu in 0..n {
            let mut v = 0.0;
            for r in 0..n {
                for m in 0..n {
                    v += ginv[r][m] * lowered[r][s][m][nu];
                }
            }
            ric[s][nu] = v;
        }
    }
    // exact symmetry for downstream eigensolves
    for s in 0..n {
        for nu in 0..s {
            let v = 0.5 * (ric[s][nu] + ric[nu][s]);
            ric[s][nu] = v;
            ric[nu][s] = v;
        }
    }

    let mut scal = 0.0;
    for s in 0..n {
        for nu in 0..n {
            scal += ginv[s][nu] * ric[s][nu];
        }
    }

    Ok(CurvaturePoint {
        gamma,
        riem: lowered,
        ric,
        scal,
    })
}

/// Sectional curvature of the plane spanned by (v1, v2); independent of the
/// chosen basis of the plane.
pub fn sectional(curv: &CurvaturePoint, gval: &Mat, plane: &TangentPlane) -> Result<f64> {
    let n = gval.len();
    let v1 = &plane.v1;
    let v2 = &plane.v2;
    let g11 = linalg::quadratic_form(gval, v1, v1);
    let g22 = linalg::quadratic_form(gval, v2, v2);
    let g12 = linalg::quadratic_form(gval, v1, v2);
    let gram = g11 * g22 - g12 * g12;
    if !(gram > GRAM_TOL) {
        return Err(Error::DegeneratePlane(gram));
    }
    let mut num = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    num += curv.riem[i][j][k][l] * v1[i] * v2[j] * v1[k] * v2[l];
                }
            }
        }
    }
    Ok(num / gram)
}

/// alpha/(n-2) * (Ric - tau/(2(n-1)) R g).
///
/// tau = 1 recovers the Schouten tensor; tau = n-1 gives the Einstein tensor
/// divided by n-2.
pub fn modified_schouten(ric: &Mat, scal: f64, gval: &Mat, tau: f64, alpha: f64) -> Result<Mat> {
    let n = gval.len();
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let nf = n as f64;
    let coeff = tau / (2.0 * (nf - 1.0)) * scal;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = alpha / (nf - 2.0) * (ric[i][j] - coeff * gval[i][j]);
        }
    }
    Ok(a)
}

/// Einstein tensor Ric - (R/2) g.
pub fn einstein(ric: &Mat, scal: f64, gval: &Mat) -> Mat {
    let n = gval.len();
    let mut g_out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            g_out[i][j] = ric[i][j] - 0.5 * scal * gval[i][j];
        }
    }
    g_out
}

/// Covariant second-order data of a scalar: coordinate gradient, covariant
/// Hessian, Laplacian, and the squared gradient norm, all with respect to g.
#[derive(Debug, Clone)]
pub struct CovariantJet {
    pub grad: Vec<f64>,
    /// (hess)_ij = d_i d_j u - Gamma^k_ij d_k u
    pub hess: Mat,
    pub laplacian: f64,
    pub grad_norm_sq: f64,
}

impl CovariantJet {
    /// du (x) du as a matrix.
    pub fn grad_outer(&self) -> Mat {
        linalg::outer(&self.grad, &self.grad)
    }
}

pub fn covariant_hessian(u: &Jet2, gamma: &[Mat], gval: &Mat) -> Result<CovariantJet> {
    let n = gval.len();
    let ginv = linalg::spd_inverse(gval)?;
    let grad = u.grad().to_vec();
    let mut hess = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut v = u.hess_entry(i, j);
            for k in 0..n {
                v -= gamma[k][i][j] * grad[k];
            }
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    let mut laplacian = 0.0;
    let mut grad_norm_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            laplacian += ginv[i][j] * hess[i][j];
            grad_norm_sq += ginv[i][j] * grad[i] * grad[j];
        }
    }
    Ok(CovariantJet {
        grad,
        hess,
        laplacian,
        grad_norm_sq,
    })
}

/// g-unit normal to the plane (v1, v2) in dimension three, by completing the
/// pair to a g-orthonormal triple.
pub fn unit_normal(gval: &Mat, plane: &TangentPlane) -> Result<Vec<f64>> {
    let n = gval.len();
    if n != 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let gdot = |a: &[f64], b: &[f64]| linalg::quadratic_form(gval, a, b);

    let norm1 = gdot(&plane.v1, &plane.v1).sqrt();
    let e1: Vec<f64> = plane.v1.iter().map(|v| v / norm1).collect();
    let mut w2: Vec<f64> = plane.v2.clone();
    let p = gdot(&w2, &e1);
    for i in 0..n {
        w2[i] -= p * e1[i];
    }
    let norm2 = gdot(&w2, &w2).sqrt();
    if !(norm2 * norm1 > 0.0) || norm2 / norm1 < 1e-9 {
        return Err(Error::DegeneratePlane(norm2));
    }
    let e2: Vec<f64> = w2.iter().map(|v| v / norm2).collect();

    // seed the third direction with the coordinate axis least captured by
    // the plane, then orthogonalize
    let mut best: Option<(f64, Vec<f64>)> = None;
    for axis in 0..n {
        let mut w = vec![0.0; n];
        w[axis] = 1.0;
        let p1 = gdot(&w, &e1);
        let p2 = gdot(&w, &e2);
        for i in 0..n {
            w[i] -= p1 * e1[i] + p2 * e2[i];
        }
        let r = gdot(&w, &w);
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, w));
        }
    }
    let (r, w) = best.unwrap();
    if !(r > 0.0) {
        return Err(Error::DegeneratePlane(r));
    }
    let norm = r.sqrt();
    Ok(w.iter().map(|v| v / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{self, MetricField, ScalarField};
    use crate::expr;
    use crate::sampling;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn euclidean_is_flat() {
        let m = MetricField::identity(3);
        let jets = m.jets(&[0.2, 0.5, 0.7]).unwrap();
        let curv = riemann(&jets).unwrap();
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(curv.gamma[k][i][j], 0.0);
                    for l in 0..3 {
                        assert_eq!(curv.riem[k][i][j][l], 0.0);
                    }
                }
            }
        }
        assert_eq!(curv.scal, 0.0);
    }

    #[test]
    fn polar_type_christoffels() {
        // g = diag(1, x1^2): Gamma^1_22 = -x1, Gamma^2_12 = 1/x1
        let g11 = ScalarField::Constant(1.0);
        let g22 = ScalarField::Expression(expr::parse("x1^2", 2).unwrap());
        let m = MetricField::diagonal(vec![g11, g22]);
        let x = [1.5, 0.3];
        let jets = m.jets(&x).unwrap();
        let gamma = christoffel(&jets.g, &jets.dg).unwrap();
        assert!(close(gamma[0][1][1], -1.5, 1e-12));
        assert!(close(gamma[1][0][1], 1.0 / 1.5, 1e-12));
        assert!(close(gamma[1][1][0], 1.0 / 1.5, 1e-12));
        assert!(gamma[0][0][0].abs() < 1e-12);
    }

    #[test]
    fn conformal_flat_christoffels() {
        // g = e^{2 x1} delta, n = 3
        let phi = expr::parse("x1", 3).unwrap();
        let (_, m) = chart::conformal_flat(3, phi).unwrap();
        let jets = m.jets(&[0.3, 0.1, 0.8]).unwrap();
        let gamma = christoffel(&jets.g, &jets.dg).unwrap();
        assert!(close(gamma[0][0][0], 1.0, 1e-11));
        assert!(close(gamma[0][1][1], -1.0, 1e-11));
        assert!(close(gamma[0][2][2], -1.0, 1e-11));
        assert!(close(gamma[1][0][1], 1.0, 1e-11));
        assert!(close(gamma[2][0][2], 1.0, 1e-11));
        assert!(gamma[1][1][1].abs() < 1e-11);
    }

    #[test]
    fn unit_sphere_constant_curvature() {
        let (domain, m) = chart::round_sphere_chart(1.0).unwrap();
        let grid = chart::make_grid(&domain, 3).unwrap();
        for p in grid.points() {
            let jets = m.jets(p).unwrap();
            let curv = riemann(&jets).unwrap();
            // Ric = 2 g, R = 6
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        close(curv.ric[i][j], 2.0 * jets.g[i][j], 1e-8),
                        "ric[{i}][{j}] = {} vs {}",
                        curv.ric[i][j],
                        2.0 * jets.g[i][j]
                    );
                }
            }
            assert!(close(curv.scal, 6.0, 1e-8));
        }
    }

    #[test]
    fn hyperbolic_constant_curvature() {
        let (domain, m) = chart::hyperbolic_ball(3).unwrap();
        let grid = chart::make_grid(&domain, 3).unwrap();
        for p in grid.points() {
            let jets = m.jets(p).unwrap();
            let curv = riemann(&jets).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!(close(curv.ric[i][j], -2.0 * jets.g[i][j], 1e-8));
                }
            }
            assert!(close(curv.scal, -6.0, 1e-8));
        }
    }

    #[test]
    fn sphere_sectional_is_inverse_radius_squared() {
        for radius in [1.0, 2.0] {
            let (_, m) = chart::round_sphere_chart(radius).unwrap();
            let x = [0.9, 0.8, 0.4];
            let jets = m.jets(&x).unwrap();
            let curv = riemann(&jets).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..10 {
                let plane = TangentPlane {
                    v1: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                    v2: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                };
                if let Ok(k) = sectional(&curv, &jets.g, &plane) {
                    assert!(
                        close(k, 1.0 / (radius * radius), 1e-8),
                        "K = {k}, radius {radius}"
                    );
                }
            }
        }
    }

    #[test]
    fn sectional_invariant_under_basis_change() {
        let (_, m) = chart::flat_perturbed(3, 0.1, None).unwrap();
        let x = [0.25, 0.75, 0.5];
        let jets = m.jets(&x).unwrap();
        let curv = riemann(&jets).unwrap();
        let v1 = vec![1.0, 0.3, -0.2];
        let v2 = vec![0.1, -1.0, 0.7];
        let k1 = sectional(
            &curv,
            &jets.g,
            &TangentPlane {
                v1: v1.clone(),
                v2: v2.clone(),
            },
        )
        .unwrap();
        // replace (v1, v2) by (v1 + v2, 2 v2)
        let w1: Vec<f64> = v1.iter().zip(&v2).map(|(a, b)| a + b).collect();
        let w2: Vec<f64> = v2.iter().map(|b| 2.0 * b).collect();
        let k2 = sectional(&curv, &jets.g, &TangentPlane { v1: w1, v2: w2 }).unwrap();
        assert!((k1 - k2).abs() < 1e-10 * (1.0 + k1.abs()));
    }

    #[test]
    fn degenerate_plane_rejected() {
        let m = MetricField::identity(3);
        let jets = m.jets(&[0.0, 0.0, 0.0]).unwrap();
        let curv = riemann(&jets).unwrap();
        let good = TangentPlane {
            v1: vec![1.0, 0.4, -0.3],
            v2: vec![0.2, -1.0, 0.6],
        };
        assert_eq!(sectional(&curv, &jets.g, &good).unwrap(), 0.0);
        let bad = TangentPlane {
            v1: vec![1.0, 0.0, 0.0],
            v2: vec![2.0, 0.0, 0.0],
        };
        assert!(matches!(
            sectional(&curv, &jets.g, &bad),
            Err(Error::DegeneratePlane(_))
        ));
    }

    #[test]
    fn schouten_special_cases() {
        // unit sphere, n = 3, tau = 1: A = g/2
        let (_, m) = chart::round_sphere_chart(1.0).unwrap();
        let x = [0.7, 1.0, 0.2];
        let jets = m.jets(&x).unwrap();
        let curv = riemann(&jets).unwrap();
        let a = modified_schouten(&curv.ric, curv.scal, &jets.g, 1.0, 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(close(a[i][j], 0.5 * jets.g[i][j], 1e-8));
            }
        }
        // flat metric: A vanishes for every tau
        let flat = MetricField::identity(3);
        let fj = flat.jets(&x).unwrap();
        let fc = riemann(&fj).unwrap();
        for tau in [0.0, 1.0, 2.0, 5.0] {
            let a = modified_schouten(&fc.ric, fc.scal, &fj.g, tau, 1.0).unwrap();
            assert!(linalg::sup_norm(&a) < 1e-13);
        }
    }

    #[test]
    fn tau_two_matches_einstein_at_n3() {
        let (_, m) = chart::flat_perturbed(3, 0.12, None).unwrap();
        let x = [0.3, 0.9, 0.6];
        let jets = m.jets(&x).unwrap();
        let curv = riemann(&jets).unwrap();
        let a = modified_schouten(&curv.ric, curv.scal, &jets.g, 2.0, 1.0).unwrap();
        let g_tensor = einstein(&curv.ric, curv.scal, &jets.g);
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i][j] - g_tensor[i][j]).abs() < 1e-12 * (1.0 + g_tensor[i][j].abs()));
            }
        }
    }

    #[test]
    fn modified_schouten_odd_in_alpha() {
        let (_, m) = chart::flat_perturbed(4, 0.1, None).unwrap();
        let x = [0.3, 0.9, 0.6, 0.2];
        let jets = m.jets(&x).unwrap();
        let curv = riemann(&jets).unwrap();
        let plus = modified_schouten(&curv.ric, curv.scal, &jets.g, 1.7, 1.0).unwrap();
        let minus = modified_schouten(&curv.ric, curv.scal, &jets.g, 1.7, -1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(plus[i][j], -minus[i][j]);
            }
        }
    }

    #[test]
    fn modified_schouten_requires_n3() {
        let g = linalg::identity(2);
        let ric = linalg::zeros(2);
        assert!(matches!(
            modified_schouten(&ric, 0.0, &g, 1.0, 1.0),
            Err(Error::DimensionTooSmall(2))
        ));
    }

    #[test]
    fn flat_covariant_hessian_is_coordinate_hessian() {
        // u = |x|^2 / 2 on flat space: hess = identity, laplacian = n
        let m = MetricField::identity(3);
        let x = [0.4, -0.3, 0.9];
        let jets = m.jets(&x).unwrap();
        let gamma = christoffel(&jets.g, &jets.dg).unwrap();
        let u = expr::parse("(x1^2 + x2^2 + x3^2) / 2", 3).unwrap();
        let uj = expr::eval_jet2(&u, &x).unwrap();
        let cov = covariant_hessian(&uj, &gamma, &jets.g).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(close(cov.hess[i][j], want, 1e-12));
            }
        }
        assert!(close(cov.laplacian, 3.0, 1e-12));
        assert!(close(cov.grad_norm_sq, linalg::dot(&x, &x), 1e-12));
    }

    #[test]
    fn constant_scalar_has_zero_covariant_data() {
        let (_, m) = chart::flat_perturbed(3, 0.1, None).unwrap();
        let x = [0.2, 0.6, 0.4];
        let jets = m.jets(&x).unwrap();
        let gamma = christoffel(&jets.g, &jets.dg).unwrap();
        let u = Jet2::constant(3, 7.5);
        let cov = covariant_hessian(&u, &gamma, &jets.g).unwrap();
        assert_eq!(cov.laplacian, 0.0);
        assert_eq!(cov.grad_norm_sq, 0.0);
        assert!(linalg::sup_norm(&cov.hess) == 0.0);
        assert!(linalg::sup_norm(&cov.grad_outer()) == 0.0);
    }

    #[test]
    fn sphere_covariant_hessian_matches_independent_route() {
        // u = psi on the sphere chart: compare against d^2 u - Gamma du
        // evaluated through a separate finite-difference Christoffel path
        let (_, m) = chart::round_sphere_chart(1.0).unwrap();
        let x = [0.8, 0.9, 0.3];
        let jets = m.jets(&x).unwrap();
        let gamma = christoffel(&jets.g, &jets.dg).unwrap();
        let u = expr::parse("x1", 3).unwrap();
        let uj = expr::eval_jet2(&u, &x).unwrap();
        let cov = covariant_hessian(&uj, &gamma, &jets.g).unwrap();

        // independent evaluation: numerically differentiate the metric to
        // rebuild the Christoffels, then assemble d^2u - Gamma du
    let h = 1e-5;
        let mut gamma_fd = vec![vec![vec![0.0; 3]; 3]; 3];
        let ginv = linalg::spd_inverse(&jets.g).unwrap();
        let mut dg_fd = vec![vec![vec![0.0; 3]; 3]; 3];
        for k in 0..3 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let gp = m.value(&xp).unwrap();
            let gm = m.value(&xm).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    dg_fd[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
                }
            }
        }
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = 0.0;
                    for l in 0..3 {
                        s += ginv[k][l] * (dg_fd[i][j][l] + dg_fd[j][i][l] - dg_fd[l][i][j]);
                    }
                    gamma_fd[k][i][j] = 0.5 * s;
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let mut want = uj.hess_entry(i, j);
                for k in 0..3 {
                    want -= gamma_fd[k][i][j] * uj.grad()[k];
                }
                assert!(
                    (cov.hess[i][j] - want).abs() < 1e-8,
                    "hess[{i}][{j}]: {} vs {}",
                    cov.hess[i][j],
                    want
                );
            }
        }
    }

    #[test]
    fn riemann_symmetries_and_first_bianchi() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let n = if trial % 2 == 0 { 3 } else { 4 };
            let (domain, m) = sampling::random_flat_perturbed(&mut rng, n, 0.1);
            for _ in 0..10 {
                let x = sampling::random_interior_point(&mut rng, &domain);
                let jets = m.jets(&x).unwrap();
                let curv = riemann(&jets).unwrap();
                let scale = 1e-9
                    * curv
                        .riem
                        .iter()
                        .flatten()
                        .flatten()
                        .flatten()
                        .fold(0.0_f64, |a, v| a.max(v.abs()))
                        .max(1e-9);
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                let r = curv.riem[i][j][k][l];
                                assert!((r + curv.riem[j][i][k][l]).abs() < scale);
                                assert!((r + curv.riem[i][j][l][k]).abs() < scale);
                                assert!((r - curv.riem[k][l][i][j]).abs() < scale);
                                let bianchi = r
                                    + curv.riem[i][k][l][j]
                                    + curv.riem[i][l][j][k];
                                assert!(bianchi.abs() < scale, "bianchi {bianchi} vs {scale}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn einstein_normal_identity_dim3() {
        // G(n, n) = -K(plane) for the g-unit normal n to the plane
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let (domain, m) = sampling::random_flat_perturbed(&mut rng, 3, 0.15);
            let x = sampling::random_interior_point(&mut rng, &domain);
            let jets = m.jets(&x).unwrap();
            let curv = riemann(&jets).unwrap();
            let g_tensor = einstein(&curv.ric, curv.scal, &jets.g);
            for _ in 0..20 {
                let plane = TangentPlane {
                    v1: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                    v2: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                };
                let k = match sectional(&curv, &jets.g, &plane) {
                    Ok(k) => k,
                    Err(_) => continue,
                };
                let nvec = unit_normal(&jets.g, &plane).unwrap();
                let gnn = linalg::quadratic_form(&g_tensor, &nvec, &nvec);
                assert!(
                    (gnn + k).abs() < 1e-8 * (1.0 + k.abs()),
                    "G(n,n) = {gnn}, K = {k}"
                );
            }
        }
    }

    #[test]
    fn sphere_einstein_vs_sectional_signs() {
        // round unit sphere: G = -g, so min eig(G rel g) = -1 while K = +1
        let (_, m) = chart::round_sphere_chart(1.0).unwrap();
        let x = [0.8, 0.7, 0.6];
        let jets = m.jets(&x).unwrap();
        let curv = riemann(&jets).unwrap();
        let g_tensor = einstein(&curv.ric, curv.scal, &jets.g);
        let eigs = crate::eigen::generalized_eigs(&g_tensor, &jets.g).unwrap();
        assert!(close(eigs.min(), -1.0, 1e-8));
        assert!(close(eigs.max(), -1.0, 1e-8));
        // hyperbolic: G = +g, K = -1
        let (_, hm) = chart::hyperbolic_ball(3).unwrap();
        let hx = [0.1, -0.2, 0.25];
        let hj = hm.jets(&hx).unwrap();
        let hc = riemann(&hj).unwrap();
        let hg = einstein(&hc.ric, hc.scal, &hj.g);
        let heigs = crate::eigen::generalized_eigs(&hg, &hj.g).unwrap();
        assert!(close(heigs.min(), 1.0, 1e-8));
        let plane = TangentPlane {
            v1: vec![1.0, 0.2, 0.0],
            v2: vec![0.0, 1.0, -0.3],
        };
        let k = sectional(&hc, &hj.g, &plane).unwrap();
        assert!(close(k, -1.0, 1e-8));
    }
}
