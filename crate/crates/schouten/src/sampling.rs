//! Seeded random generators and the finite-difference oracle.
//!
//! These back the property tests, the acceptance suite, and the runnable
//! examples. Expressions produced here are "domain safe": log and sqrt only
//! ever see arguments bounded away from zero, so any point of the unit box
//! (and a finite-difference stencil around it) evaluates cleanly.

use rand::Rng;

use crate::chart::{ChartDomain, MetricField, ScalarField};
use crate::error::Result;
use crate::expr::{self, BinaryOp, Expr, UnaryOp};
use crate::linalg::{self, Mat};

/// Random point in the open unit box (0.1, 0.9)^dim.
pub fn random_unit_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(0.1..0.9)).collect()
}

/// Random interior point of `domain`, away from the boundary faces.
pub fn random_interior_point<R: Rng>(rng: &mut R, domain: &ChartDomain) -> Vec<f64> {
    (0..domain.dim())
        .map(|i| {
            let (lo, hi) = (domain.lower()[i], domain.upper()[i]);
            let margin = 0.1 * (hi - lo);
            rng.random_range(lo + margin..hi - margin)
        })
        .collect()
}

/// Random well-behaved expression of bounded depth over `x1..x{dim}`.
///
/// All unary and binary operators can occur. Arguments of exp are scaled
/// into a safe range; log and sqrt wrap strictly positive subtrees; bases of
/// non-integer powers are strictly positive. Candidates whose value,
/// gradient or Hessian grow large anywhere on the unit box are rejected and
/// redrawn, so central finite differences with relative step 1e-4 stay
/// meaningful on everything this returns.
pub fn random_expr<R: Rng>(rng: &mut R, dim: usize, depth: usize) -> Expr {
    for _ in 0..100 {
        let candidate = random_expr_raw(rng, dim, depth);
        if is_tame(&candidate, dim) {
            return candidate;
        }
    }
    // polynomials are always tame
    random_polynomial(rng, dim, 3, 1.0)
}

fn is_tame(e: &Expr, dim: usize) -> bool {
    // a fixed probe lattice: corners biased plus center
    let mut probe = vec![vec![0.5; dim]];
    for i in 0..dim {
        let mut lo = vec![0.12; dim];
        lo[i] = 0.88;
        probe.push(lo);
        let mut hi = vec![0.85; dim];
        hi[i] = 0.15;
        probe.push(hi);
    }
    for x in &probe {
        let Ok(jet) = expr::eval_jet2(e, x) else {
            return false;
        };
        if !jet.val().is_finite() || jet.val().abs() > 30.0 {
            return false;
        }
        for i in 0..dim {
            if jet.grad()[i].abs() > 30.0 {
                return false;
            }
            for j in 0..=i {
                if jet.hess_entry(i, j).abs() > 60.0 {
                    return false;
                }
            }
        }
        // the truncation error of a central second difference scales with
        // the fourth derivative; bound it per axis from values alone
        let h = 0.02;
        for i in 0..dim {
            let f_at = |offset: f64| {
                let mut p = x.clone();
                p[i] += offset;
                expr::eval_value(e, &p)
            };
            let stencil = [
                f_at(-2.0 * h),
                f_at(-h),
                f_at(0.0),
                f_at(h),
                f_at(2.0 * h),
            ];
            let [a, b, c, d, f] = stencil;
            let (Ok(a), Ok(b), Ok(c), Ok(d), Ok(f)) = (a, b, c, d, f) else {
                return false;
            };
            let fourth = (a - 4.0 * b + 6.0 * c - 4.0 * d + f) / h.powi(4);
            if !fourth.is_finite() || fourth.abs() > 100.0 {
                return false;
            }
        }
    }
    true
}

fn random_expr_raw<R: Rng>(rng: &mut R, dim: usize, depth: usize) -> Expr {
    if depth == 0 {
        return random_leaf(rng, dim);
    }
    match rng.random_range(0..10u32) {
        0 => random_leaf(rng, dim),
        1 => Expr::unary(UnaryOp::Neg, random_expr_raw(rng, dim, depth - 1)),
        2 => Expr::unary(UnaryOp::Sin, random_expr_raw(rng, dim, depth - 1)),
        3 => Expr::unary(UnaryOp::Cos, random_expr_raw(rng, dim, depth - 1)),
        4 => {
            // exp of a damped argument keeps values and FD stencils tame
            let inner = random_expr_raw(rng, dim, depth - 1);
            Expr::unary(
                UnaryOp::Exp,
                Expr::mul(Expr::constant(rng.random_range(0.05..0.4)), inner),
            )
        }
        5 => Expr::unary(UnaryOp::Log, positive_subtree(rng, dim, depth - 1)),
        6 => Expr::unary(UnaryOp::Sqrt, positive_subtree(rng, dim, depth - 1)),
        7 => Expr::binary(
            BinaryOp::Pow,
            positive_subtree(rng, dim, depth - 1),
            Expr::constant(rng.random_range(0.3..2.5)),
        ),
        8 => Expr::binary(
            BinaryOp::Pow,
            random_expr_raw(rng, dim, depth - 1),
            Expr::constant(rng.random_range(2..4) as f64),
        ),
        _ => {
            let op = match rng.random_range(0..4u32) {
                0 => BinaryOp::Add,
                1 => BinaryOp::Sub,
                2 => BinaryOp::Mul,
                _ => BinaryOp::Div,
            };
            let l = random_expr_raw(rng, dim, depth - 1);
            let r = if op == BinaryOp::Div {
                positive_subtree(rng, dim, depth - 1)
            } else {
                random_expr_raw(rng, dim, depth - 1)
            };
            Expr::binary(op, l, r)
        }
    }
}

fn random_leaf<R: Rng>(rng: &mut R, dim: usize) -> Expr {
    if rng.random_bool(0.4) {
        Expr::constant(rng.random_range(-2.0..2.0))
    } else {
        Expr::var(rng.random_range(0..dim))
    }
}

// c + sin(...)^2-style tree with values in [c, c + 1], c >= 1.2
fn positive_subtree<R: Rng>(rng: &mut R, dim: usize, depth: usize) -> Expr {
    let c = rng.random_range(1.2..3.0);
    let inner = if depth == 0 {
        random_leaf(rng, dim)
    } else {
        random_expr_raw(rng, dim, depth - 1)
    };
    Expr::add(
        Expr::constant(c),
        Expr::binary(BinaryOp::Pow, Expr::unary(UnaryOp::Sin, inner), Expr::constant(2.0)),
    )
}

/// Random polynomial of total degree <= `degree` with coefficients in
/// [-amplitude, amplitude].
pub fn random_polynomial<R: Rng>(rng: &mut R, dim: usize, degree: u32, amplitude: f64) -> Expr {
    let mut acc = Expr::constant(rng.random_range(-amplitude..amplitude));
    let terms = rng.random_range(2..5u32);
    for _ in 0..terms {
        let mut term = Expr::constant(rng.random_range(-amplitude..amplitude));
        let mut remaining = degree;
        while remaining > 0 && rng.random_bool(0.7) {
            let v = Expr::var(rng.random_range(0..dim));
            term = Expr::mul(term, v);
            remaining -= 1;
        }
        acc = Expr::add(acc, term);
    }
    acc
}

/// Gradient and Hessian of `e` at `x` by second-order central differences
/// with relative step `rel_step`, computed from values only.
pub fn finite_difference_jet(e: &Expr, x: &[f64], rel_step: f64) -> Result<(Vec<f64>, Mat)> {
    let n = x.len();
    let h: Vec<f64> = x.iter().map(|xi| rel_step * (1.0 + xi.abs())).collect();
    let at = |p: &[f64]| expr::eval_value(e, p);

    let mut grad = vec![0.0; n];
    let mut hess = vec![vec![0.0; n]; n];
    let f0 = at(x)?;
    for i in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h[i];
        xm[i] -= h[i];
        let fp = at(&xp)?;
        let fm = at(&xm)?;
        grad[i] = (fp - fm) / (2.0 * h[i]);
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for i in 0..n {
        for j in 0..i {
            let mut pp = x.to_vec();
            let mut pm = x.to_vec();
            let mut mp = x.to_vec();
            let mut mm = x.to_vec();
            pp[i] += h[i];
            pp[j] += h[j];
            pm[i] += h[i];
            pm[j] -= h[j];
            mp[i] -= h[i];
            mp[j] += h[j];
            mm[i] -= h[i];
            mm[j] -= h[j];
            let v = (at(&pp)? - at(&pm)? - at(&mp)? + at(&mm)?) / (4.0 * h[i] * h[j]);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    Ok((grad, hess))
}

/// Random symmetric matrix with entries in [-1, 1].
pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Mat {
    let mut m = linalg::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.random_range(-1.0..1.0);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// Random SPD matrix Q D Q^T with eigenvalues in [0.3, 3].
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> Mat {
    let q = random_orthogonal(rng, n);
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..3.0)).collect();
    let mut m = linalg::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for (k, dk) in d.iter().enumerate() {
                s += q[i][k] * dk * q[j][k];
            }
            m[i][j] = s;
        }
    }
    // force exact symmetry
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Mat {
    // Gram-Schmidt on a random matrix; retries are unnecessary at n <= 6
    let mut q = linalg::zeros(n);
    for col in 0..n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for prev in 0..col {
            let prev_col: Vec<f64> = (0..n).map(|r| q[r][prev]).collect();
            let proj = linalg::dot(&v, &prev_col);
            for r in 0..n {
                v[r] -= proj * prev_col[r];
            }
        }
        let norm = linalg::robust_l2(&v);
        for r in 0..n {
            q[r][col] = v[r] / norm;
        }
    }
    q
}

/// Random perturbation of the flat metric on the unit box: small trig entries
/// with random phases and amplitudes, scaled by `eps`.
pub fn random_flat_perturbed<R: Rng>(
    rng: &mut R,
    n: usize,
    eps: f64,
) -> (ChartDomain, MetricField) {
    let domain = ChartDomain::unit_box(n).expect("unit box");
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..=i {
            let a = rng.random_range(0.3..1.0);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let va = rng.random_range(0..n);
            let vb = rng.random_range(0..n);
            // eps * a * sin(x_va + x_vb + phase), plus 1 on the diagonal
            let wave = Expr::unary(
                UnaryOp::Sin,
                Expr::add(
                    Expr::add(Expr::var(va), Expr::var(vb)),
                    Expr::constant(phase),
                ),
            );
            let bump = Expr::mul(Expr::constant(eps * a), wave);
            let entry = if i == j {
                Expr::add(Expr::constant(1.0), bump)
            } else {
                bump
            };
            entries.push(ScalarField::expression(entry));
        }
    }
    let metric = MetricField::from_lower_triangle(n, entries).expect("symmetric by construction");
    (domain, metric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_exprs_evaluate_on_unit_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let e = random_expr(&mut rng, 3, 3);
            let x = random_unit_point(&mut rng, 3);
            let v = expr::eval_value(&e, &x).unwrap();
            assert!(v.is_finite(), "{e} at {x:?} gave {v}");
        }
    }

    #[test]
    fn random_spd_is_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=5 {
            for _ in 0..20 {
                let m = random_spd(&mut rng, n);
                assert!(linalg::cholesky(&m).is_some());
            }
        }
    }
}
