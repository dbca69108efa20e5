//! Garding cones Gamma_k, membership margins, the boundary constant
//! varrho, and the type-1 / type-2 classification.
//!
//! Gamma_k = { lambda : sigma_j(lambda) > 0 for j = 1..k } with sigma_j the
//! j-th elementary symmetric polynomial; Gamma_n is the positive orthant and
//! Gamma_1 the half-space of positive trace. Membership questions are
//! normalized so the reported margin is comparable across scales:
//! margin = min_{j<=k} sigma_j(lambda/|lambda|_2) / C(n,j).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bisection tolerance for the boundary constant.
const VARRHO_TOL: f64 = 1e-10;

/// Margin floor separating "interior with slack" from "boundary-hugging" in
/// the type classification probes.
const TYPE_MARGIN_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeType {
    Type1,
    Type2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Scale-invariant slack; positive exactly when `member` holds.
    pub margin: f64,
}

/// The cone Gamma_k in R^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    n: usize,
    k: usize,
}

/// sigma_0..sigma_n of lambda, via the product recurrence for
/// prod_i (1 + lambda_i t).
pub fn elementary_symmetric(lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (count, &l) in lambda.iter().enumerate() {
        for j in (1..=count + 1).rev() {
            e[j] += l * e[j - 1];
        }
    }
    e
}

pub fn binomial(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

impl Cone {
    pub fn gamma_k(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return Err(Error::InvalidCone(format!(
                "gamma_k needs 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        Ok(Cone { n, k })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Membership with a scale-invariant margin.
    ///
    /// The vector is canonically sorted before any arithmetic so the result
    /// is bitwise identical under coordinate permutations.
    pub fn contains(&self, lambda: &[f64]) -> Result<Membership> {
        if lambda.len() != self.n {
            return Err(Error::InvalidCone(format!(
                "vector has length {}, cone lives in R^{}",
                lambda.len(),
                self.n
            )));
        }
        if lambda.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroVector);
        }
        let mut sorted = lambda.to_vec();
        sorted.sort_by(f64::total_cmp);

        // sup-norm pre-scaling so |lambda|_2 never overflows
        let sup = sorted.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut unit: Vec<f64> = sorted.iter().map(|v| v / sup).collect();
        let l2: f64 = unit.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in unit.iter_mut() {
            *v /= l2;
        }

        let sigma = elementary_symmetric(&unit);
        let mut margin = f64::INFINITY;
        for j in 1..=self.k {
            margin = margin.min(sigma[j] / binomial(self.n, j));
        }
        Ok(Membership {
            member: margin > 0.0,
            margin,
        })
    }

    /// The unique t > 0 with (1,...,1,1-t) on the cone boundary, found by
    /// bisecting the membership flip over [0, n+1]. Equals n/k for Gamma_k.
    pub fn varrho(&self) -> Result<f64> {
        let member_at = |t: f64| -> Result<bool> {
            let mut v = vec![1.0; self.n];
            v[self.n - 1] = 1.0 - t;
            match self.contains(&v) {
                Ok(m) => Ok(m.member),
                // the probe can land exactly on the vertex (n = 1, t = 1);
                // the vertex sits on the boundary, outside the open cone
                Err(Error::ZeroVector) => Ok(false),
                Err(e) => Err(e),
            }
        };
        let mut lo = 0.0_f64;
        let mut hi = (self.n + 1) as f64;
        if !member_at(lo)? || member_at(hi)? {
            return Err(Error::NoBoundaryFlip(hi));
        }
        while hi - lo > VARRHO_TOL {
            let mid = 0.5 * (lo + hi);
            if member_at(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Type 2 when (0,...,0,1) lies strictly inside the cone, type 1 when it
    /// sits on the boundary.
    ///
    /// Decided by probing (eps,...,eps,1) at eps = 1e-6 and 1e-9: an interior
    /// limit keeps its margin bounded below, a boundary limit's margin decays
    /// with eps. The two probes must agree. This is a heuristic in place of
    /// exact boundary geometry; it is exact for every Gamma_k.
    pub fn classify_type(&self) -> Result<ConeType> {
        let verdict = |eps: f64| -> Result<bool> {
            let mut v = vec![eps; self.n];
            v[self.n - 1] = 1.0;
            let m = self.contains(&v)?;
            Ok(m.member && m.margin >= TYPE_MARGIN_FLOOR)
        };
        let a = verdict(1e-6)?;
        let b = verdict(1e-9)?;
        if a != b {
            return Err(Error::InconsistentConeType);
        }
        Ok(if a { ConeType::Type2 } else { ConeType::Type1 })
    }

    /// Whether (1,...,1,1-(n-2)/(tau-1)) lies inside the cone — the parameter
    /// range in which the tau-family construction applies directly.
    ///
    /// For tau > 1 this is equivalent to tau > 1 + (n-2)/varrho, and the two
    /// routes are cross-checked away from the threshold.
    pub fn tau_admissible(&self, tau: f64) -> Result<bool> {
        if tau == 1.0 {
            return Err(Error::TauIsOne);
        }
        let n = self.n;
        let mut v = vec![1.0; n];
        v[n - 1] = 1.0 - (n as f64 - 2.0) / (tau - 1.0);
        let member = self.contains(&v)?.member;

        if tau > 1.0 {
            let threshold = 1.0 + (n as f64 - 2.0) / self.varrho()?;
            if (tau - threshold).abs() > 1e-8 {
                let scalar = tau > threshold;
                if scalar != member {
                    return Err(Error::Inconsistent(format!(
                        "vector membership {member} disagrees with scalar test {scalar} at tau = {tau}"
                    )));
                }
            }
        }
        Ok(member)
    }
}
