//! Second-order forward-mode dual numbers.
//!
//! A [`Jet2`] carries a value, its gradient, and the lower triangle of its
//! Hessian through arithmetic, so evaluating any composite expression yields
//! exact-to-roundoff first and second derivatives. The Hessian is stored as a
//! single triangle, making symmetry a structural fact rather than a numerical
//! accident.

use crate::linalg::Mat;

/// Value, gradient and symmetric Hessian of a scalar at a point in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    n: usize,
    val: f64,
    grad: Vec<f64>,
    /// Lower triangle, row-major: entry (i, j) with j <= i at i*(i+1)/2 + j.
    hess: Vec<f64>,
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

fn tri_len(n: usize) -> usize {
    n * (n + 1) / 2
}

// method arithmetic instead of operator traits: jets are heap-backed, and
// explicit &-receivers keep the chain-rule call sites allocation-aware
#[allow(clippy::should_implement_trait)]
impl Jet2 {
    pub fn constant(n: usize, c: f64) -> Self {
        Jet2 {
            n,
            val: c,
            grad: vec![0.0; n],
            hess: vec![0.0; tri_len(n)],
        }
    }

    /// The i-th coordinate function evaluated at `x`.
    pub fn variable(n: usize, i: usize, x: f64) -> Self {
        let mut j = Self::constant(n, x);
        j.grad[i] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn val(&self) -> f64 {
        self.val
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess_entry(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.hess[tri(i, j)]
        } else {
            self.hess[tri(j, i)]
        }
    }

    /// Expand the stored triangle into a full (exactly symmetric) matrix.
    pub fn hess_full(&self) -> Mat {
        let n = self.n;
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.hess[tri(i, j)];
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        h
    }

    pub fn add(&self, o: &Jet2) -> Jet2 {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Jet2) -> Jet2 {
        self.zip(o, |a, b| a - b)
    }

    pub fn neg(&self) -> Jet2 {
        self.map_linear(|a| -a)
    }

    pub fn scale(&self, c: f64) -> Jet2 {
        self.map_linear(|a| c * a)
    }

    pub fn add_scalar(&self, c: f64) -> Jet2 {
        let mut r = self.clone();
        r.val += c;
        r
    }

    pub fn mul(&self, o: &Jet2) -> Jet2 {
        let n = self.n;
        let val = self.val * o.val;
        let grad: Vec<f64> = (0..n)
            .map(|i| self.grad[i] * o.val + self.val * o.grad[i])
            .collect();
        let mut hess = vec![0.0; tri_len(n)];
        for i in 0..n {
            for j in 0..=i {
                hess[tri(i, j)] = self.hess[tri(i, j)] * o.val
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i]
                    + self.val * o.hess[tri(i, j)];
            }
        }
        Jet2 { n, val, grad, hess }
    }

    /// Quotient; the caller is responsible for `o.val != 0`.
    pub fn div(&self, o: &Jet2) -> Jet2 {
        let n = self.n;
        let q = self.val / o.val;
        let grad: Vec<f64> = (0..n)
            .map(|i| (self.grad[i] - q * o.grad[i]) / o.val)
            .collect();
        let mut hess = vec![0.0; tri_len(n)];
        for i in 0..n {
            for j in 0..=i {
                hess[tri(i, j)] = (self.hess[tri(i, j)]
                    - grad[i] * o.grad[j]
                    - grad[j] * o.grad[i]
                    - q * o.hess[tri(i, j)])
                    / o.val;
            }
        }
        Jet2 { n, val: q, grad, hess }
    }

    /// Univariate chain rule: f(self) with f, f', f'' at self.val.
    fn chain(&self, f: f64, df: f64, ddf: f64) -> Jet2 {
        let n = self.n;
        let grad: Vec<f64> = self.grad.iter().map(|g| df * g).collect();
        let mut hess = vec![0.0; tri_len(n)];
        for i in 0..n {
            for j in 0..=i {
                hess[tri(i, j)] = ddf * self.grad[i] * self.grad[j] + df * self.hess[tri(i, j)];
            }
        }
        Jet2 { n, val: f, grad, hess }
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    /// Natural logarithm; requires `self.val > 0`.
    pub fn ln(&self) -> Jet2 {
        let v = self.val;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }

    /// Square root; requires `self.val > 0` for finite derivatives.
    pub fn sqrt(&self) -> Jet2 {
        let r = self.val.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.val))
    }

    /// Integer power by repeated multiplication. Negative exponents go
    /// through `div`, so the caller must rule out a zero base for those.
    pub fn powi(&self, k: i64) -> Jet2 {
        let one = Jet2::constant(self.n, 1.0);
        if k == 0 {
            return one;
        }
        let mut acc = one;
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if k < 0 {
            Jet2::constant(self.n, 1.0).div(&acc)
        } else {
            acc
        }
    }

    fn zip(&self, o: &Jet2, f: impl Fn(f64, f64) -> f64) -> Jet2 {
        Jet2 {
            n: self.n,
            val: f(self.val, o.val),
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| f(*a, *b)).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn map_linear(&self, f: impl Fn(f64) -> f64) -> Jet2 {
        Jet2 {
            n: self.n,
            val: f(self.val),
            grad: self.grad.iter().map(|a| f(*a)).collect(),
            hess: self.hess.iter().map(|a| f(*a)).collect(),
        }
    }
}
