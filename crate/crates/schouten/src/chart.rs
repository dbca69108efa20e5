//! Compact single-chart domains, sample grids, and metric/potential fields.
//!
//! A chart is a closed box in R^n. Grids are tensor products that include all
//! boundary faces, ordered lexicographically by axis so point indices are
//! stable across runs. Metric and potential entries are scalar fields that
//! evaluate to second-order jets anywhere in the box.

use crate::eigen;
use crate::error::{Error, Result};
use crate::expr::{self, Expr, UnaryOp};
use crate::jet::Jet2;
use crate::linalg::Mat;

/// Closed box prod_i [lower_i, upper_i] standing in for a compact
/// manifold-with-boundary chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ChartDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidDomain("bound vectors differ in length".into()));
        }
        if lower.len() < 2 {
            return Err(Error::InvalidDomain(format!(
                "need dimension >= 2, got {}",
                lower.len()
            )));
        }
        for i in 0..lower.len() {
            if !(lower[i] < upper[i]) {
                return Err(Error::InvalidDomain(format!(
                    "axis {}: lower {} must be below upper {}",
                    i + 1,
                    lower[i],
                    upper[i]
                )));
            }
        }
        Ok(ChartDomain { lower, upper })
    }

    pub fn unit_box(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n], vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// Tensor-product sample grid over a chart, boundary faces included.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    domain: ChartDomain,
    resolution: usize,
    points: Vec<Vec<f64>>,
}

/// Build the r^n grid with axis coordinates lower + k (upper-lower)/(r-1).
/// The first and last node of every axis are bitwise the domain bounds.
pub fn make_grid(domain: &ChartDomain, resolution: usize) -> Result<SampleGrid> {
    if resolution < 2 {
        return Err(Error::GridResolution(resolution));
    }
    let n = domain.dim();
    let axes: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..resolution)
                .map(|k| {
                    if k == 0 {
                        domain.lower[i]
                    } else if k == resolution - 1 {
                        domain.upper[i]
                    } else {
                        let step = (domain.upper[i] - domain.lower[i]) / (resolution - 1) as f64;
                        domain.lower[i] + k as f64 * step
                    }
                })
                .collect()
        })
        .collect();

    let total = resolution
        .checked_pow(n as u32)
        .filter(|&t| t <= 10_000_000)
        .ok_or_else(|| {
            Error::InvalidDomain(format!(
                "grid of {resolution}^{n} points exceeds the 1e7 cap"
            ))
        })?;
    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    loop {
        points.push((0..n).map(|i| axes[i][idx[i]]).collect());
        // lexicographic: last axis varies fastest
        let mut axis = n;
        while axis > 0 {
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < resolution {
                break;
            }
            idx[axis] = 0;
            if axis == 0 {
                return Ok(SampleGrid {
                    domain: domain.clone(),
                    resolution,
                    points,
                });
            }
        }
    }
}

impl SampleGrid {
    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Scalar field over a chart, evaluable to a [`Jet2`] at any point.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    Constant(f64),
    /// `coeffs[0] + sum_i coeffs[i+1] * x_{i+1}`
    Linear(Vec<f64>),
    Expression(Expr),
}

impl ScalarField {
    pub fn constant(c: f64) -> Self {
        ScalarField::Constant(c)
    }

    pub fn linear(coeffs: Vec<f64>) -> Self {
        ScalarField::Linear(coeffs)
    }

    pub fn expression(e: Expr) -> Self {
        ScalarField::Expression(e)
    }

    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        Ok(ScalarField::Expression(expr::parse(text, dim)?))
    }

    pub fn jet(&self, x: &[f64]) -> Result<Jet2> {
        match self {
            ScalarField::Constant(c) => Ok(Jet2::constant(x.len(), *c)),
            ScalarField::Linear(coeffs) => {
                let n = x.len();
                let mut j = Jet2::constant(n, coeffs[0]);
                for i in 0..n.min(coeffs.len().saturating_sub(1)) {
                    j = j.add(&Jet2::variable(n, i, x[i]).scale(coeffs[i + 1]));
                }
                Ok(j)
            }
            ScalarField::Expression(e) => expr::eval_jet2(e, x),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        match self {
            ScalarField::Constant(c) => Ok(*c),
            ScalarField::Linear(coeffs) => {
                let mut v = coeffs[0];
                for i in 0..x.len().min(coeffs.len().saturating_sub(1)) {
                    v += coeffs[i + 1] * x[i];
                }
                Ok(v)
            }
            ScalarField::Expression(e) => expr::eval_value(e, x),
        }
    }

    /// The field as an expression tree (used when composing fields).
    pub fn to_expr(&self) -> Expr {
        match self {
            ScalarField::Constant(c) => Expr::constant(*c),
            ScalarField::Linear(coeffs) => {
                let mut e = Expr::constant(coeffs[0]);
                for (i, c) in coeffs.iter().skip(1).enumerate() {
                    if *c != 0.0 {
                        e = Expr::add(e, Expr::mul(Expr::constant(*c), Expr::var(i)));
                    }
                }
                e
            }
            ScalarField::Expression(e) => e.clone(),
        }
    }

    /// exp(factor * self) as a new field.
    pub fn exp_scaled(&self, factor: f64) -> ScalarField {
        ScalarField::Expression(Expr::unary(
            UnaryOp::Exp,
            Expr::mul(Expr::constant(factor), self.to_expr()),
        ))
    }

    /// self + shift as a new field.
    pub fn shifted(&self, shift: f64) -> ScalarField {
        match self {
            ScalarField::Constant(c) => ScalarField::Constant(c + shift),
            ScalarField::Linear(coeffs) => {
                let mut c = coeffs.clone();
                c[0] += shift;
                ScalarField::Linear(c)
            }
            ScalarField::Expression(e) => ScalarField::Expression(Expr::add(
                e.clone(),
                Expr::constant(shift),
            )),
        }
    }

    /// (min, max) of the field over the grid points.
    pub fn range_on(&self, grid: &SampleGrid) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in grid.points() {
            let v = self.value(p)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    }
}

/// Value, first and second coordinate derivatives of the metric at a point.
#[derive(Debug, Clone)]
pub struct MetricJets {
    pub n: usize,
    /// `g[i][j]`
    pub g: Mat,
    /// `dg[k][i][j] = d_k g_ij`
    pub dg: Vec<Mat>,
    /// `ddg[k][l][i][j] = d_k d_l g_ij`
    pub ddg: Vec<Vec<Mat>>,
}

/// Symmetric positive-definite matrix of scalar fields; one field is stored
/// per unordered index pair, so g_ij = g_ji holds structurally.
#[derive(Debug, Clone)]
pub struct MetricField {
    n: usize,
    /// Lower triangle, row-major: (i, j) with j <= i at i*(i+1)/2 + j.
    entries: Vec<ScalarField>,
}

fn tri(i: usize, j: usize) -> usize {
    if j <= i {
        i * (i + 1) / 2 + j
    } else {
        j * (j + 1) / 2 + i
    }
}

impl MetricField {
    pub fn from_lower_triangle(n: usize, entries: Vec<ScalarField>) -> Result<Self> {
        if entries.len() != n * (n + 1) / 2 {
            return Err(Error::InvalidDomain(format!(
                "metric needs {} lower-triangle entries, got {}",
                n * (n + 1) / 2,
                entries.len()
            )));
        }
        Ok(MetricField { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                entries.push(ScalarField::Constant(if i == j { 1.0 } else { 0.0 }));
            }
        }
        MetricField { n, entries }
    }

    pub fn diagonal(fields: Vec<ScalarField>) -> Self {
        let n = fields.len();
        let mut entries = Vec::with_capacity(n * (n + 1) / 2);
        for (i, f) in fields.into_iter().enumerate() {
            for _ in 0..i {
                entries.push(ScalarField::Constant(0.0));
            }
            entries.push(f);
        }
        MetricField { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField {
        &self.entries[tri(i, j)]
    }

    /// Value matrix at `x`.
    pub fn value(&self, x: &[f64]) -> Result<Mat> {
        let n = self.n;
        let mut g = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.entries[tri(i, j)].value(x)?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        Ok(g)
    }

    /// Value, gradient and Hessian of every component at `x`.
    pub fn jets(&self, x: &[f64]) -> Result<MetricJets> {
        let n = self.n;
        let mut out = MetricJets {
            n,
            g: vec![vec![0.0; n]; n],
            dg: vec![vec![vec![0.0; n]; n]; n],
            ddg: vec![vec![vec![vec![0.0; n]; n]; n]; n],
        };
        for i in 0..n {
            for j in 0..=i {
                let jet = self.entries[tri(i, j)].jet(x)?;
                out.set_entry(i, j, &jet);
            }
        }
        Ok(out)
    }
}

impl MetricJets {
    /// Install the jet of component (i, j), mirroring into (j, i).
    pub fn set_entry(&mut self, i: usize, j: usize, jet: &Jet2) {
        let n = self.n;
        self.g[i][j] = jet.val();
        self.g[j][i] = jet.val();
        for k in 0..n {
            self.dg[k][i][j] = jet.grad()[k];
            self.dg[k][j][i] = jet.grad()[k];
            for l in 0..=k {
                let h = jet.hess_entry(k, l);
                self.ddg[k][l][i][j] = h;
                self.ddg[k][l][j][i] = h;
                self.ddg[l][k][i][j] = h;
                self.ddg[l][k][j][i] = h;
            }
        }
    }
}

/// Smallest metric eigenvalue over all grid points; errors with
/// [`Error::MetricNotSpd`] if it drops to `1e-10` or below anywhere.
pub fn check_spd_on_grid(metric: &MetricField, grid: &SampleGrid) -> Result<f64> {
    let mut global_min = f64::INFINITY;
    for p in grid.points() {
        let g = metric.value(p)?;
        let eigs = eigen::sym_eigs(&g)?;
        let min_eig = eigs.as_slice()[0];
        if min_eig <= 1e-10 {
            return Err(Error::MetricNotSpd {
                point: p.clone(),
                min_eig,
            });
        }
        global_min = global_min.min(min_eig);
    }
    Ok(global_min)
}

// ---------------------------------------------------------------------------
// Builtin metric catalog
// ---------------------------------------------------------------------------

/// Parameters accepted by [`builtin_metric`]. Unused fields are ignored by
/// builtins that do not take them.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BuiltinParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    /// Lower-triangle perturbation entries for `flat_perturbed`, row-major.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<String>>,
}

/// Construct a builtin metric by name on its catalog domain.
pub fn builtin_metric(
    name: &str,
    n: usize,
    params: &BuiltinParams,
) -> Result<(ChartDomain, MetricField)> {
    match name {
        "euclidean" => Ok((ChartDomain::unit_box(n)?, MetricField::identity(n))),
        "round_sphere_chart" => {
            if n != 3 {
                return Err(Error::BuiltinParams {
                    name: name.into(),
                    message: format!("defined for dimension 3, got {n}"),
                });
            }
            let radius = params.radius.unwrap_or(1.0);
            if radius <= 0.0 {
                return Err(Error::BuiltinParams {
                    name: name.into(),
                    message: "radius must be positive".into(),
                });
            }
            round_sphere_chart(radius)
        }
        "hyperbolic_ball" => hyperbolic_ball(n),
        "flat_perturbed" => {
            let eps = params.epsilon.unwrap_or(0.1);
            let entries = match &params.entries {
                Some(texts) => {
                    let mut parsed = Vec::with_capacity(texts.len());
                    for t in texts {
                        parsed.push(expr::parse(t, n)?);
                    }
                    Some(parsed)
                }
                None => None,
            };
            flat_perturbed(n, eps, entries.as_deref())
        }
        "conformal_flat" => {
            let phi_text = params.phi.as_deref().ok_or_else(|| Error::BuiltinParams {
                name: name.into(),
                message: "needs a `phi` expression".into(),
            })?;
            let phi = expr::parse(phi_text, n)?;
            conformal_flat(n, phi)
        }
        other => Err(Error::UnknownBuiltin(other.into())),
    }
}

/// Spherical coordinate chart of the round sphere of the given radius:
/// g = radius^2 (dpsi^2 + sin^2(psi) dtheta^2 + sin^2(psi) sin^2(theta) dphi^2)
/// on psi, theta in [0.6, 1.2], phi in [0, 1] — strictly away from the poles.
pub fn round_sphere_chart(radius: f64) -> Result<(ChartDomain, MetricField)> {
    let domain = ChartDomain::new(vec![0.6, 0.6, 0.0], vec![1.2, 1.2, 1.0])?;
    let r2 = radius * radius;
    let sin2 = |v: usize| {
        Expr::binary(
            crate::expr::BinaryOp::Pow,
            Expr::unary(UnaryOp::Sin, Expr::var(v)),
            Expr::constant(2.0),
        )
    };
    let g11 = ScalarField::Constant(r2);
    let g22 = ScalarField::Expression(Expr::mul(Expr::constant(r2), sin2(0)));
    let g33 = ScalarField::Expression(Expr::mul(
        Expr::constant(r2),
        Expr::mul(sin2(0), sin2(1)),
    ));
    Ok((domain, MetricField::diagonal(vec![g11, g22, g33])))
}

/// Poincare-ball model restricted to the sub-box |x_i| <= 0.4:
/// g = 4 (1 - |x|^2)^{-2} delta.
pub fn hyperbolic_ball(n: usize) -> Result<(ChartDomain, MetricField)> {
    let domain = ChartDomain::new(vec![-0.4; n], vec![0.4; n])?;
    let mut norm_sq = Expr::constant(0.0);
    for i in 0..n {
        norm_sq = Expr::add(
            norm_sq,
            Expr::binary(crate::expr::BinaryOp::Pow, Expr::var(i), Expr::constant(2.0)),
        );
    }
    // 4 / (1 - |x|^2)^2
    let factor = Expr::binary(
        crate::expr::BinaryOp::Div,
        Expr::constant(4.0),
        Expr::binary(
            crate::expr::BinaryOp::Pow,
            Expr::binary(crate::expr::BinaryOp::Sub, Expr::constant(1.0), norm_sq),
            Expr::constant(2.0),
        ),
    );
    let fields = (0..n)
        .map(|_| ScalarField::Expression(factor.clone()))
        .collect();
    Ok((domain, MetricField::diagonal(fields)))
}

/// Identity plus eps times a smooth symmetric perturbation on the unit box.
///
/// Without explicit entries the perturbation defaults to gentle phase-shifted
/// waves, p_ij = sin(x_i + x_j + (i + j + 2) * 2/5), whose first and second
/// derivatives are bounded by one. At eps = 0.1 the metric stays uniformly
/// positive definite for n <= 4 by a Gershgorin bound.
pub fn flat_perturbed(
    n: usize,
    eps: f64,
    entries: Option<&[Expr]>,
) -> Result<(ChartDomain, MetricField)> {
    let domain = ChartDomain::unit_box(n)?;
    let tri_len = n * (n + 1) / 2;
    let perturbation: Vec<Expr> = match entries {
        Some(list) => {
            if list.len() != tri_len {
                return Err(Error::BuiltinParams {
                    name: "flat_perturbed".into(),
                    message: format!(
                        "needs {tri_len} lower-triangle entries, got {}",
                        list.len()
                    ),
                });
            }
            list.to_vec()
        }
        None => {
            let mut list = Vec::with_capacity(tri_len);
            for i in 0..n {
                for j in 0..=i {
                    let phase = (i + j + 2) as f64 * 0.4;
                    list.push(Expr::unary(
                        UnaryOp::Sin,
                        Expr::add(
                            Expr::add(Expr::var(i), Expr::var(j)),
                            Expr::constant(phase),
                        ),
                    ));
                }
            }
            list
        }
    };
    let mut fields = Vec::with_capacity(tri_len);
    let mut idx = 0;
    for i in 0..n {
        for j in 0..=i {
            let bump = Expr::mul(Expr::constant(eps), perturbation[idx].clone());
            let entry = if i == j {
                Expr::add(Expr::constant(1.0), bump)
            } else {
                bump
            };
            fields.push(ScalarField::Expression(entry));
            idx += 1;
        }
    }
    Ok((domain, MetricField::from_lower_triangle(n, fields)?))
}

/// g = e^{2 phi} delta on the unit box.
pub fn conformal_flat(n: usize, phi: Expr) -> Result<(ChartDomain, MetricField)> {
    let domain = ChartDomain::unit_box(n)?;
    let factor = Expr::unary(
        UnaryOp::Exp,
        Expr::mul(Expr::constant(2.0), phi),
    );
    let fields = (0..n)
        .map(|_| ScalarField::Expression(factor.clone()))
        .collect();
    Ok((domain, MetricField::diagonal(fields)))
}
