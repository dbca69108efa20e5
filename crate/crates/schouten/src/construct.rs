//! The e^{Nv} potential, grid verification of cone membership, the minimal-N
//! search, and the dimension-3 negative-sectional-curvature verifier.
//!
//! Everything here certifies conclusions at sample points only: a verified
//! report says the tensor eigenvalues lie strictly inside the cone at every
//! grid node, with a quantified margin — not a continuum statement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{self, MetricField, SampleGrid, ScalarField};
use crate::conformal::{self, ConformalConstants};
use crate::cones::Cone;
use crate::curvature::{self, CovariantJet, TangentPlane};
use crate::eigen;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Hard cap on N * max(v): e^{2 N v} then stays comfortably inside f64
/// range. Runs needing more fail loudly.
pub const EXP_ARG_LIMIT: f64 = 250.0;

/// The conformal factor e^{2u} itself must be representable when the full
/// curvature stack runs on e^{2u} g, so 2 max(u) must stay below the f64
/// exponent ceiling (ln(f64::MAX) is about 709.8).
pub const CONFORMAL_LOG_LIMIT: f64 = 700.0;

/// Minimal allowed |grad v|_g over the grid; below this the potential is
/// treated as having a critical point.
pub const CRITICAL_GRAD_TOL: f64 = 1e-6;

/// Potential u = e^{Nv} built from a critical-point-free v >= 1.
#[derive(Debug, Clone)]
pub struct Potential {
    pub v: ScalarField,
    pub big_n: f64,
}

impl Potential {
    pub fn new(v: ScalarField, big_n: f64) -> Self {
        Potential { v, big_n }
    }

    /// u = e^{N v} as a scalar field.
    pub fn u_field(&self) -> ScalarField {
        self.v.exp_scaled(self.big_n)
    }

    /// Covariant data of u assembled from covariant data of v by the chain
    /// rule: grad u = N e^{Nv} grad v, hess u = N e^{Nv} hess v
    /// + N^2 e^{Nv} dv (x) dv, and the traces that follow.
    pub fn covariant_from_v(&self, v_cov: &CovariantJet, v_val: f64) -> CovariantJet {
        let n = v_cov.grad.len();
        let big_n = self.big_n;
        let w = (big_n * v_val).exp();
        let grad: Vec<f64> = v_cov.grad.iter().map(|g| big_n * w * g).collect();
        let mut hess = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                hess[i][j] = big_n * w * v_cov.hess[i][j]
                    + big_n * big_n * w * v_cov.grad[i] * v_cov.grad[j];
            }
        }
        CovariantJet {
            grad,
            hess,
            laplacian: big_n * w * v_cov.laplacian
                + big_n * big_n * w * v_cov.grad_norm_sq,
            grad_norm_sq: big_n * big_n * w * w * v_cov.grad_norm_sq,
        }
    }
}

/// Shift v so its grid minimum becomes exactly 1 (v <- v - min v + 1).
pub fn shift_to_min_one(v: &ScalarField, grid: &SampleGrid) -> Result<ScalarField> {
    let (min_v, _) = v.range_on(grid)?;
    Ok(v.shifted(1.0 - min_v))
}

/// Closed-form eigenvalue vector of
/// g^{-1} [ (1 + gamma e^{Nv}) |grad v|^2 g + rho (e^{Nv} - 1) dv (x) dv ]:
/// n-1 copies of (1 + gamma e^{Nv}) |grad v|^2 and one distinguished entry
/// with the extra rho (e^{Nv} - 1) |grad v|^2.
pub fn amplified_spectrum(
    grad_norm_sq: f64,
    v_at_x: f64,
    big_n: f64,
    tau: f64,
    n: usize,
) -> Result<Vec<f64>> {
    let c = ConformalConstants::new(tau, n)?;
    let w = (big_n * v_at_x).exp();
    let shared = (1.0 + c.gamma * w) * grad_norm_sq;
    let mut spectrum = vec![shared; n];
    spectrum[n - 1] = shared + c.rho * (w - 1.0) * grad_norm_sq;
    Ok(spectrum)
}

/// `V[u]` for u = e^{Nv}, expanded in terms of the covariant data of v:
///
/// N^2 e^{Nv} ( (1 + gamma e^{Nv}) |grad v|^2 g + rho (e^{Nv} - 1) dv (x) dv )
/// + N e^{Nv} ( (lap v) g - rho hess v ) + A
pub fn v_of_exp_potential(
    v_cov: &CovariantJet,
    v_val: f64,
    big_n: f64,
    a: &Mat,
    gval: &Mat,
    tau: f64,
) -> Result<Mat> {
    let n = gval.len();
    let c = ConformalConstants::new(tau, n)?;
    let w = (big_n * v_val).exp();
    let n2w = big_n * big_n * w;
    let nw = big_n * w;
    let c_g = n2w * (1.0 + c.gamma * w) * v_cov.grad_norm_sq + nw * v_cov.laplacian;
    let c_outer = n2w * c.rho * (w - 1.0);
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = c_g * gval[i][j] + c_outer * v_cov.grad[i] * v_cov.grad[j]
                - nw * c.rho * v_cov.hess[i][j]
                + a[i][j];
        }
    }
    Ok(out)
}

/// -A(g_u) for u = e^{Nv} in terms of background quantities:
///
/// -A(g) + N e^{Nv} hess v + N^2 e^{Nv} dv (x) dv
/// + N^2 e^{2Nv} ( 1/2 |grad v|^2 g - dv (x) dv )
pub fn minus_schouten_of_exp_potential(
    v_cov: &CovariantJet,
    v_val: f64,
    big_n: f64,
    a_g: &Mat,
    gval: &Mat,
) -> Mat {
    let n = gval.len();
    let w = (big_n * v_val).exp();
    let nw = big_n * w;
    let n2w = big_n * big_n * w;
    let n2w2 = n2w * w;
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = -a_g[i][j]
                + nw * v_cov.hess[i][j]
                + (n2w - n2w2) * v_cov.grad[i] * v_cov.grad[j]
                + 0.5 * n2w2 * v_cov.grad_norm_sq * gval[i][j];
        }
    }
    out
}

/// Run parameters shared by the verifiers.
#[derive(Debug, Clone, Copy)]
pub struct VerifySetup {
    pub tau: f64,
    /// +1 or -1; the cone test applies to alpha times the tensor.
    pub alpha: f64,
    pub cone: Cone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDescription {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: usize,
    pub point_count: usize,
}

impl GridDescription {
    fn of(grid: &SampleGrid) -> Self {
        GridDescription {
            lower: grid.domain().lower().to_vec(),
            upper: grid.domain().upper().to_vec(),
            resolution: grid.resolution(),
            point_count: grid.len(),
        }
    }
}

/// Extremes gathered by the dimension-3 sectional verifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionalSummary {
    pub max_sectional: f64,
    pub min_einstein_eig: f64,
    /// max over points and planes of |G(n,n) + K| / (1 + |K|)
    pub einstein_normal_residual_max: f64,
    pub planes_per_point: usize,
    pub seed: u64,
}

/// Outcome of one verification pass over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub grid: GridDescription,
    pub tau: f64,
    pub alpha: f64,
    pub cone: Cone,
    pub big_n: f64,
    /// Cone margins in point-index order.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim3: Option<SectionalSummary>,
}

/// N-independent per-point background data, computed once and reused across
/// the search ladder.
pub struct PreparedGrid {
    grid: GridDescription,
    max_v: f64,
    points: Vec<BackgroundPoint>,
}

struct BackgroundPoint {
    gval: Mat,
    /// A^tau(g) for tau != 1, the Schouten tensor for tau = 1.
    a_tau: Mat,
    v_cov: CovariantJet,
    v_val: f64,
}

/// Evaluate and validate the background at every grid point: metric SPD,
/// v >= 1, and |grad v|_g bounded away from zero.
pub fn prepare(
    g: &MetricField,
    v: &ScalarField,
    setup: &VerifySetup,
    grid: &SampleGrid,
) -> Result<PreparedGrid> {
    chart::check_spd_on_grid(g, grid)?;
    let tau = setup.tau;
    let points: Vec<BackgroundPoint> = grid
        .points()
        .par_iter()
        .map(|x| -> Result<BackgroundPoint> {
            let jets = g.jets(x)?;
            let curv = curvature::riemann(&jets)?;
            let a_tau = curvature::modified_schouten(&curv.ric, curv.scal, &jets.g, tau, 1.0)?;
            let v_jet = v.jet(x)?;
            let v_cov = curvature::covariant_hessian(&v_jet, &curv.gamma, &jets.g)?;
            let v_val = v_jet.val();
            if v_val < 1.0 {
                return Err(Error::PotentialBelowOne {
                    point: x.clone(),
                    value: v_val,
                });
            }
            let grad_norm = v_cov.grad_norm_sq.sqrt();
            if grad_norm < CRITICAL_GRAD_TOL {
                return Err(Error::CriticalPoint {
                    point: x.clone(),
                    grad_norm,
                });
            }
            Ok(BackgroundPoint {
                gval: jets.g,
                a_tau,
                v_cov,
                v_val,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_v = points.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p.v_val));
    Ok(PreparedGrid {
        grid: GridDescription::of(grid),
        max_v,
        points,
    })
}

impl PreparedGrid {
    pub fn max_v(&self) -> f64 {
        self.max_v
    }
}

/// Margin of the assembled tensor at one prepared point.
fn point_margin(p: &BackgroundPoint, setup: &VerifySetup, big_n: f64) -> Result<f64> {
    let n = p.gval.len();
    let tensor = if setup.tau == 1.0 {
        // A(g_u) via the explicit expansion; alpha = -1 recovers -A(g_u)
        let minus = minus_schouten_of_exp_potential(&p.v_cov, p.v_val, big_n, &p.a_tau, &p.gval);
        linalg::scale(&minus, -setup.alpha)
    } else {
        // A^tau(g_u) in the background frame is (tau-1)/(n-2) V[u] with
        // A = rho A^tau(g)
        let c = ConformalConstants::new(setup.tau, n)?;
        let a_scaled = linalg::scale(&p.a_tau, c.rho);
        let v = v_of_exp_potential(&p.v_cov, p.v_val, big_n, &a_scaled, &p.gval, setup.tau)?;
        linalg::scale(&v, setup.alpha / c.rho)
    };
    let eigs = eigen::generalized_eigs(&tensor, &p.gval)?;
    if eigs.as_slice().iter().all(|&l| l == 0.0) {
        // the zero vector is outside every cone; report zero slack
        return Ok(0.0);
    }
    Ok(setup.cone.contains(eigs.as_slice())?.margin)
}

/// Verify the cone condition at one N over a prepared grid.
pub fn verify_prepared(prepared: &PreparedGrid, setup: &VerifySetup, big_n: f64) -> Result<VerificationReport> {
    if big_n * prepared.max_v > EXP_ARG_LIMIT {
        return Err(Error::OverflowGuard(format!(
            "N * max(v) = {} exceeds {EXP_ARG_LIMIT}",
            big_n * prepared.max_v
        )));
    }
    let margins: Vec<f64> = prepared
        .points
        .par_iter()
        .map(|p| point_margin(p, setup, big_n))
        .collect::<Result<Vec<_>>>()?;
    let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(VerificationReport {
        grid: prepared.grid.clone(),
        tau: setup.tau,
        alpha: setup.alpha,
        cone: setup.cone,
        big_n,
        margins,
        min_margin,
        verified: min_margin > 0.0,
        dim3: None,
    })
}

/// One-shot verification at a fixed N.
pub fn verify_at_n(
    g: &MetricField,
    v: &ScalarField,
    big_n: f64,
    setup: &VerifySetup,
    grid: &SampleGrid,
) -> Result<VerificationReport> {
    let prepared = prepare(g, v, setup, grid)?;
    verify_prepared(&prepared, setup, big_n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub big_n: u32,
    pub min_margin: f64,
    pub verified: bool,
}

/// Result of the minimal-N search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Smallest verified integer N on the probed lattice, if any.
    pub n_star: Option<u32>,
    /// Report at N* when found, otherwise at the last failing probe.
    pub report: VerificationReport,
    pub probes: Vec<Probe>,
    /// True when the probe history contains a success below a failure. The
    /// search assumes success is upward-closed on the lattice; this flag
    /// records any observed violation instead of asserting the assumption.
    pub non_monotone: bool,
}

/// Doubling ladder N = 1, 2, 4, ... capped at `n_max`, then integer
/// bisection between the last failure and the first success.
pub fn search_min_n(
    g: &MetricField,
    v: &ScalarField,
    setup: &VerifySetup,
    grid: &SampleGrid,
    n_max: u32,
) -> Result<SearchOutcome> {
    let prepared = prepare(g, v, setup, grid)?;
    let mut probes: Vec<Probe> = Vec::new();

    let mut run = |big_n: u32| -> Result<VerificationReport> {
        let report = verify_prepared(&prepared, setup, big_n as f64)?;
        probes.push(Probe {
            big_n,
            min_margin: report.min_margin,
            verified: report.verified,
        });
        Ok(report)
    };

    // ladder
    let mut ladder: Vec<u32> = Vec::new();
    let mut n = 1u32;
    while n <= n_max {
        ladder.push(n);
        n = n.saturating_mul(2);
    }
    if *ladder.last().unwrap() != n_max {
        ladder.push(n_max);
    }

    let mut first_success: Option<u32> = None;
    let mut last_failure: u32 = 0;
    let mut last_report: Option<VerificationReport> = None;
    for &step in &ladder {
        let report = run(step)?;
        let ok = report.verified;
        last_report = Some(report);
        if ok {
            first_success = Some(step);
            break;
        }
        last_failure = step;
    }

    let Some(mut hi) = first_success else {
        return Ok(SearchOutcome {
            n_star: None,
            report: last_report.unwrap(),
            probes,
            non_monotone: false,
        });
    };

    // integer bisection on (last_failure, hi]
    let mut lo = last_failure;
    let mut best_report = last_report.unwrap();
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let report = run(mid)?;
        if report.verified {
            hi = mid;
            best_report = report;
        } else {
            lo = mid;
        }
    }
    if best_report.big_n as u32 != hi {
        best_report = verify_prepared(&prepared, setup, hi as f64)?;
    }

    // sanity probe at 2 N*, budget and overflow guard permitting
    let double = hi.saturating_mul(2);
    if double as f64 * prepared.max_v <= EXP_ARG_LIMIT {
        run(double)?;
    }

    let non_monotone = probes.iter().any(|fail| {
        !fail.verified && probes.iter().any(|ok| ok.verified && ok.big_n < fail.big_n)
    });

    Ok(SearchOutcome {
        n_star: Some(hi),
        report: best_report,
        probes,
        non_monotone,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Negative-sectional-curvature verification in dimension three.
///
/// Builds the metric e^{2u} g and runs the full curvature stack on it at
/// every grid point, recording (a) the minimal eigenvalue of the Einstein
/// tensor relative to g_u and (b) sectional curvatures of `planes_per_point`
/// seeded random 2-planes, together with the per-plane consistency residual
/// of the Einstein-normal identity. Plane sampling is seeded per point, so
/// results do not depend on thread scheduling.
pub fn verify_negative_sectional_dim3(
    g: &MetricField,
    u: &ScalarField,
    grid: &SampleGrid,
    planes_per_point: usize,
    seed: u64,
) -> Result<(SectionalSummary, Vec<f64>)> {
    use rand::Rng;
    use rand::SeedableRng;

    let n = g.dim();
    if n != 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let (_, max_u) = u.range_on(grid)?;
    if 2.0 * max_u > CONFORMAL_LOG_LIMIT {
        return Err(Error::OverflowGuard(format!(
            "2 max(u) = {} exceeds {CONFORMAL_LOG_LIMIT}; e^{{2u}} would leave double range",
            2.0 * max_u
        )));
    }

    struct PointSummary {
        max_k: f64,
        min_eig: f64,
        residual: f64,
    }

    let results: Vec<PointSummary> = grid
        .points()
        .par_iter()
        .enumerate()
        .map(|(idx, x)| -> Result<PointSummary> {
            let jets = conformal::conformal_metric_jets(g, u, x)?;
            let curv = curvature::riemann(&jets)?;
            let g_tensor = curvature::einstein(&curv.ric, curv.scal, &jets.g);
            let eigs = eigen::generalized_eigs(&g_tensor, &jets.g)?;
            let min_eig = eigs.min();

            let mut rng =
                rand_chacha::ChaCha8Rng::seed_from_u64(splitmix64(seed ^ (idx as u64)));
            let mut max_k = f64::NEG_INFINITY;
            let mut residual = 0.0_f64;
            let mut sampled = 0;
            while sampled < planes_per_point {
                let v1: Vec<f64> = (0..3)
                    .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect();
                let v2: Vec<f64> = (0..3)
                    .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect();
                let Some(plane) = orthonormal_plane(&jets.g, &v1, &v2) else {
                    continue;
                };
                sampled += 1;
                let k = curvature::sectional(&curv, &jets.g, &plane)?;
                max_k = max_k.max(k);
                let normal = curvature::unit_normal(&jets.g, &plane)?;
                let gnn = linalg::quadratic_form(&g_tensor, &normal, &normal);
                residual = residual.max((gnn + k).abs() / (1.0 + k.abs()));
            }
            Ok(PointSummary {
                max_k,
                min_eig,
                residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut max_sectional = f64::NEG_INFINITY;
    let mut min_einstein_eig = f64::INFINITY;
    let mut einstein_normal_residual_max = 0.0_f64;
    let mut per_point_eigs = Vec::with_capacity(results.len());
    for r in &results {
        max_sectional = max_sectional.max(r.max_k);
        min_einstein_eig = min_einstein_eig.min(r.min_eig);
        einstein_normal_residual_max = einstein_normal_residual_max.max(r.residual);
        per_point_eigs.push(r.min_eig);
    }
    Ok((
        SectionalSummary {
            max_sectional,
            min_einstein_eig,
            einstein_normal_residual_max,
            planes_per_point,
            seed,
        },
        per_point_eigs,
    ))
}

/// g-orthonormalize a raw pair into a plane basis; `None` when (numerically)
/// dependent, so the caller can resample.
fn orthonormal_plane(gval: &Mat, v1: &[f64], v2: &[f64]) -> Option<TangentPlane> {
    let gdot = |a: &[f64], b: &[f64]| linalg::quadratic_form(gval, a, b);
    let n1 = gdot(v1, v1).sqrt();
    if !(n1 > 0.0) {
        return None;
    }
    let e1: Vec<f64> = v1.iter().map(|v| v / n1).collect();
    let p = gdot(v2, &e1);
    let mut w: Vec<f64> = v2.to_vec();
    for i in 0..w.len() {
        w[i] -= p * e1[i];
    }
    let n2 = gdot(&w, &w).sqrt();
    // relative dependence threshold on the raw second vector
    if !(n2 > 1e-6 * gdot(v2, v2).sqrt().max(1e-300)) {
        return None;
    }
    let e2: Vec<f64> = w.iter().map(|v| v / n2).collect();
    Some(TangentPlane { v1: e1, v2: e2 })
}
