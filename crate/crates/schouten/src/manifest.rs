//! Manifest-driven batch runs: a JSON run description in, a machine-readable
//! JSON report (or CSV curvature table) out.
//!
//! Reports are byte-deterministic for a fixed manifest and seed: field order
//! is fixed, floats serialize shortest-exact, and wall time is kept out of
//! the report body (the CLI prints it to the diagnostic stream instead).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chart::{self, BuiltinParams, ChartDomain, MetricField, SampleGrid, ScalarField};
use crate::cones::Cone;
use crate::conformal;
use crate::construct::{self, Probe, SearchOutcome, VerificationReport, VerifySetup};
use crate::curvature;
use crate::eigen;
use crate::error::{Error, Result};
use crate::linalg;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Builtin {
        builtin: String,
        #[serde(flatten)]
        params: BuiltinParams,
    },
    /// Full square matrix of expression strings over x1..xn on the unit box;
    /// entry (i, j) must equal entry (j, i) verbatim.
    Explicit { expressions: Vec<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    /// Coefficients [c0, c1, ..., cn] for c0 + c1 x1 + ... + cn xn.
    Linear { linear: Vec<f64> },
    Expression { expression: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub kind: String,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "verify-at-N")]
    VerifyAtN,
    #[serde(rename = "search")]
    Search,
    #[serde(rename = "sectional-dim3")]
    SectionalDim3,
    #[serde(rename = "curvature-dump")]
    CurvatureDump,
}

fn default_n_max() -> u32 {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    #[serde(rename = "N_max", default = "default_n_max")]
    pub n_max: u32,
    #[serde(default)]
    pub enforce_v_shift: bool,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            n_max: default_n_max(),
            enforce_v_shift: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Cross-check the expanded transformation operator against the generic
    /// chain-rule assembly at every grid point (tau != 1 only).
    #[serde(default)]
    pub v_identity_check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub dimension: usize,
    pub metric: MetricSpec,
    pub potential: PotentialSpec,
    pub tau: f64,
    pub alpha: i8,
    pub cone: ConeSpec,
    pub grid: usize,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSpec>,
    /// Fixed N for `verify-at-N` (and optionally `sectional-dim3`).
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planes_per_point: Option<usize>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub n_star: Option<u32>,
    pub probes: Vec<Probe>,
    pub non_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    pub manifest: Manifest,
    pub seed: u64,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_identity_max_residual: Option<f64>,
    /// Populated by callers that want timing; kept out of report files so
    /// byte-identical determinism holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    Ok(manifest)
}

pub fn validate(m: &Manifest) -> Result<()> {
    if m.schema != SCHEMA_VERSION {
        return Err(Error::Manifest(format!(
            "unsupported schema {}, expected {SCHEMA_VERSION}",
            m.schema
        )));
    }
    let n = m.dimension;
    if !(3..=9).contains(&n) {
        return Err(Error::Manifest(format!(
            "dimension must be between 3 and 9, got {n}"
        )));
    }
    if m.alpha != 1 && m.alpha != -1 {
        return Err(Error::Manifest(format!(
            "alpha must be +1 or -1, got {}",
            m.alpha
        )));
    }
    if m.cone.kind != "gamma_k" {
        return Err(Error::Manifest(format!(
            "unknown cone kind `{}`",
            m.cone.kind
        )));
    }
    if m.cone.k == 0 || m.cone.k > n {
        return Err(Error::Manifest(format!(
            "cone needs 1 <= k <= dimension, got k = {}",
            m.cone.k
        )));
    }
    if m.grid < 2 {
        return Err(Error::Manifest(format!(
            "grid resolution must be at least 2, got {}",
            m.grid
        )));
    }
    if let MetricSpec::Explicit { expressions } = &m.metric {
        if expressions.len() != n || expressions.iter().any(|row| row.len() != n) {
            return Err(Error::Manifest(format!(
                "explicit metric must be a {n} x {n} matrix of expressions"
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if expressions[i][j] != expressions[j][i] {
                    return Err(Error::Manifest(format!(
                        "explicit metric entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
    }
    if let PotentialSpec::Linear { linear } = &m.potential {
        if linear.len() != n + 1 {
            return Err(Error::Manifest(format!(
                "linear potential needs {} coefficients (intercept plus one per axis), got {}",
                n + 1,
                linear.len()
            )));
        }
    }
    if m.mode == Mode::VerifyAtN && m.n.is_none() {
        return Err(Error::Manifest(
            "mode verify-at-N requires field `N`".into(),
        ));
    }
    if m.mode == Mode::SectionalDim3 && n != 3 {
        return Err(Error::Manifest(
            "mode sectional-dim3 requires dimension 3".into(),
        ));
    }
    if m.tau == 1.0 && m.diagnostics.as_ref().is_some_and(|d| d.v_identity_check) {
        return Err(Error::Manifest(
            "the v_identity_check diagnostic is undefined at tau = 1".into(),
        ));
    }
    Ok(())
}

struct Instantiated {
    metric: MetricField,
    potential: ScalarField,
    grid: SampleGrid,
    setup: VerifySetup,
}

fn instantiate(m: &Manifest) -> Result<Instantiated> {
    let n = m.dimension;
    let (domain, metric) = match &m.metric {
        MetricSpec::Builtin { builtin, params } => chart::builtin_metric(builtin, n, params)?,
        MetricSpec::Explicit { expressions } => {
            let mut lower = Vec::with_capacity(n * (n + 1) / 2);
            for i in 0..n {
                for j in 0..=i {
                    lower.push(ScalarField::parse(&expressions[i][j], n)?);
                }
            }
            (
                ChartDomain::unit_box(n)?,
                MetricField::from_lower_triangle(n, lower)?,
            )
        }
    };
    let grid = chart::make_grid(&domain, m.grid)?;
    let mut potential = match &m.potential {
        PotentialSpec::Linear { linear } => ScalarField::linear(linear.clone()),
        PotentialSpec::Expression { expression } => ScalarField::parse(expression, n)?,
    };
    if m.search.as_ref().is_some_and(|s| s.enforce_v_shift) {
        potential = construct::shift_to_min_one(&potential, &grid)?;
    }
    let setup = VerifySetup {
        tau: m.tau,
        alpha: m.alpha as f64,
        cone: Cone::gamma_k(n, m.cone.k)?,
    };
    Ok(Instantiated {
        metric,
        potential,
        grid,
        setup,
    })
}

/// Largest deviation between the expanded transformation operator and its
/// generic chain-rule assembly over the grid, relative to the tensor scale.
fn v_identity_residual(inst: &Instantiated, big_n: f64) -> Result<f64> {
    let tau = inst.setup.tau;
    let n = inst.metric.dim();
    let rho = (n as f64 - 2.0) / (tau - 1.0);
    let mut worst = 0.0_f64;
    for x in inst.grid.points() {
        let jets = inst.metric.jets(x)?;
        let curv = curvature::riemann(&jets)?;
        let a_tau = curvature::modified_schouten(&curv.ric, curv.scal, &jets.g, tau, 1.0)?;
        let v_jet = inst.potential.jet(x)?;
        let v_cov = curvature::covariant_hessian(&v_jet, &curv.gamma, &jets.g)?;
        let a_scaled = linalg::scale(&a_tau, rho);
        let closed = construct::v_of_exp_potential(
            &v_cov,
            v_jet.val(),
            big_n,
            &a_scaled,
            &jets.g,
            tau,
        )?;
        let pot = construct::Potential::new(inst.potential.clone(), big_n);
        let u_cov = pot.covariant_from_v(&v_cov, v_jet.val());
        let generic = conformal::v_operator(&u_cov, &a_scaled, &jets.g, tau)?;
        let scale = 1.0 + linalg::sup_norm(&closed);
        worst = worst.max(linalg::sup_norm(&linalg::sub(&closed, &generic)) / scale);
    }
    Ok(worst)
}

pub struct RunOutput {
    pub report: Report,
    pub verified: bool,
}

/// Execute a validated manifest.
pub fn run(m: &Manifest) -> Result<RunOutput> {
    validate(m)?;
    let inst = instantiate(m)?;

    let verification: Option<VerificationReport>;
    let mut search: Option<SearchReport> = None;
    let verified;
    let mut v_identity_max_residual = None;

    match m.mode {
        Mode::VerifyAtN => {
            let big_n = m.n.expect("validated");
            let report = construct::verify_at_n(
                &inst.metric,
                &inst.potential,
                big_n,
                &inst.setup,
                &inst.grid,
            )?;
            verified = report.verified;
            if m.diagnostics.as_ref().is_some_and(|d| d.v_identity_check) {
                v_identity_max_residual = Some(v_identity_residual(&inst, big_n)?);
            }
            verification = Some(report);
        }
        Mode::Search => {
            let n_max = m.search.clone().unwrap_or_default().n_max;
            let outcome = search_with_diag(m, &inst, n_max, &mut v_identity_max_residual)?;
            verified = outcome.n_star.is_some() && outcome.report.verified;
            search = Some(SearchReport {
                n_star: outcome.n_star,
                probes: outcome.probes,
                non_monotone: outcome.non_monotone,
            });
            verification = Some(outcome.report);
        }
        Mode::SectionalDim3 => {
            // find N (or take the fixed one), then certify the conformal
            // metric's sectional curvature through the Einstein tensor
            let (big_n, mut report, search_part) = match m.n {
                Some(fixed) => {
                    let report = construct::verify_at_n(
                        &inst.metric,
                        &inst.potential,
                        fixed,
                        &inst.setup,
                        &inst.grid,
                    )?;
                    (fixed, report, None)
                }
                None => {
                    let n_max = m.search.clone().unwrap_or_default().n_max;
                    let outcome = construct::search_min_n(
                        &inst.metric,
                        &inst.potential,
                        &inst.setup,
                        &inst.grid,
                        n_max,
                    )?;
                    let part = SearchReport {
                        n_star: outcome.n_star,
                        probes: outcome.probes,
                        non_monotone: outcome.non_monotone,
                    };
                    match outcome.n_star {
                        Some(n_star) => (n_star as f64, outcome.report, Some(part)),
                        None => {
                            search = Some(part);
                            verification = Some(outcome.report);
                            let report = Report {
                                schema: SCHEMA_VERSION,
                                tool_version: env!("CARGO_PKG_VERSION").into(),
                                manifest: m.clone(),
                                seed: m.seed,
                                verified: false,
                                verification,
                                search,
                                v_identity_max_residual,
                                wall_time_ms: None,
                            };
                            return Ok(RunOutput {
                                report,
                                verified: false,
                            });
                        }
                    }
                }
            };
            let u = inst.potential.exp_scaled(big_n);
            let planes = m.planes_per_point.unwrap_or(100);
            let (summary, _) = construct::verify_negative_sectional_dim3(
                &inst.metric,
                &u,
                &inst.grid,
                planes,
                m.seed,
            )?;
            verified = report.verified
                && summary.max_sectional < 0.0
                && summary.min_einstein_eig > 0.0;
            report.dim3 = Some(summary);
            search = search_part;
            verification = Some(report);
        }
        Mode::CurvatureDump => {
            return Err(Error::Manifest(
                "mode curvature-dump is served by the `dump` subcommand".into(),
            ));
        }
    }

    let report = Report {
        schema: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        manifest: m.clone(),
        seed: m.seed,
        verified,
        verification,
        search,
        v_identity_max_residual,
        wall_time_ms: None,
    };
    Ok(RunOutput { report, verified })
}

fn search_with_diag(
    m: &Manifest,
    inst: &Instantiated,
    n_max: u32,
    v_identity: &mut Option<f64>,
) -> Result<SearchOutcome> {
    let outcome = construct::search_min_n(
        &inst.metric,
        &inst.potential,
        &inst.setup,
        &inst.grid,
        n_max,
    )?;
    if m.diagnostics.as_ref().is_some_and(|d| d.v_identity_check) {
        if let Some(n_star) = outcome.n_star {
            *v_identity = Some(v_identity_residual(inst, n_star as f64)?);
        }
    }
    Ok(outcome)
}

/// Serialize a report to pretty JSON with a trailing newline.
pub fn report_to_json(report: &Report) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn report_from_json(text: &str) -> Result<Report> {
    Ok(serde_json::from_str(text)?)
}

/// Per-point curvature table of the background metric, as CSV.
///
/// Columns (for dimension n): `index`, `x1..xn`, Christoffel components
/// `gamma_k_ij` (upper triangle in ij), Ricci `ric_ij` (upper triangle),
/// `scal`, the tau-family tensor `a_ij` (upper triangle, alpha applied),
/// eigenvalues `lambda_1..lambda_n` of the tensor relative to g, and the
/// cone `margin`. Rows are in point-index order.
pub fn curvature_dump(m: &Manifest, out: &mut dyn Write) -> Result<()> {
    validate(m)?;
    let inst = instantiate(m)?;
    let n = m.dimension;

    let mut header: Vec<String> = vec!["index".into()];
    for i in 1..=n {
        header.push(format!("x{i}"));
    }
    for k in 1..=n {
        for i in 1..=n {
            for j in i..=n {
                header.push(format!("gamma_{k}_{i}{j}"));
            }
        }
    }
    for i in 1..=n {
        for j in i..=n {
            header.push(format!("ric_{i}{j}"));
        }
    }
    header.push("scal".into());
    for i in 1..=n {
        for j in i..=n {
            header.push(format!("a_{i}{j}"));
        }
    }
    for i in 1..=n {
        header.push(format!("lambda_{i}"));
    }
    header.push("margin".into());
    writeln!(out, "{}", header.join(","))?;

    for (idx, x) in inst.grid.points().iter().enumerate() {
        let jets = inst.metric.jets(x)?;
        let curv = curvature::riemann(&jets)?;
        let a = curvature::modified_schouten(
            &curv.ric,
            curv.scal,
            &jets.g,
            inst.setup.tau,
            inst.setup.alpha,
        )?;
        let eigs = eigen::generalized_eigs(&a, &jets.g)?;
        let margin = if eigs.as_slice().iter().all(|&l| l == 0.0) {
            0.0
        } else {
            inst.setup.cone.contains(eigs.as_slice())?.margin
        };

        let mut row: Vec<String> = vec![idx.to_string()];
        for xi in x {
            row.push(format!("{xi}"));
        }
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    row.push(format!("{}", curv.gamma[k][i][j]));
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                row.push(format!("{}", curv.ric[i][j]));
            }
        }
        row.push(format!("{}", curv.scal));
        for i in 0..n {
            for j in i..n {
                row.push(format!("{}", a[i][j]));
            }
        }
        for lam in eigs.as_slice() {
            row.push(format!("{lam}"));
        }
        row.push(format!("{margin}"));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
