//! Crate-wide error type and exit-code mapping for the CLI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("variable `x{index}` exceeds chart dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("domain error in `{subexpr}`: {message}")]
    EvalDomain { subexpr: String, message: String },

    #[error("invalid chart domain: {0}")]
    InvalidDomain(String),

    #[error("grid resolution must be at least 2, got {0}")]
    GridResolution(usize),

    #[error("unknown builtin metric `{0}`")]
    UnknownBuiltin(String),

    #[error("builtin metric `{name}`: {message}")]
    BuiltinParams { name: String, message: String },

    #[error("metric is not positive definite at {point:?} (min eigenvalue {min_eig:.3e})")]
    MetricNotSpd { point: Vec<f64>, min_eig: f64 },

    #[error("metric inversion failed: matrix is singular")]
    SingularMetric,

    #[error("curvature operations require dimension >= 3, got {0}")]
    DimensionTooSmall(usize),

    #[error("tangent plane is degenerate (Gram determinant {0:.3e})")]
    DegeneratePlane(f64),

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal {off:.3e})")]
    JacobiNonConvergence { sweeps: usize, off: f64 },

    #[error("eigenvalue input must be symmetric positive definite")]
    EigenNotSpd,

    #[error("cone membership is undefined for the zero vector")]
    ZeroVector,

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("no membership boundary found on (1,...,1,1-t) for t in [0, {0}]")]
    NoBoundaryFlip(f64),

    #[error("cone type classification disagrees between probe scales")]
    InconsistentConeType,

    #[error("tau = 1 is outside the valid parameter range for this operation")]
    TauIsOne,

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    // Verifier preconditions; each maps to CLI exit code 3.
    #[error("potential violates v >= 1 at {point:?} (v = {value})")]
    PotentialBelowOne { point: Vec<f64>, value: f64 },

    #[error("potential has a critical point near {point:?} (|grad v|_g = {grad_norm:.3e})")]
    CriticalPoint { point: Vec<f64>, grad_norm: f64 },

    #[error("overflow guard violated: {0}")]
    OverflowGuard(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code contract: 2 = manifest/input error, 3 = precondition
    /// violation or numerical refusal. Codes 0/1 are decided by the runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::UnknownIdentifier { .. }
            | Error::VariableOutOfRange { .. }
            | Error::InvalidDomain(_)
            | Error::GridResolution(_)
            | Error::UnknownBuiltin(_)
            | Error::BuiltinParams { .. }
            | Error::InvalidCone(_)
            | Error::Manifest(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
