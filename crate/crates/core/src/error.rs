use thiserror::Error;

/// Diagnostics carried out of a collision integration that did not terminate.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDiagnostics {
    pub steps: usize,
    pub time: f64,
    pub min_separation: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("norm spaces differ: {0}")]
    SpecMismatch(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("norming functional is not unique for p = {0}; use semi-inner products")]
    NonUniqueFunctional(f64),

    #[error("capacity exceeded: {size} points do not fit in X({capacity})")]
    Capacity { size: usize, capacity: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("collision flow did not terminate after {} steps (t = {}, min separation = {})", .0.steps, .0.time, .0.min_separation)]
    NonConvergence(FlowDiagnostics),

    #[error("unknown map `{0}`")]
    UnknownMap(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
