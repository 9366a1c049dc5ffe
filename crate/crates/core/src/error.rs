use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bit-string length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("qubit count {n} exceeds cap {cap}")]
    OverCap { n: usize, cap: usize },

    #[error("invalid qubit count {0}")]
    InvalidQubitCount(usize),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("epsilon {0} outside (0, 1]")]
    EpsilonOutOfRange(f64),

    #[error(
        "certification failed after {attempts} attempts: best beta_max {best_beta_max} exceeds threshold {threshold}"
    )]
    CertificationFailed {
        attempts: usize,
        best_beta_max: f64,
        threshold: f64,
    },

    #[error("empty key set")]
    EmptyKeySet,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid hop {hop}: valid hops are 1..={max}")]
    InvalidHop { hop: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed topology: {0}")]
    Topology(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
