use thiserror::Error;

use crate::linalg::SolveError;

#[derive(Debug, Error)]
pub enum EngineError {
    /// An identity that must hold exactly did not; carries a counterexample.
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("measurement system {context}: {kind:?}")]
    Solve { context: String, kind: SolveError },
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, EngineError>;
