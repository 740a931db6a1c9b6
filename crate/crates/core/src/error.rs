use thiserror::Error;

/// Library error type. Check failures are not errors: suites report them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
