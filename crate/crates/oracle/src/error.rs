use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Core(#[from] ctsplit_core::Error),
    #[error("invalid oracle input: {0}")]
    InvalidInput(String),
    #[error("quadrature error {achieved:.3e} exceeds tolerance {requested:.3e}; retry with {suggestion}")]
    Unresolved {
        achieved: f64,
        requested: f64,
        suggestion: String,
    },
    #[error("enclosure of omega too wide for {0}")]
    Precision(String),
}

pub type OracleResult<T> = Result<T, OracleError>;
