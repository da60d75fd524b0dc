use thiserror::Error;

/// Failures reported by the number-theory and splitting layers.
///
/// Precision and depth failures are never papered over: the caller is
/// expected to re-request the input at a higher truncation order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("insufficient precision: enclosure endpoints disagree at partial quotient a_{index}")]
    EnclosureTooWide { index: usize },

    #[error("insufficient precision: sign of k1 + k2*omega is not resolved for k = ({k1}, {k2})")]
    UnresolvedDivisor { k1: String, k2: String },

    #[error("insufficient precision: nearest integer to {q}*omega is ambiguous")]
    AmbiguousNearestInteger { q: String },

    #[error("insufficient depth: need convergents up to n = {required}, only {available} certified")]
    InsufficientDepth { required: usize, available: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for every failure that a finer enclosure or a deeper expansion
    /// would cure.
    pub fn is_precision(&self) -> bool {
        !matches!(self, Error::InvalidInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
