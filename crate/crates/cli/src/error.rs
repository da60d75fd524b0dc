use thiserror::Error;

use ctsplit_oracle::OracleError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] ctsplit_core::Error),
    #[error("{0}")]
    Oracle(#[from] OracleError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

pub type CliResult<T> = Result<T, CliError>;

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl CliError {
    /// 1 verification failure, 2 usage or configuration, 3 precision or depth.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(e) | CliError::Oracle(OracleError::Core(e)) => {
                if e.is_precision() {
                    3
                } else {
                    2
                }
            }
            CliError::Oracle(OracleError::InvalidInput(_)) => 2,
            CliError::Oracle(_) => 3,
        }
    }

    /// What to try next, for precision and depth failures.
    pub fn hint(&self) -> Option<&'static str> {
        use ctsplit_core::Error as E;
        let e = match self {
            CliError::Core(e) | CliError::Oracle(OracleError::Core(e)) => e,
            CliError::Oracle(OracleError::Precision(_)) => {
                return Some("supply a tighter enclosure of omega (for shallit, a larger --K)")
            }
            _ => return None,
        };
        match e {
            E::EnclosureTooWide { .. } | E::UnresolvedDivisor { .. } | E::AmbiguousNearestInteger { .. } => {
                Some("supply a tighter enclosure of omega (for shallit a larger --K, for a quotient list more quotients than --depth) or reduce --depth")
            }
            E::InsufficientDepth { .. } => Some("increase --depth, or raise --eps-min above the deepest convergent minimum"),
            E::InvalidInput(_) => None,
        }
    }
}
