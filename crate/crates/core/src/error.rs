use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix that must be inverted is singular beyond the pseudoinverse
    /// tolerance.
    #[error("numerical degeneracy on modes {modes:?}: {detail}")]
    NumericalDegeneracy { modes: Vec<usize>, detail: String },

    /// The truncated Fock representation lost too much probability mass.
    #[error("truncation budget exceeded: norm defect {defect:.3e} > {budget:.1e} (try cutoff >= {suggested_cutoff})")]
    Truncation {
        defect: f64,
        budget: f64,
        suggested_cutoff: usize,
    },

    #[error("enumeration budget exceeded: {words} words > {budget} (largest admissible N is {suggested_n})")]
    BudgetExceeded {
        words: f64,
        budget: f64,
        suggested_n: usize,
    },

    #[error("post-selection probability {0:.3e} is numerically unresolvable")]
    Unresolvable(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
