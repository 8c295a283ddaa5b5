use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("point set is empty")]
    EmptySet,

    #[error("line {line}: cannot parse {token:?} as a coordinate")]
    Parse { line: usize, token: String },

    #[error("line {line}: expected {expected} coordinates, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },

    #[error("line {line}: coordinate {value} lies outside [0, 1)")]
    OutOfRange { line: usize, value: f64 },

    #[error("exact enumeration too large: {cost} box evaluations (limit {limit})")]
    EnumerationTooLarge { cost: f64, limit: f64 },

    #[error("unknown benchmark function id {0}")]
    UnknownFunction(u32),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::NonFinite(_))
    }
}
