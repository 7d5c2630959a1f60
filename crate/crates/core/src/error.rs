use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by series construction, decomposition, detection and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,

    #[error("value at index {0} is not finite")]
    NonFiniteValue(usize),

    #[error("window of {window} samples does not fit a series of length {len}")]
    WindowTooLarge { window: usize, len: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no sample qualifies: every output sample is undefined")]
    AllUndefined,

    #[error("need at least 2 defined samples, found {0}")]
    InsufficientData(usize),

    #[error("defined values have zero dispersion")]
    ZeroDispersion,

    #[error("series has no defined region")]
    NoDefinedRegion,

    #[error("parse error at row {row}, column {column}: {reason}")]
    Parse {
        row: usize,
        column: usize,
        reason: String,
    },

    #[error("missing value at row {0}")]
    MissingValue(usize),

    #[error("file contains no data rows")]
    EmptyFile,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
