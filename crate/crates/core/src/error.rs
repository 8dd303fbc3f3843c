use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: corrupt or unreadable header: {reason}")]
    CorruptHeader { path: PathBuf, reason: String },

    #[error("band count mismatch: expected {expected}, found {found}")]
    BandMismatch { expected: usize, found: usize },

    #[error("unsupported band count {0} (expected 1, 3 or 10)")]
    UnsupportedBands(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn header(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::CorruptHeader {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
