use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("duplicate coordinate at index {index}")]
    Duplicate { index: usize },

    #[error("coordinate at index {index} is not strictly greater than its predecessor")]
    NotIncreasing { index: usize },

    #[error("need at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },

    #[error("gap at index {index} is not strictly positive")]
    NonPositiveGap { index: usize },

    #[error("length mismatch: {left} points but {right} ranges")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameters below frame threshold (k = {k})")]
    BelowFrameThreshold { k: i64 },

    #[error("window starting at {start} is not a {k}-frame")]
    NotAFrame { start: usize, k: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Errors caused by bad input rather than by the environment.
    pub fn is_usage(&self) -> bool {
        !matches!(
            self,
            Error::Io { .. } | Error::Json(_) | Error::Invariant(_)
        )
    }
}
