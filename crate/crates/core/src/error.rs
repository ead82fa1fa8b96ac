use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line of an annotation file could not be decoded.
    #[error("line {line}: malformed record: {message}")]
    Parse { line: usize, message: String },

    /// A decoded record violates a data-model invariant.
    #[error("frame {frame_index}: {message}")]
    InvalidFrame { frame_index: u64, message: String },

    #[error("duplicate observation for track {track_id} at frame {frame_index}")]
    DuplicateObservation { track_id: u64, frame_index: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A metric needs both labels (or at least one positive) to be defined.
    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("rearrangement failed: {0}")]
    Rearrange(String),

    /// A continual split failed verification.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("scorer error: {0}")]
    Scorer(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

/// Coarse classification used to pick a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad or inconsistent input data.
    Data,
    /// Anything else: I/O failures, scorer misuse at runtime.
    Runtime,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } | Error::Scorer(_) => ErrorKind::Runtime,
            _ => ErrorKind::Data,
        }
    }
}
