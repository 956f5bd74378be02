use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(transparent)]
    Core(#[from] wnss_core::Error),
    #[error(transparent)]
    Harness(#[from] wnss_harness::HarnessError),
    #[error("invalid study configuration: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt storage {path} line {line}: {reason}")]
    CorruptStorage { path: PathBuf, line: usize, reason: String },
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("unknown pair {0}")]
    UnknownPair(String),
    #[error("rating {0} outside 1..=5")]
    RatingOutOfRange(i64),
    #[error("pair {0} already rated in this session")]
    AlreadyRated(String),
    #[error("expected pair {expected:?}, got {got}")]
    OutOfOrder { expected: Option<String>, got: String },
    #[error("cannot change phase: {0}")]
    PhaseConflict(String),
}

impl StudyError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T, E = StudyError> = std::result::Result<T, E>;
