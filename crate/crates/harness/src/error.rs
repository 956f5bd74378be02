use std::path::PathBuf;

use thiserror::Error;

use crate::metric::MetricId;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] wnss_core::Error),

    #[error("missing saliency maps:\n{}", .0.iter().map(|(m, i)| format!("  {m}/{i}")).collect::<Vec<_>>().join("\n"))]
    MissingMap(Vec<(String, String)>),

    #[error("map for model {model} on image {image} is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    DimensionMismatch {
        model: String,
        image: String,
        got_w: usize,
        got_h: usize,
        want_w: usize,
        want_h: usize,
    },

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("duplicate score row ({0}, {1}, {2})")]
    DuplicateRow(String, String, MetricId),

    #[error("duplicate MOS row ({0}, {1})")]
    DuplicateMos(String, String),

    #[error("ground-truth self-score for {metric} on image {image} is zero")]
    ZeroGtSelfScore { image: String, metric: MetricId },

    #[error("no ground-truth self-score for {metric} on image {image}")]
    MissingGtSelfScore { image: String, metric: MetricId },

    #[error("{metric}: only {n} usable pairs, need at least 3")]
    TooFewPairs { metric: MetricId, n: usize },

    #[error("{metric}: all scores or all MOS values are tied")]
    DegenerateRanks { metric: MetricId },

    #[error("invalid MOS row ({model}, {image}): {reason}")]
    InvalidMos {
        model: String,
        image: String,
        reason: String,
    },

    #[error("malformed table {path}: {reason}")]
    MalformedTable { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn table(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        HarnessError::MalformedTable {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
