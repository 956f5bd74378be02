use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading data or computing a metric.
///
/// Metric errors are deliberately fine-grained: the scoring harness records
/// the variant name as an error tag instead of substituting a number.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed file {path}: {reason}")]
    MalformedFile { path: PathBuf, reason: String },

    #[error("negative saliency value {value} at ({x}, {y})")]
    NegativeValue { x: usize, y: usize, value: f64 },

    #[error("non-finite saliency value at ({x}, {y})")]
    NonFiniteValue { x: usize, y: usize },

    #[error("invalid map geometry: {0}")]
    InvalidGeometry(String),

    #[error("fixation ({x}, {y}) lies outside a {width}x{height} image")]
    OutOfBounds {
        x: i64,
        y: i64,
        width: usize,
        height: usize,
    },

    #[error("fixation file {0} contains no points")]
    EmptyFile(PathBuf),

    #[error("no points to score")]
    EmptyPoints,

    #[error("saliency map is constant (zero standard deviation)")]
    DegenerateSaliency,

    #[error("ground-truth map is constant (zero standard deviation)")]
    DegenerateGroundTruth,

    #[error("every fixation was rejected as noise; no weighted fixations remain")]
    NoWeightedFixations,

    #[error("map has zero total mass")]
    ZeroMassMap,

    #[error("map dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("non-positive viewing geometry: {0}")]
    NonPositiveGeometry(f64),

    #[error("gaussian kernel sigma must be positive, got {0}")]
    DegenerateKernel(f64),

    #[error("need at least {needed} images, got {got}")]
    TooFewImages { needed: usize, got: usize },

    #[error("shuffled metrics need a dataset with at least two images")]
    SingleImageDataset,

    #[error("image {0} is not part of the dataset")]
    UnknownImage(String),

    #[error("duplicate image id {0} in dataset")]
    DuplicateImage(String),

    #[error("every pixel is fixated; no negatives available")]
    NoNegatives,

    #[error("cannot draw {requested} points without replacement from a pool of {available}")]
    SamplePoolTooSmall { requested: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("transportation solver failed: {0}")]
    SolverFailure(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short stable tag used when an error is recorded in a score table.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::MalformedFile { .. } => "MalformedFile",
            Error::NegativeValue { .. } => "NegativeValue",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::InvalidGeometry(_) => "InvalidGeometry",
            Error::OutOfBounds { .. } => "OutOfBounds",
            Error::EmptyFile(_) => "EmptyFile",
            Error::EmptyPoints => "EmptyPoints",
            Error::DegenerateSaliency => "DegenerateSaliency",
            Error::DegenerateGroundTruth => "DegenerateGroundTruth",
            Error::NoWeightedFixations => "NoWeightedFixations",
            Error::ZeroMassMap => "ZeroMassMap",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::NonPositiveGeometry(_) => "NonPositiveGeometry",
            Error::DegenerateKernel(_) => "DegenerateKernel",
            Error::TooFewImages { .. } => "TooFewImages",
            Error::SingleImageDataset => "SingleImageDataset",
            Error::UnknownImage(_) => "UnknownImage",
            Error::DuplicateImage(_) => "DuplicateImage",
            Error::NoNegatives => "NoNegatives",
            Error::SamplePoolTooSmall { .. } => "SamplePoolTooSmall",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::SolverFailure(_) => "SolverFailure",
            Error::Io { .. } => "IoError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::MalformedFile {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
