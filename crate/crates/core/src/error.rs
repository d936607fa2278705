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

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("channel `{channel}`: row count mismatch (expected {expected} rows, found {found})")]
    RowCountMismatch {
        channel: String,
        expected: usize,
        found: usize,
    },

    #[error("channel `{channel}`, row {row}: expected {expected} values, found {found}")]
    RowWidthMismatch {
        channel: String,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("channel `{channel}`, row {row}: non-finite value")]
    NonFinite { channel: String, row: usize },

    #[error("channel `{channel}`, row {row}: histogram has a negative bin")]
    NegativeHistogram { channel: String, row: usize },

    #[error("channel `{channel}`, row {row}: histogram not normalized (sum {sum})")]
    HistogramNotNormalized { channel: String, row: usize, sum: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("channel `{0}` is a precomputed distance channel and cannot be used in a pairwise kernel")]
    NotAVectorChannel(String),

    #[error("probe `{probe}` has no data for channel `{channel}`")]
    MissingChannel { probe: String, channel: String },

    #[error("unknown probe `{0}`")]
    UnknownProbe(String),

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate image id `{0}`")]
    DuplicateImage(String),

    #[error("empty gallery")]
    EmptyGallery,

    #[error("feature dimension {dim} exceeds the lattice limit of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("lattice would need more than {max} vertices")]
    LatticeTooLarge { max: usize },

    #[error("{nodes} nodes is too many for joint enumeration (limit {max})")]
    TooManyNodes { nodes: usize, max: usize },

    #[error("no positive pairs available")]
    NoPositivePairs,

    #[error("infeasible split: {0}")]
    InfeasibleSplit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
