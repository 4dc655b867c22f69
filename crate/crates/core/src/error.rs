use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid channel gains: {0}")]
    InvalidGains(String),
    #[error("LFSR order {0} is outside the supported range 2..=24")]
    UnsupportedOrder(u32),
    #[error("invalid LFSR seed: {0}")]
    InvalidSeed(String),
    #[error("matrix size {rows}x{cols} is invalid: {reason}")]
    InvalidShape {
        rows: usize,
        cols: usize,
        reason: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),
    #[error("invalid recovery parameter: {0}")]
    InvalidRecoveryParameter(&'static str),
    #[error("exhaustive search over C({n}, {k}) supports exceeds the enumeration guard")]
    EnumerationTooLarge { n: usize, k: usize },
    #[error("no support of size <= {k_max} reaches the residual tolerance")]
    NoFeasibleSupport { k_max: usize },
    #[error("matrix is not min-max normalized (max entry {0})")]
    NotNormalized(f64),
    #[error("every measurement row is a tag position; no data positions remain")]
    NoDataPositions,
    #[error("invalid channel configuration: {0}")]
    InvalidChannel(String),
    #[error("invalid quantizer: {0}")]
    InvalidQuantizer(String),
    #[error("bit stream length {0} is not a multiple of 8")]
    RaggedBits(usize),
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
