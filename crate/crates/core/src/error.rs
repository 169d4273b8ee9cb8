use thiserror::Error;

/// Errors raised by the hypervector algebra, planners and arm pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot compute similarity of a zero-norm vector")]
    ZeroNorm,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid codebook size {0}")]
    InvalidCodebookSize(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("node {0} has no legal actions")]
    Stuck(usize),
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid angle range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("enumeration of {0} joint states exceeds the guard")]
    EnumerationGuard(u128),
    #[error("codebook hash mismatch: expected {expected}, found {found}")]
    HashMismatch { expected: String, found: String },
    #[error("no accessible targets")]
    NoTargets,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
