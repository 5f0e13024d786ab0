use thiserror::Error;

/// Errors produced by graph construction, learners, and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game dimensions m = {m}, n = {n} (need m >= 1 and n >= 2)")]
    InvalidDimensions { m: usize, n: usize },

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("not a source-to-destination path: {0}")]
    InvalidPath(String),

    #[error("path count {count} exceeds the enumeration cap {cap}")]
    EnumerationCap { count: String, cap: u64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid edge weights: {0}")]
    InvalidWeights(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("co-occurrence matrix is numerically zero")]
    DegenerateMatrix,

    #[error("exploration distribution has no edge-factored form")]
    NotFactored,

    #[error("spectral check failed: {0}")]
    Spectral(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
