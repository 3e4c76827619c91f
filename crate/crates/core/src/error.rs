use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point is not on the unit sphere (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("rejection sampler hit the cap of {cap} proposals ({accepted} of {requested} samples accepted)")]
    IterationCap { cap: u64, accepted: usize, requested: usize },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("degenerate value: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
