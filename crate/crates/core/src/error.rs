use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point outside domain: {0}")]
    OutsideDomain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid too coarse: {got} nodes, need at least {min}")]
    GridTooCoarse { got: usize, min: usize },

    #[error("invalid metric profile: {0}")]
    InvalidProfile(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
