use thiserror::Error;

use crate::spectral::BasisTag;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid {n1}x{n2}: n1 must be even and >= 4, n2 must be >= 4")]
    InvalidGrid { n1: usize, n2: usize },

    #[error("shape mismatch: expected {expected} values, got {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("wrong basis: expected {expected:?}, got {found:?}")]
    WrongTag { expected: BasisTag, found: BasisTag },

    #[error("grid mismatch: {a} vs {b}")]
    GridMismatch { a: String, b: String },

    #[error("state has no vorticity field")]
    MissingVorticity,

    #[error("non-finite coefficients in {0}")]
    NonFinite(&'static str),

    #[error("empty series")]
    EmptySeries,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
