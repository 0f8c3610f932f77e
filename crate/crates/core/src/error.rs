use thiserror::Error;

/// Errors raised by the witness library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {0} is not a prime >= 2")]
    NotPrime(u32),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNorm(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("search space of {size:.3e} configurations exceeds the capacity {capacity:.0e}")]
    Capacity { size: f64, capacity: f64 },

    #[error("displacement generator (0, 0) is trivial")]
    TrivialGenerator,

    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),

    #[error("inconsistent bound ordering: {0}")]
    BoundOrdering(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
