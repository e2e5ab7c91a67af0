use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Invalid user input: bad modulus, empty point set, mismatched ranks.
    #[error("configuration error: {0}")]
    Config(String),

    /// A constructed object violates its own invariants (e.g. a product of
    /// sections falls outside the next graded piece).
    #[error("integrity error: {0}")]
    Integrity(String),

    /// The resolution oracle was asked for data beyond its degree bound.
    #[error("truncated: {0}")]
    Truncated(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("size cap exceeded: {what} needs {size} > cap {cap}")]
    CapExceeded { what: String, size: usize, cap: usize },
}
