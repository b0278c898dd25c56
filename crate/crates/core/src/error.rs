use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: expected length {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value at (j={j}, k={k})")]
    NonFinite { j: usize, k: usize },

    #[error("pole row {row} is not constant: max deviation {deviation:e} exceeds {tolerance:e}")]
    PoleInconsistent {
        row: usize,
        deviation: f64,
        tolerance: f64,
    },

    #[error("unknown test function `{name}` (available: {available})")]
    UnknownFunction { name: String, available: String },

    #[error("malformed sample file (line {line}): {message}")]
    Format { line: usize, message: String },

    #[error("Gram matrix is not positive definite (alpha={alpha}, N={n})")]
    Indefinite { alpha: u32, n: usize },

    #[error("cubature value {value:e} exceeds the a-priori bound {bound:e}")]
    BoundExceeded { value: f64, bound: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for file-system failures as opposed to contract violations.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
