use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operands or tables built for different `(p, s)` or window parameters.
    #[error("parameter mismatch: {0}")]
    Parameter(String),

    /// Bad field configuration (non-prime modulus, reducible polynomial, ...).
    #[error("invalid field configuration: {0}")]
    Configuration(String),

    #[error("index {index} out of range 0..{bound}")]
    Range { index: usize, bound: usize },

    /// An element or coset does not fit inside the window of a table.
    #[error("window error: {0}")]
    Window(String),

    #[error("mask is not normalized: m(0,...,0) = {re} + {im}i, expected 1")]
    Normalization { re: f64, im: f64 },

    #[error("invalid scaling mask at prefix [{prefix}]: every value of the row is zero")]
    InvalidMask { prefix: String },

    #[error("completion matrix at prefix [{prefix}] has linearly dependent rows (row {row})")]
    DependentRows { prefix: String, row: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("size limit exceeded: {size} > {cap}")]
    Size { size: usize, cap: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
