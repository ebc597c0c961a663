use thiserror::Error;

/// Errors raised by constructors and numerical operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// `p_i > 0` while `q_i = 0`; the divergence is infinite.
    #[error("absolute continuity violated at index {index}: divergence is infinite")]
    AbsoluteContinuityViolation { index: usize },

    #[error("empty distribution or channel")]
    Empty,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("weights sum to {sum}, which is not within 1e-9 of 1")]
    NotNormalized { sum: f64 },

    #[error("row {row} is not stochastic: sum deviates from 1 by {deviation:e}")]
    RowNotStochastic { row: usize, deviation: f64 },

    #[error("input distribution is not interior: entry {index} is zero")]
    NonInteriorInput { index: usize },

    #[error("parameter {name} = {value} is out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("brute-force enumeration supports at most {max} inputs, channel has {inputs}")]
    TooManyInputs { inputs: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
