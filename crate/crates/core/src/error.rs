use thiserror::Error;

/// Errors raised by model construction, evaluation and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability vector is empty")]
    EmptyVector,
    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("all weights are zero")]
    ZeroMass,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("index ({row}, {col}) out of range for a {rows}x{cols} game")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "game utility is not an expected utility function (deviation {deviation:e} > tolerance {tolerance:e})"
    )]
    GameUtilityNotEU { deviation: f64, tolerance: f64 },
    #[error("fixture assertion failed: {0}")]
    FixtureAssertionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
