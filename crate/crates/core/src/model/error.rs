use thiserror::Error;

/// Errors raised while building or combining domain values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("channel gain at ({user}, {subcarrier}) is not a finite nonnegative number")]
    InvalidGain { user: usize, subcarrier: usize },

    #[error("power at ({user}, {subcarrier}) is not a finite nonnegative number")]
    InvalidPower { user: usize, subcarrier: usize },

    #[error("noise power must be positive")]
    NonPositiveNoise,

    #[error("minimum rate for user {user} is negative")]
    NegativeRateFloor { user: usize },
}
