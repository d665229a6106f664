use thiserror::Error;

use crate::qstate::StateLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("state is not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("label {0:?} is not a BB84 send label")]
    NotBb84(StateLabel),
}

/// Rejected model or configuration parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{field} must be a probability in [0, 1], got {value}")]
    NotProbability { field: &'static str, value: f64 },
    #[error("{field} must be finite and non-negative, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("{field} must be finite and positive, got {value}")]
    NotPositive { field: &'static str, value: f64 },
    #[error("commitment bit must be 0 or 1, got {0}")]
    InvalidBit(u8),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("opening bit {opened} differs from committed bit {committed}")]
    BitMismatch { committed: u8, opened: u8 },
    #[error("pair splitting needs at least two photons, got {0}")]
    NotAPair(usize),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}
