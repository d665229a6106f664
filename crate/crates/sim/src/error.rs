use thiserror::Error;

use qbc_core::{ConfigError, ProtocolError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Protocol(ProtocolError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<ProtocolError> for SimError {
    fn from(err: ProtocolError) -> Self {
        match err {
            ProtocolError::Config(c) => SimError::Config(c),
            other => SimError::Protocol(other),
        }
    }
}

impl SimError {
    /// Process exit code: 1 for configuration problems, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::BadConfig(_) | SimError::Precondition(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
