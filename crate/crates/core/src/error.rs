use thiserror::Error;

use crate::bridge::BridgeError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("batch item {index}: expected length {expected}, got {found}")]
    BatchDimension {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("component {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("vector must have at least one component")]
    EmptyVector,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),

    #[error("evaluator target embedding has not been set")]
    TargetNotSet,

    #[error("cannot evaluate an empty batch")]
    EmptyBatch,

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Bridge(#[from] BridgeError),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
