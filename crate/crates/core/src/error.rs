use thiserror::Error;

/// Errors raised by the directed-information toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("invalid joint pmf: {0}")]
    InvalidJoint(String),

    #[error("state space of {states} exceeds enumeration cap {cap}")]
    EnumerationCap { states: u128, cap: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("particle weights degenerate at step {step}: {detail}")]
    WeightUnderflow { step: usize, detail: String },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("empty sample set")]
    EmptySamples,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
