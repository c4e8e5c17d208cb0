//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("reward is not finite: {0}")]
    NonFiniteReward(f64),
    #[error("state {index} out of range (num_states = {limit})")]
    StateOutOfRange { index: usize, limit: usize },
    #[error("action {index} out of range (num_actions = {limit})")]
    ActionOutOfRange { index: usize, limit: usize },
    #[error("non-finite {stream} value after update at state {state}, action {action}")]
    NumericOverflow {
        stream: &'static str,
        state: usize,
        action: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid environment geometry: {0}")]
    InvalidGeometry(String),
    #[error("kernel matrix is numerically singular; increase noise_variance")]
    SingularKernel,
    #[error("value iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("trajectory parse error at line {line}: {msg}")]
    TrajectoryParse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
