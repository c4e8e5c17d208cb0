//! Harness error type with the exit-code contract: 0 success, 2 config
//! error, 3 i/o error, 4 numeric error.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io(_) => 3,
            HarnessError::Numeric(_) => 4,
        }
    }
}

impl From<splitq::Error> for HarnessError {
    fn from(e: splitq::Error) -> Self {
        use splitq::Error::*;
        match e {
            InvalidConfig(_) | InvalidGeometry(_) | EmptyInput(_) => {
                HarnessError::Config(e.to_string())
            }
            Io(_) | TrajectoryParse { .. } => HarnessError::Io(e.to_string()),
            NonFiniteReward(_) | NumericOverflow { .. } | SingularKernel | NoConvergence(_)
            | StateOutOfRange { .. } | ActionOutOfRange { .. } => {
                HarnessError::Numeric(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Config(e.to_string())
    }
}
