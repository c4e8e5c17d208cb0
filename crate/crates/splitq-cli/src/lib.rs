//! Experiment harness for the splitq library: configuration, batch run
//! execution, persistence, and the command implementations behind the CLI.

pub mod commands;
pub mod config;
pub mod error;
pub mod metrics;
pub mod runs;
pub mod svg;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
