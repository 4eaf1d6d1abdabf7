//! Experiment runner behind the `tsablate` binary: configuration, dataset
//! preparation, result records and the four commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod record;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
