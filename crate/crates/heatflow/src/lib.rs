//! Scenario runner for the `heatflow-core` collision-model simulator: config
//! files, CSV output and the `heatflow` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod simulate;

pub use config::{Engine, Scenario, ScenarioConfig};
pub use error::CliError;
