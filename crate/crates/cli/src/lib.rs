//! Scenario runner for the `degjc` command.

pub mod config;
pub mod error;
pub mod scenarios;
pub mod table;
pub mod validate;

pub use config::{Args, InitialState, RawConfig, Scenario, ScenarioConfig};
pub use error::{CliError, Result};
pub use scenarios::{run, RunOutput};
pub use table::{Cell, Table};

use std::path::Path;

/// Resolves flags and the optional config file into a configuration.
pub fn resolve(args: &Args) -> Result<ScenarioConfig> {
    let file = match &args.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    let raw = file.overridden_by(RawConfig::from_args(args));
    ScenarioConfig::resolve(args.scenario, &raw)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Output {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}
