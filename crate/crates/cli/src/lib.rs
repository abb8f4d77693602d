//! Library side of the `ejs-sim` command: configuration, experiment
//! orchestration and artifact writing.

pub mod config;
pub mod error;
pub mod experiment;

pub use config::{Axis, Cli, ExperimentConfig};
pub use error::CliError;
pub use experiment::{run_experiment, sweep_experiment, ExperimentOutcome};

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<ExperimentOutcome, CliError> {
    let cfg = ExperimentConfig::from_cli(cli)?;
    let outcome = match cli.sweep {
        Some(axis) => sweep_experiment(&cfg, axis)?.0,
        None => run_experiment(&cfg)?,
    };
    Ok(outcome)
}
