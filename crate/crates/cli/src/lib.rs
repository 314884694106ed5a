//! Config-driven experiment runner behind the `pinchlab` binary.
//!
//! A run reads one TOML file, executes a single command, writes CSV and JSON
//! artifacts into the output directory and reports a one-line summary.

// `!(x > 0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{build_model, run, BuiltModel, Outcome};
pub use config::{Command, ExperimentConfig, Overrides};
pub use error::CliError;

/// Runs `config` and writes its artifacts.
///
/// Artifacts are written even when validation fails, so a failing run can
/// still be inspected; the failure is then returned as an error.
pub fn execute(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let outcome = run(config)?;
    outcome.artifacts.write_to(&config.out)?;
    if !outcome.failures.is_empty() {
        return Err(CliError::Validation(format!("{}: {}", outcome.summary, outcome.failures.join("; "))));
    }
    Ok(outcome)
}
