//! Command-line front end: CSV ingestion, configuration, parallel runs and
//! text/CSV/JSON reports.

pub mod cli;
pub mod commands;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod report;
pub mod runner;

use std::io::Write;

use crate::cli::Command;
use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub use crate::commands::Outcome;

/// Runs a parsed command and writes its report to `--out` or stdout.
pub fn run(command: &Command) -> Result<u8> {
    let cfg = RunConfig::from_flags(command.flags())?;
    let outcome = match command {
        Command::Fit(_) => commands::cmd_fit(&cfg)?,
        Command::Compare(_) => commands::cmd_compare(&cfg)?,
        Command::Simulate(_) => commands::cmd_simulate(&cfg)?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.output).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.output.as_bytes());
            let _ = stdout.flush();
        }
    }
    Ok(outcome.exit)
}
