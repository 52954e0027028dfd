//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(name = "vbcomp", version, about = "Variational Bayes fits and predictive model comparison")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the variational posterior of one model to a CSV dataset.
    Fit(Flags),
    /// Score candidate models on one dataset under each criterion.
    Compare(Flags),
    /// Run a Monte Carlo model-selection experiment.
    Simulate(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fit(_) => "fit",
            Command::Compare(_) => "compare",
            Command::Simulate(_) => "simulate",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Fit(f) | Command::Compare(f) | Command::Simulate(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Linear,
    Probit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    /// K = floor(ln n)
    Ln,
    /// K = floor(0.75 ln n)
    Ln34,
}

/// Flags shared by every command. Unset values fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML file with default settings and candidate lists.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// CSV dataset with a header row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Response column.
    #[arg(long)]
    pub response: Option<String>,
    /// Comma-separated feature columns; repeat once per candidate.
    #[arg(long)]
    pub features: Vec<String>,
    /// Do not prepend a column of ones.
    #[arg(long)]
    pub no_intercept: bool,
    /// Prior covariance scale for the coefficients.
    #[arg(long)]
    pub prior_scale: Option<f64>,
    /// Gamma shape of the precision prior.
    #[arg(long)]
    pub a: Option<f64>,
    /// Gamma rate of the precision prior.
    #[arg(long)]
    pub b: Option<f64>,
    /// Sample size per replication.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated criterion names.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<String>,
    /// Largest polynomial order rule.
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    /// Worker threads; defaults to VBCOMP_WORKERS, then to all cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}
