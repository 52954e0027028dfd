use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const PARTIAL: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("column `{0}` not found")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NotNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("{0} contains no data rows")]
    EmptyFile(PathBuf),
    #[error("invalid config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Numerical(#[from] vbcomp_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(e) if !is_input_error(e) => exit::NUMERICAL,
            _ => exit::USAGE,
        }
    }
}

/// Core errors that describe bad input rather than a failed computation.
fn is_input_error(e: &vbcomp_core::Error) -> bool {
    use vbcomp_core::Error::*;
    matches!(
        e,
        InvalidData(_) | NonBinaryResponse { .. } | InvalidConfig(_) | EmptyInput(_) | IndexOutOfRange { .. }
    )
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
