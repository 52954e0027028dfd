use alloc::string::String;
use alloc::vec::Vec;

/// Failures raised by model fitting, variational inference and criterion
/// evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid dataset: {0}")]
    InvalidData(String),
    #[error("probit response must be 0 or 1, found {value} at row {row}")]
    NonBinaryResponse { row: usize, value: f64 },
    #[error("error precision must be positive, found {0}")]
    NonPositivePrecision(f64),
    #[error("observation index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("{context} did not converge within {iterations} iterations")]
    NoConvergence {
        context: &'static str,
        iterations: usize,
        last: Vec<f64>,
    },
    #[error("{0} is singular or numerically singular")]
    Singular(&'static str),
    #[error("{0} is not positive definite")]
    NotPositiveDefinite(&'static str),
    #[error("log-determinant argument is not positive definite (smallest eigenvalue {0})")]
    NegativeLogDetArgument(f64),
    #[error("at least {required} posterior draws are required, got {found}")]
    TooFewDraws { required: usize, found: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("experiment aborted: {failed} of {reps} replications failed")]
    TooManyFailures { failed: usize, reps: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
