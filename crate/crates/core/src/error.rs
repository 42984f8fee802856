use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("impossible outcome: post-selection probability {probability:e} is below {threshold:e}")]
    ImpossibleOutcome { probability: f64, threshold: f64 },
    #[error("numerical consistency error: {0}")]
    NumericalConsistency(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("eigensolver failed: {0}")]
    NonConvergence(String),
    #[error("degenerate energy: |E0'| = {0:e} leaves theta undefined")]
    DegenerateEnergy(f64),
    #[error("unusable correction: 2*p0 - 1 = {0:e} is too close to zero")]
    UnusableCorrection(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
