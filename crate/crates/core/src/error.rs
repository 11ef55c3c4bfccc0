use thiserror::Error;

/// Errors raised by problem construction, proximal operators and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated its documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An operator was evaluated outside of its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested operation needs something the problem or operator does not provide.
    #[error("unsupported: {0}")]
    Capability(String),

    /// An iterate or operator value became non-finite.
    #[error("numerical failure at iteration {iteration}: {message}")]
    Numerical { iteration: usize, message: String },

    /// Backtracking did not find an admissible stepsize.
    #[error("linesearch failed after {trials} trials")]
    Linesearch { trials: usize },

    /// Solver state is inconsistent (for example a nonpositive stepsize).
    #[error("corrupted solver state: {0}")]
    StateCorruption(String),

    /// Malformed input text.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input data violates a modelling assumption.
    #[error("invalid data: {0}")]
    Data(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
