use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps [`GiniError::Convergence`] to exit code 2 and everything else
/// to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GiniError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical non-convergence: {0}")]
    Convergence(String),

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("partition error: {0}")]
    Partition(String),

    #[error("monotonicity violation: {0}")]
    Monotonicity(String),

    #[error("arity mismatch: expected {expected} observations, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl GiniError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GiniError::Domain(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        GiniError::Convergence(msg.into())
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self, GiniError::Convergence(_))
    }
}

impl From<std::io::Error> for GiniError {
    fn from(e: std::io::Error) -> Self {
        GiniError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GiniError>;
