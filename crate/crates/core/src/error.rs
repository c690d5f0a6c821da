use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// A matrix that must be invertible is (numerically) singular.
    SingularMatrix(String),
    /// An iteration hit its cap before meeting its tolerance.
    NonConvergence { iterations: usize, residual: f64 },
    /// An SVT backend failed inside an outer solver iteration.
    SvtFailed { iteration: usize, source: Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::SingularMatrix(msg) => write!(f, "singular matrix: {msg}"),
            Error::NonConvergence {
                iterations,
                residual,
            } => write!(
                f,
                "no convergence after {iterations} iterations (residual {residual:.3e})"
            ),
            Error::SvtFailed { iteration, source } => {
                write!(f, "SVT backend failed at iteration {iteration}: {source}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
