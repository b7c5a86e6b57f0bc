use std::fmt;

/// Errors shared by all modules of the crate.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Invalid argument or inconsistent dimensions in problem data.
    InvalidArgument(String),
    /// An index value outside the generator's index set.
    IndexOutOfRange(String),
    /// Operation not defined for this generator or family kind.
    Unsupported(String),
    /// The simplex solver gave up (iteration limit or numerical breakdown).
    /// Distinct from an infeasibility verdict, which is a regular outcome.
    SolverFailure(String),
    /// Problem size exceeds a brute-force guard.
    SizeGuard(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {}", msg),
            Error::IndexOutOfRange(msg) => write!(f, "index out of range: {}", msg),
            Error::Unsupported(msg) => write!(f, "unsupported: {}", msg),
            Error::SolverFailure(msg) => write!(f, "solver failure: {}", msg),
            Error::SizeGuard(msg) => write!(f, "size guard: {}", msg),
        }
    }
}

impl std::error::Error for Error {}
