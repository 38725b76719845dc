use thiserror::Error;

/// Errors surfaced by the library. The CLI maps each to an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed config: {0}")]
    MalformedConfig(String),
    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("no dominant root: {0}")]
    NoDominantRoot(String),
    #[error("dominant root does not exceed 1 in modulus: {0}")]
    RootNotLargerThanOne(String),
    #[error("unsupported degree: {0}")]
    UnsupportedDegree(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cutoff unsafe: {0}")]
    CutoffUnsafe(String),
    #[error("x = {0} is below the validity threshold of the lower-bound grid")]
    InvalidBelowThreshold(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CutoffUnsafe(_) => 2,
            Error::PrecisionExhausted(_) => 3,
            _ => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
