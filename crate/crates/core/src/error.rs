use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported representation: {0}")]
    Unsupported(String),

    /// A constructor-time contract (monotonicity, nonexpansiveness, ...) failed.
    #[error("contract violated: {0}")]
    Contract(String),

    /// An invariant that should be impossible to break was broken.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("non-finite iterate at step {step}")]
    NonFinite { step: usize },

    #[error("bound function not defined at {at}: {reason}")]
    BoundDomain { at: String, reason: String },

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
