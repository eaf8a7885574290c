use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition was violated by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An exact integer result does not fit the native width.
    #[error("integer overflow: {0}")]
    Overflow(String),

    /// The requested operation is not available for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A certified inequality failed to hold.
    #[error("certificate violation: {0}")]
    Certificate(String),

    /// Malformed input file contents.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Malformed JSON document or field.
    #[error("invalid {field}: {message}")]
    Field { field: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
