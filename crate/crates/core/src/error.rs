use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a precondition (unknown label, bad range, shape mismatch).
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured size cap would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// Malformed input file or preset description.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn resource<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Resource(msg.into()))
}
