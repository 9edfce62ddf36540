use thiserror::Error;

/// Errors raised by the forecasting kernel.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a mathematical precondition (empty sample,
    /// probability outside `[0, 1]`, zero variance, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The input file could not be decoded at all.
    #[error("parse error: {0}")]
    Parse(String),

    /// The input decoded but its header, keys or file metadata do not match
    /// the dataset schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// The request is well formed but the kernel declines to compute it.
    #[error("refused: {0}")]
    Refused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
