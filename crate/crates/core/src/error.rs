use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("size cap exceeded: {what} needs {needed} profiles, cap is {cap}")]
    Resource {
        what: String,
        needed: u128,
        cap: u128,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<S: Into<String>>(msg: S) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid<S: Into<String>>(msg: S) -> Error {
    Error::Invalid(msg.into())
}

pub(crate) fn dimension<S: Into<String>>(msg: S) -> Error {
    Error::Dimension(msg.into())
}
