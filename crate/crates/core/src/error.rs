use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad field parameters: wrong degree, reducible modulus, unsupported size.
    #[error("field construction: {0}")]
    Field(String),

    /// An argument outside the operation's domain, e.g. inverting zero.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request exceeds the configured work limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A quantity that must be exact or real was not. Always a bug.
    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
