use thiserror::Error;

/// Errors produced by the signal model and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The ratio defining β has a zero denominator.
    #[error("β is undefined: the fourth moment equals the lag-1 product moment")]
    UndefinedBeta,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
