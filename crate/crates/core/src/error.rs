use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("exact arithmetic unavailable for a numeric angle")]
    NotExact,
    #[error("precision shortfall: {required} bits required, {available} available")]
    PrecisionShortfall { required: u32, available: u32 },
    #[error("budget exceeded: {what} needs {needed}, limit {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("{0} not converged")]
    NotConverged(String),
    #[error("no witness found: {0}")]
    NotFound(String),
    #[error("out of regime: {0}")]
    Regime(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
