use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the signal-chain primitives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Shapes, lengths or parameter values outside an operation's domain.
    InvalidInput(String),
    /// A factorization hit a (numerically) singular matrix.
    DegenerateFactorization(String),
    /// A structural property that must hold by construction did not.
    InternalConsistency(String),
    /// The operation does not apply to this configuration.
    UnsupportedConfiguration(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::DegenerateFactorization(m) => write!(f, "degenerate factorization: {m}"),
            Error::InternalConsistency(m) => write!(f, "internal consistency violation: {m}"),
            Error::UnsupportedConfiguration(m) => write!(f, "unsupported configuration: {m}"),
        }
    }
}

impl core::error::Error for Error {}
