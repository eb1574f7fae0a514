use thiserror::Error;

/// Errors raised by the library. Each kind maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("precision not stabilized: {0}")]
    NotStabilized(String),
}

impl Error {
    /// 1 for failed identities, 3 for unstable precision, 2 for everything the caller got wrong.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification(_) => 1,
            Error::NotStabilized(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
