use std::fmt;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar or integer argument is outside the supported domain.
    InvalidArgument(String),
    /// Two objects that must live on the same sphere / center / index range
    /// do not.
    Incompatible(String),
    /// A scenario classification could not be decided from the supplied
    /// sequence (mixed parity, oscillating fractional offsets, ...).
    Classification(String),
    /// A linear system had no usable solution.
    Singular(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Incompatible(msg) => write!(f, "incompatible operands: {msg}"),
            Error::Classification(msg) => write!(f, "classification failure: {msg}"),
            Error::Singular(msg) => write!(f, "singular system: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
