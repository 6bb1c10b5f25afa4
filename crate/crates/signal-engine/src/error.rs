use std::fmt;

/// Errors produced by signal generation and dataset IO.
#[derive(Debug)]
pub enum SignalError {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// Underlying IO failure while reading or writing a container file.
    Io(std::io::Error),
    /// A container file was present but malformed.
    Format(String),
}

impl fmt::Display for SignalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            SignalError::Io(err) => write!(f, "io error: {err}"),
            SignalError::Format(msg) => write!(f, "bad container format: {msg}"),
        }
    }
}

impl std::error::Error for SignalError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SignalError::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for SignalError {
    fn from(err: std::io::Error) -> Self {
        SignalError::Io(err)
    }
}
