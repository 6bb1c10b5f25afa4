use std::fmt;

/// Errors from architecture validation, network construction, and training.
#[derive(Debug)]
pub enum CnnError {
    InvalidArchitecture(String),
    InvalidArgument(String),
    Io(std::io::Error),
    Format(String),
}

impl fmt::Display for CnnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CnnError::InvalidArchitecture(msg) => write!(f, "invalid architecture: {msg}"),
            CnnError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            CnnError::Io(err) => write!(f, "io error: {err}"),
            CnnError::Format(msg) => write!(f, "bad network file: {msg}"),
        }
    }
}

impl std::error::Error for CnnError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CnnError::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for CnnError {
    fn from(err: std::io::Error) -> Self {
        CnnError::Io(err)
    }
}
