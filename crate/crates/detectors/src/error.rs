use std::fmt;

/// Errors produced by detector statistics and calibration.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectorError {
    InvalidArgument(String),
}

impl fmt::Display for DetectorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectorError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl std::error::Error for DetectorError {}
