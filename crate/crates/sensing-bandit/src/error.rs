use std::fmt;

/// Errors from reward accounting, banks, and scenario runs.
#[derive(Debug)]
pub enum BanditError {
    InvalidArgument(String),
    /// A plan section asked for a GSNR the detector bank cannot price.
    UncoveredGsnr { action_id: usize, gsnr_db: f64 },
    /// Live-mode detection failed while generating or scoring a signal.
    Detector(String),
}

impl fmt::Display for BanditError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BanditError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            BanditError::UncoveredGsnr { action_id, gsnr_db } => {
                write!(f, "bank does not cover action {action_id} at {gsnr_db} dB")
            }
            BanditError::Detector(msg) => write!(f, "live detection failed: {msg}"),
        }
    }
}

impl std::error::Error for BanditError {}
