//! Model-based spectrum-sensing detectors.
//!
//! Per-signal test statistics (energy, fractional lower-order moment, and a
//! Cauchy-style log-envelope statistic), empirical threshold calibration to
//! a target false-alarm rate, and Pd/Pfa/ROC evaluation. Calibration is
//! empirical for every detector, so one code path serves alpha-stable
//! regimes where no closed form exists.

mod calibrate;
mod error;
mod stats;

pub use calibrate::{calibrate_threshold, empirical_rates, roc_curve, DetectorThreshold, RatePoint};
pub use error::DetectorError;
pub use stats::{cauchy_stat, energy_stat, flom_stat, DetectorKind};

pub type Result<T> = std::result::Result<T, DetectorError>;
