//! Core sample-sequence type shared by every module.

use num_complex::Complex64;

use crate::error::SignalError;
use crate::Result;

/// Which hypothesis a signal was generated under: idle band (`H0`, noise
/// only) or occupied band (`H1`, primary-user signal plus noise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    pub fn label(self) -> u8 {
        match self {
            Hypothesis::H0 => 0,
            Hypothesis::H1 => 1,
        }
    }
}

/// A finite sequence of complex baseband samples with a fixed sampling
/// interval in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    samples: Vec<Complex64>,
    sample_interval: f64,
}

impl ComplexSignal {
    /// Builds a signal, checking the structural invariants: at least one
    /// sample, a positive sampling interval, and all samples finite.
    pub fn new(samples: Vec<Complex64>, sample_interval: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(SignalError::InvalidArgument(
                "signal must contain at least one sample".into(),
            ));
        }
        if !(sample_interval > 0.0) || !sample_interval.is_finite() {
            return Err(SignalError::InvalidArgument(format!(
                "sample interval must be positive and finite, got {sample_interval}"
            )));
        }
        if let Some(bad) = samples.iter().position(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(SignalError::InvalidArgument(format!(
                "non-finite sample at index {bad}"
            )));
        }
        Ok(Self { samples, sample_interval })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of |x[n]|^2 over the signal.
    pub fn average_power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Returns a copy scaled by a real amplitude factor.
    pub fn scaled(&self, amplitude: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * amplitude).collect(),
            sample_interval: self.sample_interval,
        }
    }

    /// Element-wise sum of two equal-length signals.
    pub fn add(&self, other: &ComplexSignal) -> Result<Self> {
        if self.len() != other.len() {
            return Err(SignalError::InvalidArgument(format!(
                "length mismatch in signal sum: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { samples, sample_interval: self.sample_interval })
    }
}
