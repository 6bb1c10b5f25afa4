//! Per-signal test statistics.

use signal_engine::ComplexSignal;

use crate::error::DetectorError;
use crate::Result;

/// Energy detector statistic: T = sum_n |r[n]|^2.
pub fn energy_stat(signal: &ComplexSignal) -> f64 {
    signal.samples().iter().map(|s| s.norm_sqr()).sum()
}

/// Fractional lower-order moment statistic: T = (1/N) sum_n |r[n]|^p.
///
/// Orders up to and including 2 are accepted; heavy-tail regimes want
/// p < alpha so the moment stays finite.
pub fn flom_stat(signal: &ComplexSignal, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(DetectorError::InvalidArgument(format!(
            "moment order must lie in (0, 2], got {p}"
        )));
    }
    let sum: f64 = signal.samples().iter().map(|s| s.norm().powf(p)).sum();
    Ok(sum / signal.len() as f64)
}

/// Cauchy-style log-envelope statistic: T = sum_n ln(1 + |r[n]|^2 / gamma^2).
pub fn cauchy_stat(signal: &ComplexSignal, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(DetectorError::InvalidArgument(format!(
            "scale must be positive, got {gamma}"
        )));
    }
    let g2 = gamma * gamma;
    Ok(signal.samples().iter().map(|s| (1.0 + s.norm_sqr() / g2).ln()).sum())
}

/// A detector choice bundled with its parameters, for code that sweeps or
/// configures detectors by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectorKind {
    Energy,
    Flom { p: f64 },
    Cauchy { gamma: f64 },
}

impl DetectorKind {
    pub fn statistic(&self, signal: &ComplexSignal) -> Result<f64> {
        match *self {
            DetectorKind::Energy => Ok(energy_stat(signal)),
            DetectorKind::Flom { p } => flom_stat(signal, p),
            DetectorKind::Cauchy { gamma } => cauchy_stat(signal, gamma),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DetectorKind::Energy => "ed",
            DetectorKind::Flom { .. } => "flom",
            DetectorKind::Cauchy { .. } => "cauchy",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use signal_engine::gen_sas_noise;

    fn sig(samples: Vec<Complex64>) -> ComplexSignal {
        ComplexSignal::new(samples, 1.0).unwrap()
    }

    #[test]
    fn energy_examples() {
        let zeros = sig(vec![Complex64::new(0.0, 0.0); 7]);
        assert_eq!(energy_stat(&zeros), 0.0);
        let s = sig(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
        ]);
        assert!((energy_stat(&s) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn flom_examples() {
        let s = sig(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        assert!((flom_stat(&s, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let s = sig(vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]);
        assert!((flom_stat(&s, 1.0).unwrap() - 3.5).abs() < 1e-15);
        assert!(flom_stat(&s, 0.0).is_err());
        assert!(flom_stat(&s, 2.5).is_err());
    }

    #[test]
    fn flom_fractional_moment_is_stable_under_sas() {
        // Under SaS(1.25) noise the p = 1 moment stays finite and stable
        // across growing sample counts (contrast with the energy statistic).
        let means: Vec<f64> = [1_000usize, 10_000, 100_000]
            .iter()
            .map(|&n| {
                let noise = gen_sas_noise(n, 1.25, 1.0, 13).unwrap();
                flom_stat(&noise, 1.0).unwrap()
            })
            .collect();
        let spread = (means[2] - means[0]).abs() / means[2];
        assert!(spread < 0.2, "fractional moments unstable: {means:?}");
    }

    #[test]
    fn cauchy_examples() {
        let zeros = sig(vec![Complex64::new(0.0, 0.0); 3]);
        assert_eq!(cauchy_stat(&zeros, 1.5).unwrap(), 0.0);
        let g = 0.7;
        let s = sig(vec![Complex64::new(g, 0.0)]);
        assert!((cauchy_stat(&s, g).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(cauchy_stat(&s, 0.0).is_err());
        assert!(cauchy_stat(&s, -1.0).is_err());
    }

    #[test]
    fn cauchy_monotone_in_scale_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let samples: Vec<Complex64> = (0..32)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let base = sig(samples.clone());
            let scaled = sig(samples.iter().map(|s| s * 2.0).collect());
            assert!(
                cauchy_stat(&scaled, 1.0).unwrap() > cauchy_stat(&base, 1.0).unwrap()
            );
        }
    }
}
