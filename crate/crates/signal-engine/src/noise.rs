//! Noise processes: CSCWG and isotropic complex symmetric alpha-stable.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::error::SignalError;
use crate::signal::ComplexSignal;
use crate::{Result, DEFAULT_SAMPLE_INTERVAL};

/// Parameters of a noise process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    /// Circularly symmetric complex white Gaussian noise with total
    /// per-sample power `variance` (= E|w|^2).
    Cscwg { variance: f64 },
    /// Isotropic complex symmetric alpha-stable noise with characteristic
    /// exponent `alpha` in (0, 2] and dispersion `dispersion` > 0. The
    /// characteristic function is exp(-dispersion * |t|^alpha).
    Sas { alpha: f64, dispersion: f64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::Cscwg { variance } => {
                if !(variance > 0.0) || !variance.is_finite() {
                    return Err(SignalError::InvalidArgument(format!(
                        "CSCWG variance must be positive, got {variance}"
                    )));
                }
            }
            NoiseSpec::Sas { alpha, dispersion } => {
                if !(alpha > 0.0 && alpha <= 2.0) {
                    return Err(SignalError::InvalidArgument(format!(
                        "alpha must lie in (0, 2], got {alpha}"
                    )));
                }
                if !(dispersion > 0.0) || !dispersion.is_finite() {
                    return Err(SignalError::InvalidArgument(format!(
                        "dispersion must be positive, got {dispersion}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Draws `n` samples of this noise process.
    pub fn generate(&self, n: usize, seed: u64) -> Result<ComplexSignal> {
        match *self {
            NoiseSpec::Cscwg { variance } => gen_cscwg_noise(n, variance, seed),
            NoiseSpec::Sas { alpha, dispersion } => gen_sas_noise(n, alpha, dispersion, seed),
        }
    }
}

/// i.i.d. circularly symmetric complex Gaussian samples with per-sample
/// E|w|^2 = `variance` (each real component has variance `variance`/2).
pub fn gen_cscwg_noise(n: usize, variance: f64, seed: u64) -> Result<ComplexSignal> {
    if n == 0 {
        return Err(SignalError::InvalidArgument("sample count must be >= 1".into()));
    }
    NoiseSpec::Cscwg { variance }.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = (variance / 2.0).sqrt();
    let samples = (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    ComplexSignal::new(samples, DEFAULT_SAMPLE_INTERVAL)
}

/// Isotropic complex symmetric alpha-stable samples via the sub-Gaussian
/// construction: w = sqrt(A) * (g1 + j*g2) with A a totally skewed positive
/// (alpha/2)-stable multiplier and g1, g2 i.i.d. zero-mean Gaussians of
/// variance 2 * dispersion^(2/alpha). The resulting characteristic function
/// is exp(-dispersion * |t|^alpha); alpha = 2 degenerates to CSCWG with
/// E|w|^2 = 4 * dispersion.
pub fn gen_sas_noise(n: usize, alpha: f64, dispersion: f64, seed: u64) -> Result<ComplexSignal> {
    if n == 0 {
        return Err(SignalError::InvalidArgument("sample count must be >= 1".into()));
    }
    NoiseSpec::Sas { alpha, dispersion }.validate()?;
    if alpha == 2.0 {
        // Gaussian limit: the stable multiplier degenerates to 1.
        return gen_cscwg_noise(n, 4.0 * dispersion, seed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let component_var = 2.0 * dispersion.powf(2.0 / alpha);
    let samples = (0..n)
        .map(|_| {
            let a = positive_stable(alpha / 2.0, &mut rng);
            let sigma = (a * component_var).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    ComplexSignal::new(samples, DEFAULT_SAMPLE_INTERVAL)
}

/// One draw of the totally skewed positive stable law with Laplace transform
/// E[exp(-s A)] = exp(-s^a), 0 < a < 1. This is the Chambers-Mallows-Stuck
/// transform specialized to the one-sided (beta = 1) case.
fn positive_stable<R: Rng>(a: f64, rng: &mut R) -> f64 {
    debug_assert!(a > 0.0 && a < 1.0);
    // Keep u strictly inside (0, pi) and e strictly positive.
    let u = PI * rng.gen_range(f64::EPSILON..1.0 - f64::EPSILON);
    let e = (-(1.0 - rng.gen::<f64>()).ln()).max(1e-300);
    let num = (a * u).sin();
    let den = u.sin().powf(1.0 / a);
    let tail = (((1.0 - a) * u).sin() / e).powf((1.0 - a) / a);
    (num / den) * tail
}
