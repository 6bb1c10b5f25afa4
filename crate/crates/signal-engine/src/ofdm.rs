//! 802.11a-style OFDM burst generation.
//!
//! Each symbol is a 64-point inverse FFT over 48 QPSK data subcarriers and
//! 4 fixed BPSK pilots, with 12 null subcarriers (DC plus the band edges),
//! prefixed by its last 16 time samples as a cyclic prefix. One symbol spans
//! 80 samples = 4 us at the 50 ns sample time.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::error::SignalError;
use crate::signal::ComplexSignal;
use crate::{Result, DEFAULT_SAMPLE_INTERVAL};

pub const FFT_SIZE: usize = 64;
pub const CP_LEN: usize = 16;
pub const SYMBOL_LEN: usize = FFT_SIZE + CP_LEN;

/// Pilot subcarriers at +-7 and +-21 with the standard 802.11a polarity
/// (subcarrier index, BPSK value), indices in FFT-bin terms.
const PILOTS: [(usize, f64); 4] = [(7, 1.0), (21, -1.0), (43, 1.0), (57, 1.0)];

/// Data subcarriers: +-1..+-26 excluding the pilots. DC (bin 0) and bins
/// 27..=37 stay null, which gives the standard 48/4/12 split.
fn data_bins() -> Vec<usize> {
    let mut bins = Vec::with_capacity(48);
    for k in 1..=26usize {
        if k != 7 && k != 21 {
            bins.push(k);
        }
    }
    for k in 38..FFT_SIZE {
        if k != 43 && k != 57 {
            bins.push(k);
        }
    }
    bins
}

/// Generates `num_symbols` OFDM symbols of random QPSK data, cyclic prefix
/// included, normalized to unit average power over the whole burst.
pub fn gen_ofdm_burst(num_symbols: usize, seed: u64) -> Result<ComplexSignal> {
    if num_symbols == 0 {
        return Err(SignalError::InvalidArgument("num_symbols must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(FFT_SIZE);
    let bins = data_bins();
    debug_assert_eq!(bins.len(), 48);

    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut burst = Vec::with_capacity(num_symbols * SYMBOL_LEN);
    let mut freq = vec![Complex64::new(0.0, 0.0); FFT_SIZE];
    for _ in 0..num_symbols {
        freq.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for &k in &bins {
            let re = if rng.gen::<bool>() { inv_sqrt2 } else { -inv_sqrt2 };
            let im = if rng.gen::<bool>() { inv_sqrt2 } else { -inv_sqrt2 };
            freq[k] = Complex64::new(re, im);
        }
        for &(k, v) in &PILOTS {
            freq[k] = Complex64::new(v, 0.0);
        }
        ifft.process(&mut freq);
        // Cyclic prefix: the last CP_LEN time samples lead the symbol.
        burst.extend_from_slice(&freq[FFT_SIZE - CP_LEN..]);
        burst.extend_from_slice(&freq);
    }

    let power = burst.iter().map(|s| s.norm_sqr()).sum::<f64>() / burst.len() as f64;
    let scale = 1.0 / power.sqrt();
    for s in &mut burst {
        *s *= scale;
    }
    ComplexSignal::new(burst, DEFAULT_SAMPLE_INTERVAL)
}
