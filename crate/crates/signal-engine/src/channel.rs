//! Tapped-delay-line channels: flat Rayleigh and 3GPP EPA.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::SignalError;
use crate::signal::ComplexSignal;
use crate::Result;

/// EPA excess delays (ns) and relative tap powers (dB); maximum excess
/// delay 410 ns.
const EPA_DELAYS_NS: [f64; 7] = [0.0, 30.0, 70.0, 90.0, 110.0, 190.0, 410.0];
const EPA_POWERS_DB: [f64; 7] = [0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8];

/// One channel tap: integer sample delay and complex gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub delay: usize,
    pub gain: Complex64,
}

/// A single realization of a block-fading channel.
///
/// `avg_power` records the ensemble-average total tap power of the profile
/// the realization was drawn from (1.0 for the built-in draws).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    taps: Vec<Tap>,
    avg_power: f64,
}

impl ChannelRealization {
    /// Builds a realization from explicit taps. Delays must be strictly
    /// increasing and at least one tap must carry power; `avg_power` is set
    /// to the realized total tap power.
    pub fn from_taps(taps: Vec<Tap>) -> Result<Self> {
        if taps.is_empty() {
            return Err(SignalError::InvalidArgument("channel needs at least one tap".into()));
        }
        for pair in taps.windows(2) {
            if pair[1].delay <= pair[0].delay {
                return Err(SignalError::InvalidArgument(
                    "tap delays must be strictly increasing".into(),
                ));
            }
        }
        let power: f64 = taps.iter().map(|t| t.gain.norm_sqr()).sum();
        if !(power > 0.0) {
            return Err(SignalError::InvalidArgument("total tap power must be positive".into()));
        }
        Ok(Self { taps, avg_power: power })
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    /// Ensemble-average total tap power of the generating profile.
    pub fn avg_power(&self) -> f64 {
        self.avg_power
    }

    /// Realized total tap power of this draw.
    pub fn realized_power(&self) -> f64 {
        self.taps.iter().map(|t| t.gain.norm_sqr()).sum()
    }
}

fn complex_gaussian<R: Rng>(variance: f64, rng: &mut R) -> Complex64 {
    let sigma = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sigma * re, sigma * im)
}

/// Flat Rayleigh fading: a single tap at delay 0 with CN(0, 1) gain.
pub fn draw_flat_channel(seed: u64) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gain = complex_gaussian(1.0, &mut rng);
    ChannelRealization {
        taps: vec![Tap { delay: 0, gain }],
        avg_power: 1.0,
    }
}

/// EPA tapped-delay-line realization at the given sample interval.
///
/// Excess delays are rounded to the nearest sample index; taps that land on
/// the same index are merged by power. Gains are independent complex
/// Gaussians scaled to the (unit-normalized) power-delay profile.
pub fn draw_epa_channel(sample_interval: f64, seed: u64) -> Result<ChannelRealization> {
    if !(sample_interval > 0.0) || !sample_interval.is_finite() {
        return Err(SignalError::InvalidArgument(format!(
            "sample interval must be positive, got {sample_interval}"
        )));
    }
    let mut profile: Vec<(usize, f64)> = Vec::new();
    let total: f64 = EPA_POWERS_DB.iter().map(|db| 10f64.powf(db / 10.0)).sum();
    for (delay_ns, power_db) in EPA_DELAYS_NS.iter().zip(&EPA_POWERS_DB) {
        let idx = (delay_ns * 1e-9 / sample_interval).round() as usize;
        let p = 10f64.powf(power_db / 10.0) / total;
        match profile.iter_mut().find(|(i, _)| *i == idx) {
            Some((_, acc)) => *acc += p,
            None => profile.push((idx, p)),
        }
    }
    profile.sort_by_key(|(i, _)| *i);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let taps = profile
        .iter()
        .map(|&(delay, p)| Tap { delay, gain: complex_gaussian(p, &mut rng) })
        .collect();
    Ok(ChannelRealization { taps, avg_power: 1.0 })
}

/// Linear convolution with the channel taps, truncated to the input length:
/// y[n] = sum_i gain_i * x[n - delay_i].
pub fn apply_channel(signal: &ComplexSignal, channel: &ChannelRealization) -> ComplexSignal {
    let x = signal.samples();
    let n = x.len();
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for tap in channel.taps() {
        if tap.delay >= n {
            continue;
        }
        for i in tap.delay..n {
            y[i] += tap.gain * x[i - tap.delay];
        }
    }
    ComplexSignal::new(y, signal.sample_interval()).expect("output length equals input length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::derive_seed;

    #[test]
    fn flat_channel_structure_and_power() {
        let ch = draw_flat_channel(1);
        assert_eq!(ch.taps().len(), 1);
        assert_eq!(ch.taps()[0].delay, 0);

        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|i| draw_flat_channel(derive_seed(2, i)).realized_power())
            .sum::<f64>()
            / n as f64;
        assert!((0.99..=1.01).contains(&mean), "mean |d0|^2 = {mean}");
    }

    #[test]
    fn flat_gain_is_rayleigh() {
        // KS distance between |d0| and the Rayleigh CDF 1 - exp(-r^2).
        let n = 100_000;
        let mut mags: Vec<f64> = (0..n)
            .map(|i| draw_flat_channel(derive_seed(3, i)).taps()[0].gain.norm())
            .collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks: f64 = 0.0;
        for (i, &r) in mags.iter().enumerate() {
            let cdf = 1.0 - (-r * r).exp();
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            ks = ks.max((cdf - lo).abs()).max((cdf - hi).abs());
        }
        assert!(ks < 0.01, "KS distance {ks}");
    }

    #[test]
    fn epa_tap_indices_at_50ns() {
        let ch = draw_epa_channel(50e-9, 1).unwrap();
        let last = ch.taps().last().unwrap();
        assert_eq!(last.delay, 8, "410 ns rounds to sample 8 at 50 ns");
        // 30 and 70 ns merge into index 1; 90 and 110 into index 2.
        let delays: Vec<usize> = ch.taps().iter().map(|t| t.delay).collect();
        assert_eq!(delays, vec![0, 1, 2, 4, 8]);
    }

    #[test]
    fn epa_coarse_sampling_collapses() {
        let ch = draw_epa_channel(500e-9, 1).unwrap();
        assert!(ch.taps().iter().all(|t| t.delay <= 1));
    }

    #[test]
    fn epa_unit_average_power() {
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|i| draw_epa_channel(50e-9, derive_seed(4, i)).unwrap().realized_power())
            .sum::<f64>()
            / n as f64;
        assert!((0.99..=1.01).contains(&mean), "mean power = {mean}");
    }

    #[test]
    fn apply_channel_identity_and_shift() {
        let x = ComplexSignal::new(
            (0..8).map(|i| Complex64::new(i as f64, -(i as f64))).collect(),
            1.0,
        )
        .unwrap();

        let identity = ChannelRealization::from_taps(vec![Tap {
            delay: 0,
            gain: Complex64::new(1.0, 0.0),
        }])
        .unwrap();
        assert_eq!(apply_channel(&x, &identity), x);

        let shift = ChannelRealization::from_taps(vec![Tap {
            delay: 2,
            gain: Complex64::new(0.0, 1.0),
        }])
        .unwrap();
        let y = apply_channel(&x, &shift);
        assert_eq!(y.samples()[0], Complex64::new(0.0, 0.0));
        assert_eq!(y.samples()[1], Complex64::new(0.0, 0.0));
        for i in 2..8 {
            let expect = Complex64::new(0.0, 1.0) * x.samples()[i - 2];
            assert!((y.samples()[i] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn apply_channel_matches_brute_force() {
        // Direct double-sum convolution oracle on random inputs up to
        // length 64, including tap delays beyond the signal length.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..200 {
            let n = rng.gen_range(1..=64);
            let x: Vec<Complex64> = (0..n)
                .map(|_| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
                .collect();
            let mut delays: Vec<usize> = (0..rng.gen_range(1..=4))
                .map(|_| rng.gen_range(0..70))
                .collect();
            delays.sort_unstable();
            delays.dedup();
            let taps: Vec<Tap> = delays
                .iter()
                .map(|&d| Tap {
                    delay: d,
                    gain: Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)),
                })
                .collect();
            let ch = ChannelRealization::from_taps(taps.clone()).unwrap();
            let sig = ComplexSignal::new(x.clone(), 1.0).unwrap();
            let y = apply_channel(&sig, &ch);

            for i in 0..n {
                let mut expect = Complex64::new(0.0, 0.0);
                for tap in &taps {
                    if i >= tap.delay {
                        expect += tap.gain * x[i - tap.delay];
                    }
                }
                assert!(
                    (y.samples()[i] - expect).norm() < 1e-12,
                    "trial {trial}, index {i}"
                );
            }
        }
    }

    #[test]
    fn from_taps_validates() {
        assert!(ChannelRealization::from_taps(vec![]).is_err());
        let zero = Tap { delay: 0, gain: Complex64::new(0.0, 0.0) };
        assert!(ChannelRealization::from_taps(vec![zero]).is_err());
        let a = Tap { delay: 1, gain: Complex64::new(1.0, 0.0) };
        let b = Tap { delay: 1, gain: Complex64::new(1.0, 0.0) };
        assert!(ChannelRealization::from_taps(vec![a, b]).is_err());
    }
}
