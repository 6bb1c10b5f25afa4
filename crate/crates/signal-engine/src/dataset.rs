//! Labeled dataset assembly for the binary hypothesis test.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::{apply_channel, draw_epa_channel, draw_flat_channel};
use crate::error::SignalError;
use crate::noise::NoiseSpec;
use crate::ofdm::{gen_ofdm_burst, SYMBOL_LEN};
use crate::seeds::derive_seed;
use crate::signal::{ComplexSignal, Hypothesis};
use crate::Result;

/// Primary-user signal family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    /// i.i.d. circularly symmetric complex Gaussian symbols.
    Gaussian,
    /// 802.11a-style OFDM bursts.
    Ofdm,
}

/// Channel model drawn independently for every H1 signal (block fading).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Flat,
    Epa,
}

/// Recipe for one labeled dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub signal_kind: SignalKind,
    pub noise: NoiseSpec,
    pub channel_kind: ChannelKind,
    pub n_samples_per_signal: usize,
    /// SNR grid (dB) for CSCWG noise, GSNR grid (dB) for alpha-stable noise.
    /// H1 signals cycle uniformly over this grid.
    pub snr_grid_db: Vec<f64>,
    pub h0_count: usize,
    pub h1_count: usize,
    pub sample_interval: f64,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if self.n_samples_per_signal == 0 {
            return Err(SignalError::InvalidArgument("n_samples_per_signal must be >= 1".into()));
        }
        if self.h0_count == 0 || self.h1_count == 0 {
            return Err(SignalError::InvalidArgument("per-hypothesis counts must be > 0".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(SignalError::InvalidArgument("SNR grid must be non-empty".into()));
        }
        if !(self.sample_interval > 0.0) {
            return Err(SignalError::InvalidArgument("sample interval must be positive".into()));
        }
        Ok(())
    }
}

/// Signals, hypothesis labels, and per-signal SNR/GSNR metadata (`None`
/// for H0 entries).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    signals: Vec<ComplexSignal>,
    labels: Vec<Hypothesis>,
    snr_db: Vec<Option<f64>>,
}

impl LabeledDataset {
    pub fn new(
        signals: Vec<ComplexSignal>,
        labels: Vec<Hypothesis>,
        snr_db: Vec<Option<f64>>,
    ) -> Result<Self> {
        if signals.len() != labels.len() || signals.len() != snr_db.len() {
            return Err(SignalError::InvalidArgument(
                "signals, labels, and snr lists must be parallel".into(),
            ));
        }
        for (i, (label, snr)) in labels.iter().zip(&snr_db).enumerate() {
            if *label == Hypothesis::H1 && snr.is_none() {
                return Err(SignalError::InvalidArgument(format!(
                    "H1 entry {i} is missing its SNR/GSNR value"
                )));
            }
        }
        Ok(Self { signals, labels, snr_db })
    }

    pub fn signals(&self) -> &[ComplexSignal] {
        &self.signals
    }

    pub fn labels(&self) -> &[Hypothesis] {
        &self.labels
    }

    pub fn snr_db(&self) -> &[Option<f64>] {
        &self.snr_db
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn count(&self, hypothesis: Hypothesis) -> usize {
        self.labels.iter().filter(|&&l| l == hypothesis).count()
    }

    /// New dataset holding the given entries, in index order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut signals = Vec::with_capacity(indices.len());
        let mut labels = Vec::with_capacity(indices.len());
        let mut snr = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(SignalError::InvalidArgument(format!(
                    "subset index {i} out of range for dataset of {}",
                    self.len()
                )));
            }
            signals.push(self.signals[i].clone());
            labels.push(self.labels[i]);
            snr.push(self.snr_db[i]);
        }
        Self::new(signals, labels, snr)
    }
}

/// Amplitude to apply to a unit-power PU signal so the received component
/// hits the requested SNR (CSCWG: SNR = sigma_s^2 / sigma_w^2) or GSNR
/// (alpha-stable: GSNR = P / (4 * dispersion), sqrt(P) being the amplitude).
pub fn pu_amplitude(noise: &NoiseSpec, snr_db: f64) -> f64 {
    let linear = 10f64.powf(snr_db / 10.0);
    match *noise {
        NoiseSpec::Cscwg { variance } => (linear * variance).sqrt(),
        NoiseSpec::Sas { dispersion, .. } => (4.0 * dispersion * linear).sqrt(),
    }
}

fn gen_pu_signal(
    kind: SignalKind,
    n: usize,
    sample_interval: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ComplexSignal> {
    match kind {
        SignalKind::Gaussian => {
            let sigma = (0.5f64).sqrt();
            let samples = (0..n)
                .map(|_| {
                    Complex64::new(
                        sigma * rng.sample::<f64, _>(StandardNormal),
                        sigma * rng.sample::<f64, _>(StandardNormal),
                    )
                })
                .collect();
            ComplexSignal::new(samples, sample_interval)
        }
        SignalKind::Ofdm => {
            let symbols = n.div_ceil(SYMBOL_LEN);
            let burst = gen_ofdm_burst(symbols, rng.gen())?;
            let samples = burst.samples()[..n].to_vec();
            ComplexSignal::new(samples, sample_interval)
        }
    }
}

/// Generates one signal under the requested hypothesis: pure noise for H0,
/// or a channel-filtered unit-power PU signal scaled to the SNR/GSNR plus
/// noise for H1. The per-signal draw order is fixed (channel, PU signal,
/// noise), so a seed fully determines the result.
#[allow(clippy::too_many_arguments)]
pub fn gen_signal_under(
    hypothesis: Hypothesis,
    signal_kind: SignalKind,
    noise: &NoiseSpec,
    channel_kind: ChannelKind,
    n: usize,
    sample_interval: f64,
    snr_db: Option<f64>,
    seed: u64,
) -> Result<ComplexSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match hypothesis {
        Hypothesis::H0 => {
            let w = noise.generate(n, rng.gen())?;
            ComplexSignal::new(w.samples().to_vec(), sample_interval)
        }
        Hypothesis::H1 => {
            let snr_db = snr_db.ok_or_else(|| {
                SignalError::InvalidArgument("H1 generation needs an SNR/GSNR value".into())
            })?;
            let channel = match channel_kind {
                ChannelKind::Flat => draw_flat_channel(rng.gen()),
                ChannelKind::Epa => draw_epa_channel(sample_interval, rng.gen())?,
            };
            let pu = gen_pu_signal(signal_kind, n, sample_interval, &mut rng)?;
            let faded = apply_channel(&pu, &channel).scaled(pu_amplitude(noise, snr_db));
            let w = noise.generate(n, rng.gen())?;
            let w = ComplexSignal::new(w.samples().to_vec(), sample_interval)?;
            faded.add(&w)
        }
    }
}

fn gen_one(spec: &DatasetSpec, index: usize) -> Result<(ComplexSignal, Hypothesis, Option<f64>)> {
    let sub = derive_seed(spec.seed, index as u64);
    if index < spec.h0_count {
        let signal = gen_signal_under(
            Hypothesis::H0,
            spec.signal_kind,
            &spec.noise,
            spec.channel_kind,
            spec.n_samples_per_signal,
            spec.sample_interval,
            None,
            sub,
        )?;
        Ok((signal, Hypothesis::H0, None))
    } else {
        let h1_index = index - spec.h0_count;
        let snr_db = spec.snr_grid_db[h1_index % spec.snr_grid_db.len()];
        let signal = gen_signal_under(
            Hypothesis::H1,
            spec.signal_kind,
            &spec.noise,
            spec.channel_kind,
            spec.n_samples_per_signal,
            spec.sample_interval,
            Some(snr_db),
            sub,
        )?;
        Ok((signal, Hypothesis::H1, Some(snr_db)))
    }
}

/// Assembles a labeled dataset: `h0_count` pure-noise signals followed by
/// `h1_count` channel-filtered PU signals at the grid SNRs, fully
/// deterministic given the spec seed.
pub fn build_dataset(spec: &DatasetSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let total = spec.h0_count + spec.h1_count;
    let entries: Vec<_> = (0..total)
        .into_par_iter()
        .map(|i| gen_one(spec, i))
        .collect::<Result<_>>()?;
    let mut signals = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut snrs = Vec::with_capacity(total);
    for (sig, label, snr) in entries {
        signals.push(sig);
        labels.push(label);
        snrs.push(snr);
    }
    LabeledDataset::new(signals, labels, snrs)
}
