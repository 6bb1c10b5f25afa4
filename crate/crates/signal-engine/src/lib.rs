//! Baseband signal simulation for spectrum sensing.
//!
//! Everything needed to manufacture labeled sensing datasets: circularly
//! symmetric complex white Gaussian (CSCWG) and isotropic symmetric
//! alpha-stable noise, Gaussian and 802.11a-style OFDM primary-user signals,
//! flat Rayleigh and EPA tapped-delay-line channels, and a binary container
//! format for the assembled datasets.
//!
//! All generators are pure functions of an explicit 64-bit seed; identical
//! inputs produce bit-identical outputs. Per-signal sub-seeds are derived
//! with [`seeds::derive_seed`], so dataset assembly can fan out across
//! threads without changing the result.

pub mod channel;
pub mod container;
pub mod dataset;
pub mod error;
pub mod noise;
pub mod ofdm;
pub mod seeds;
pub mod signal;

pub use channel::{apply_channel, draw_epa_channel, draw_flat_channel, ChannelRealization, Tap};
pub use container::{read_dataset, write_dataset};
pub use dataset::{
    build_dataset, gen_signal_under, pu_amplitude, ChannelKind, DatasetSpec, LabeledDataset,
    SignalKind,
};
pub use error::SignalError;
pub use noise::{gen_cscwg_noise, gen_sas_noise, NoiseSpec};
pub use ofdm::gen_ofdm_burst;
pub use signal::{ComplexSignal, Hypothesis};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, SignalError>;

/// Baseband sample interval used by the default recipes: 50 ns, the
/// 802.11a symbol time (one OFDM symbol spans 80 samples = 4 us).
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 50e-9;
