//! Per-command configuration schemas.
//!
//! Each command owns a TOML schema with defaults; unknown keys are
//! rejected with a diagnostic naming the key and location. A run is fully
//! determined by (config, seed).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use signal_engine::{ChannelKind, NoiseSpec, SignalKind};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    GenData,
    Train,
    NasSearch,
    BanditSim,
    Roc,
    PdCurve,
    Cost,
    Selfcheck,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::GenData => "gen-data",
            CommandKind::Train => "train",
            CommandKind::NasSearch => "nas-search",
            CommandKind::BanditSim => "bandit-sim",
            CommandKind::Roc => "roc",
            CommandKind::PdCurve => "pd-curve",
            CommandKind::Cost => "cost",
            CommandKind::Selfcheck => "selfcheck",
        }
    }
}

fn default_seed() -> u64 {
    1
}

fn default_sample_interval_ns() -> f64 {
    50.0
}

/// Noise process selection.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NoiseConfig {
    Cscwg {
        variance: f64,
    },
    Sas {
        alpha: f64,
        dispersion: f64,
    },
}

impl NoiseConfig {
    pub fn to_spec(&self) -> NoiseSpec {
        match *self {
            NoiseConfig::Cscwg { variance } => NoiseSpec::Cscwg { variance },
            NoiseConfig::Sas { alpha, dispersion } => NoiseSpec::Sas { alpha, dispersion },
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SignalKindConfig {
    Gaussian,
    Ofdm,
}

impl SignalKindConfig {
    pub fn to_kind(self) -> SignalKind {
        match self {
            SignalKindConfig::Gaussian => SignalKind::Gaussian,
            SignalKindConfig::Ofdm => SignalKind::Ofdm,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKindConfig {
    Flat,
    Epa,
}

impl ChannelKindConfig {
    pub fn to_kind(self) -> ChannelKind {
        match self {
            ChannelKindConfig::Flat => ChannelKind::Flat,
            ChannelKindConfig::Epa => ChannelKind::Epa,
        }
    }
}

/// Detector selection for evaluation commands.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DetectorConfig {
    Ed,
    Flom { p: f64 },
    Cauchy { gamma: f64 },
}

impl DetectorConfig {
    pub fn to_kind(&self) -> detectors::DetectorKind {
        match *self {
            DetectorConfig::Ed => detectors::DetectorKind::Energy,
            DetectorConfig::Flom { p } => detectors::DetectorKind::Flom { p },
            DetectorConfig::Cauchy { gamma } => detectors::DetectorKind::Cauchy { gamma },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GenDataConfig {
    pub signal: SignalKindConfig,
    pub channel: ChannelKindConfig,
    pub noise: NoiseConfig,
    pub n_samples: usize,
    pub h0_count: usize,
    pub h1_count: usize,
    pub snr_grid_db: Vec<f64>,
    #[serde(default = "default_sample_interval_ns")]
    pub sample_interval_ns: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub dataset: String,
    pub arch: String,
    pub epochs: usize,
    #[serde(default = "default_val_fraction")]
    pub val_fraction: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_val_fraction() -> f64 {
    0.2
}

/// Reward source for the architecture search.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EvaluatorConfig {
    /// K-fold accuracy of each candidate on a dataset file.
    Kfold { dataset: String, k: usize, epochs: usize },
    /// Synthetic oracle: 1.0 for the planted architecture, `floor`
    /// everywhere else.
    Planted {
        arch: String,
        #[serde(default = "default_planted_floor")]
        floor: f64,
    },
}

fn default_planted_floor() -> f64 {
    0.3
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NasSearchConfig {
    pub evaluator: EvaluatorConfig,
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    #[serde(default = "default_max_layers")]
    pub max_layers: usize,
    #[serde(default = "default_min_length")]
    pub min_length: usize,
    /// Required for planted evaluators; defaults to the dataset's signal
    /// length for k-fold evaluators.
    #[serde(default)]
    pub input_length: Option<usize>,
    #[serde(default = "default_filter_counts")]
    pub filter_counts: Vec<usize>,
    #[serde(default = "default_filter_sizes")]
    pub filter_sizes: Vec<usize>,
    #[serde(default = "default_pool_sizes")]
    pub pool_sizes: Vec<usize>,
    #[serde(default = "default_q_init")]
    pub q_init: f64,
    #[serde(default = "default_discount")]
    pub discount: f64,
    #[serde(default = "default_true")]
    pub cache_rewards: bool,
    #[serde(default = "default_decay_fraction")]
    pub epsilon_decay_fraction: f64,
    /// Optional checkpoint to continue from.
    #[serde(default)]
    pub resume: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_episodes() -> usize {
    3000
}
fn default_max_layers() -> usize {
    8
}
fn default_min_length() -> usize {
    8
}
fn default_filter_counts() -> Vec<usize> {
    vec![8, 16, 32, 64]
}
fn default_filter_sizes() -> Vec<usize> {
    vec![3, 5]
}
fn default_pool_sizes() -> Vec<usize> {
    vec![2, 4]
}
fn default_q_init() -> f64 {
    0.5
}
fn default_discount() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}
fn default_decay_fraction() -> f64 {
    0.9
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PlanSectionConfig {
    pub frames: usize,
    pub hypothesis: String,
    #[serde(default)]
    pub gsnr_db: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    /// `egreedy`, `gb`, or `always`.
    pub kind: String,
    /// Arm index for `always`.
    #[serde(default)]
    pub arm: Option<usize>,
    /// Optional restriction of learning policies to a subset of arms.
    #[serde(default)]
    pub arms: Option<Vec<usize>>,
    #[serde(default)]
    pub label: Option<String>,
}

/// Detection model behind a bandit simulation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BankConfig {
    /// Logistic three-interval curves, one midpoint per action.
    Logistic { midpoints_db: Vec<f64>, width_db: f64 },
    /// Constant Pd per action (diagnostics).
    Fixed { pd: Vec<f64> },
    /// Calibrated live detectors on generated signals.
    Live {
        detector: DetectorConfig,
        signal: SignalKindConfig,
        channel: ChannelKindConfig,
        noise: NoiseConfig,
        n_cal: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    #[serde(default = "default_throughput_rate")]
    pub throughput_rate: f64,
    #[serde(default = "default_interference_penalty")]
    pub interference_penalty: f64,
    #[serde(default = "default_complexity_rate")]
    pub complexity_rate: f64,
    #[serde(default = "default_frame_us")]
    pub frame_us: f64,
    #[serde(default = "default_target_pfa")]
    pub target_pfa: f64,
}

fn default_throughput_rate() -> f64 {
    0.1
}
fn default_interference_penalty() -> f64 {
    20.0
}
fn default_complexity_rate() -> f64 {
    1.0 / 32.0
}
fn default_frame_us() -> f64 {
    80.0
}
fn default_target_pfa() -> f64 {
    0.01
}

impl Default for WeightsConfig {
    fn default() -> Self {
        Self {
            throughput_rate: default_throughput_rate(),
            interference_penalty: default_interference_penalty(),
            complexity_rate: default_complexity_rate(),
            frame_us: default_frame_us(),
            target_pfa: default_target_pfa(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BanditSimConfig {
    pub plan: Vec<PlanSectionConfig>,
    pub actions_us: Vec<f64>,
    pub policies: Vec<PolicyConfig>,
    pub bank: BankConfig,
    #[serde(default)]
    pub weights: Option<WeightsConfig>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_alpha_lr")]
    pub alpha_lr: f64,
    #[serde(default = "default_alpha_pr")]
    pub alpha_pr: f64,
    #[serde(default = "default_n_seeds")]
    pub n_seeds: usize,
    #[serde(default = "default_smoothing_window")]
    pub smoothing_window: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_epsilon() -> f64 {
    0.15
}
fn default_alpha_lr() -> f64 {
    0.15
}
fn default_alpha_pr() -> f64 {
    0.1
}
fn default_n_seeds() -> usize {
    10
}
fn default_smoothing_window() -> usize {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RocConfig {
    pub dataset: String,
    pub detector: DetectorConfig,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    /// Restrict H1 statistics to one SNR/GSNR value from the dataset.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_n_points() -> usize {
    101
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PdCurveConfig {
    pub signal: SignalKindConfig,
    pub channel: ChannelKindConfig,
    pub noise: NoiseConfig,
    pub detector: DetectorConfig,
    pub n_samples: usize,
    pub snr_grid_db: Vec<f64>,
    #[serde(default = "default_n_cal")]
    pub n_cal: usize,
    #[serde(default = "default_n_trials")]
    pub n_trials: usize,
    #[serde(default = "default_target_pfa")]
    pub target_pfa: f64,
    #[serde(default = "default_sample_interval_ns")]
    pub sample_interval_ns: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_n_cal() -> usize {
    20_000
}
fn default_n_trials() -> usize {
    2_000
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    /// Architecture token strings, parallel to `input_lengths`.
    pub archs: Vec<String>,
    pub input_lengths: Vec<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct SelfcheckConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// A loaded configuration for one command.
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(untagged)]
pub enum CommandConfig {
    GenData(GenDataConfig),
    Train(TrainConfig),
    NasSearch(NasSearchConfig),
    BanditSim(BanditSimConfig),
    Roc(RocConfig),
    PdCurve(PdCurveConfig),
    Cost(CostConfig),
    Selfcheck(SelfcheckConfig),
}

impl CommandConfig {
    pub fn seed(&self) -> u64 {
        match self {
            CommandConfig::GenData(c) => c.seed,
            CommandConfig::Train(c) => c.seed,
            CommandConfig::NasSearch(c) => c.seed,
            CommandConfig::BanditSim(c) => c.seed,
            CommandConfig::Roc(c) => c.seed,
            CommandConfig::PdCurve(c) => c.seed,
            CommandConfig::Cost(c) => c.seed,
            CommandConfig::Selfcheck(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            CommandConfig::GenData(c) => c.seed = seed,
            CommandConfig::Train(c) => c.seed = seed,
            CommandConfig::NasSearch(c) => c.seed = seed,
            CommandConfig::BanditSim(c) => c.seed = seed,
            CommandConfig::Roc(c) => c.seed = seed,
            CommandConfig::PdCurve(c) => c.seed = seed,
            CommandConfig::Cost(c) => c.seed = seed,
            CommandConfig::Selfcheck(c) => c.seed = seed,
        }
    }

    /// Serializes the fully resolved configuration.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| CliError::Runtime(e.to_string()))
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

/// Parses a command's configuration text, rejecting unknown keys with a
/// diagnostic that names the offending key and location.
pub fn parse_config(kind: CommandKind, text: &str) -> Result<CommandConfig> {
    Ok(match kind {
        CommandKind::GenData => CommandConfig::GenData(parse(text)?),
        CommandKind::Train => CommandConfig::Train(parse(text)?),
        CommandKind::NasSearch => CommandConfig::NasSearch(parse(text)?),
        CommandKind::BanditSim => CommandConfig::BanditSim(parse(text)?),
        CommandKind::Roc => CommandConfig::Roc(parse(text)?),
        CommandKind::PdCurve => CommandConfig::PdCurve(parse(text)?),
        CommandKind::Cost => CommandConfig::Cost(parse(text)?),
        CommandKind::Selfcheck => CommandConfig::Selfcheck(parse(text)?),
    })
}

/// Loads and validates a configuration file for the command.
pub fn load_config(kind: CommandKind, path: &Path) -> Result<CommandConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(kind, &text)
}
