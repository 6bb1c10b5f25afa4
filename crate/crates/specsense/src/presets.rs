//! Named presets: the published dataset recipes, search constants, and
//! scenario plans as one-flag invocations.

use crate::config::{
    BankConfig, BanditSimConfig, ChannelKindConfig, CommandConfig, CommandKind, CostConfig,
    EvaluatorConfig, GenDataConfig, NasSearchConfig, NoiseConfig, PdCurveConfig,
    PlanSectionConfig, PolicyConfig, SignalKindConfig, DetectorConfig,
};
use crate::{CliError, Result};

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut v = start;
    while v <= stop + 1e-9 {
        out.push(v);
        v += step;
    }
    out
}

/// Gaussian signal in CSCWG noise over a flat Rayleigh channel: 20K + 20K
/// signals of 100 samples, SNR -20..18 dB in 2 dB steps.
fn dataset1() -> GenDataConfig {
    GenDataConfig {
        signal: SignalKindConfig::Gaussian,
        channel: ChannelKindConfig::Flat,
        noise: NoiseConfig::Cscwg { variance: 1.0 },
        n_samples: 100,
        h0_count: 20_000,
        h1_count: 20_000,
        snr_grid_db: grid(-20.0, 18.0, 2.0),
        sample_interval_ns: 50.0,
        seed: 1,
    }
}

/// OFDM in isotropic alpha-stable noise (alpha 1.25, unit dispersion) over
/// an EPA channel: 15K + 15K signals of 160 samples (two OFDM symbols),
/// GSNR -5..24 dB.
fn dataset2() -> GenDataConfig {
    GenDataConfig {
        signal: SignalKindConfig::Ofdm,
        channel: ChannelKindConfig::Epa,
        noise: NoiseConfig::Sas { alpha: 1.25, dispersion: 1.0 },
        n_samples: 160,
        h0_count: 15_000,
        h1_count: 15_000,
        snr_grid_db: grid(-5.0, 24.0, 1.0),
        sample_interval_ns: 50.0,
        seed: 2,
    }
}

/// As dataset2 with the quadrupled 640-sample sensing window and GSNR
/// -10..20 dB.
fn dataset3() -> GenDataConfig {
    GenDataConfig {
        n_samples: 640,
        snr_grid_db: grid(-10.0, 20.0, 1.0),
        seed: 3,
        ..dataset2()
    }
}

/// Architecture search against a synthetic planted optimum; exercises the
/// full search loop in seconds.
fn nas_planted() -> NasSearchConfig {
    NasSearchConfig {
        evaluator: EvaluatorConfig::Planted { arch: "C32x5,GAP".to_string(), floor: 0.3 },
        episodes: 3000,
        max_layers: 8,
        min_length: 8,
        input_length: Some(100),
        filter_counts: vec![8, 16, 32, 64],
        filter_sizes: vec![3, 5],
        pool_sizes: vec![2, 4],
        q_init: 0.5,
        discount: 1.0,
        cache_rewards: true,
        epsilon_decay_fraction: 0.9,
        resume: None,
        seed: 1,
    }
}

fn h1(frames: usize, gsnr_db: f64) -> PlanSectionConfig {
    PlanSectionConfig { frames, hypothesis: "H1".to_string(), gsnr_db: Some(gsnr_db) }
}

fn h0(frames: usize) -> PlanSectionConfig {
    PlanSectionConfig { frames, hypothesis: "H0".to_string(), gsnr_db: None }
}

/// Two-arm non-stationary scenario: five 200-frame sections, epsilon-greedy
/// against gradient-bandit and the fixed policies.
fn bandit_two_arm() -> BanditSimConfig {
    BanditSimConfig {
        plan: vec![h1(200, 15.0), h1(200, 8.0), h1(200, 0.0), h1(200, -5.0), h0(200)],
        actions_us: vec![8.0, 32.0],
        policies: vec![
            PolicyConfig { kind: "egreedy".into(), arm: None, arms: None, label: None },
            PolicyConfig { kind: "gb".into(), arm: None, arms: None, label: None },
            PolicyConfig { kind: "always".into(), arm: Some(0), arms: None, label: None },
            PolicyConfig { kind: "always".into(), arm: Some(1), arms: None, label: None },
        ],
        bank: BankConfig::Logistic { midpoints_db: vec![8.0, 4.5], width_db: 2.0 },
        weights: None,
        epsilon: 0.15,
        alpha_lr: 0.15,
        alpha_pr: 0.1,
        n_seeds: 10,
        smoothing_window: 20,
        seed: 1,
    }
}

/// Four-arm scenario: eight 100-frame sections with GSNR stepping down
/// from 30 dB; epsilon-greedy over the full menu and over the two-arm
/// subset against every fixed policy.
fn bandit_four_arm() -> BanditSimConfig {
    BanditSimConfig {
        plan: vec![
            h1(100, 30.0),
            h1(100, 25.0),
            h1(100, 20.0),
            h1(100, 15.0),
            h1(100, 10.0),
            h1(100, 5.0),
            h1(100, 0.0),
            h0(100),
        ],
        actions_us: vec![8.0, 16.0, 24.0, 32.0],
        policies: vec![
            PolicyConfig { kind: "egreedy".into(), arm: None, arms: None, label: None },
            PolicyConfig {
                kind: "egreedy".into(),
                arm: None,
                arms: Some(vec![0, 3]),
                label: Some("egreedy-a2".into()),
            },
            PolicyConfig { kind: "always".into(), arm: Some(0), arms: None, label: None },
            PolicyConfig { kind: "always".into(), arm: Some(1), arms: None, label: None },
            PolicyConfig { kind: "always".into(), arm: Some(2), arms: None, label: None },
            PolicyConfig { kind: "always".into(), arm: Some(3), arms: None, label: None },
        ],
        bank: BankConfig::Logistic { midpoints_db: vec![8.0, 6.5, 5.5, 4.5], width_db: 2.0 },
        weights: None,
        epsilon: 0.15,
        alpha_lr: 0.15,
        alpha_pr: 0.1,
        n_seeds: 10,
        smoothing_window: 20,
        seed: 1,
    }
}

/// The three reported architectures at their dataset input lengths.
fn cost_table() -> CostConfig {
    CostConfig {
        archs: vec![
            "C64x3,GAP".to_string(),
            "C64x3,C64x3,C32x5,C32x5,C16x3,C16x3,GAP".to_string(),
            "C32x3,C32x3,C64x5,C64x5,C16x5,C16x5,C8x3,C64x3,GAP".to_string(),
        ],
        input_lengths: vec![100, 160, 640],
        seed: 1,
    }
}

/// FLOM detection probability against GSNR at the short sensing window.
fn pd_flom() -> PdCurveConfig {
    PdCurveConfig {
        signal: SignalKindConfig::Ofdm,
        channel: ChannelKindConfig::Epa,
        noise: NoiseConfig::Sas { alpha: 1.25, dispersion: 1.0 },
        detector: DetectorConfig::Flom { p: 1.0 },
        n_samples: 160,
        snr_grid_db: grid(-10.0, 24.0, 2.0),
        n_cal: 20_000,
        n_trials: 2_000,
        target_pfa: 0.01,
        sample_interval_ns: 50.0,
        seed: 1,
    }
}

/// Resolves a preset name for a command.
pub fn preset(kind: CommandKind, name: &str) -> Result<CommandConfig> {
    let config = match (kind, name) {
        (CommandKind::GenData, "dataset1") => CommandConfig::GenData(dataset1()),
        (CommandKind::GenData, "dataset2") => CommandConfig::GenData(dataset2()),
        (CommandKind::GenData, "dataset3") => CommandConfig::GenData(dataset3()),
        (CommandKind::NasSearch, "nas-planted") => CommandConfig::NasSearch(nas_planted()),
        (CommandKind::BanditSim, "bandit-two-arm") => CommandConfig::BanditSim(bandit_two_arm()),
        (CommandKind::BanditSim, "bandit-four-arm") => CommandConfig::BanditSim(bandit_four_arm()),
        (CommandKind::Cost, "cost-table") => CommandConfig::Cost(cost_table()),
        (CommandKind::PdCurve, "pd-flom") => CommandConfig::PdCurve(pd_flom()),
        _ => {
            return Err(CliError::Config(format!(
                "no preset `{name}` for command {}; available: {}",
                kind.name(),
                preset_names(kind).join(", ")
            )))
        }
    };
    Ok(config)
}

/// Preset names available for a command.
pub fn preset_names(kind: CommandKind) -> Vec<&'static str> {
    match kind {
        CommandKind::GenData => vec!["dataset1", "dataset2", "dataset3"],
        CommandKind::NasSearch => vec!["nas-planted"],
        CommandKind::BanditSim => vec!["bandit-two-arm", "bandit-four-arm"],
        CommandKind::Cost => vec!["cost-table"],
        CommandKind::PdCurve => vec!["pd-flom"],
        _ => vec![],
    }
}
