//! Configuration and reproducibility contracts of the experiment runner.

use std::fs;

use specsense::commands;
use specsense::config::{parse_config, CommandConfig, CommandKind};
use specsense::manifest::verify_manifest;
use specsense::presets::preset;

fn tmp_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("specsense-tests").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

const GEN_DATA_MINIMAL: &str = r#"
signal = "gaussian"
channel = "flat"
n_samples = 32
h0_count = 40
h1_count = 40
snr_grid_db = [10.0, 20.0]

[noise]
kind = "cscwg"
variance = 1.0
"#;

#[test]
fn minimal_config_fills_defaults() {
    let config = parse_config(CommandKind::GenData, GEN_DATA_MINIMAL).unwrap();
    match &config {
        CommandConfig::GenData(c) => {
            assert_eq!(c.seed, 1, "default seed");
            assert_eq!(c.sample_interval_ns, 50.0, "default sample interval");
        }
        _ => panic!("wrong variant"),
    }
}

#[test]
fn misspelled_key_is_rejected_by_name() {
    let text = r#"
plan = [{ frames = 10, hypothesis = "H0" }]
actions_us = [8.0, 32.0]
policies = [{ kind = "egreedy" }]
epislon = 0.2

[bank]
kind = "fixed"
pd = [0.5, 0.9]
"#;
    let err = parse_config(CommandKind::BanditSim, text).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("epislon"), "diagnostic must name the key: {msg}");
}

#[test]
fn effective_config_round_trips() {
    let config = parse_config(CommandKind::GenData, GEN_DATA_MINIMAL).unwrap();
    let emitted = config.to_toml().unwrap();
    let reloaded = parse_config(CommandKind::GenData, &emitted).unwrap();
    assert_eq!(config, reloaded);

    // Presets round-trip the same way.
    for name in ["dataset1", "dataset2", "dataset3"] {
        let p = preset(CommandKind::GenData, name).unwrap();
        let again = parse_config(CommandKind::GenData, &p.to_toml().unwrap()).unwrap();
        assert_eq!(p, again);
    }
    let p = preset(CommandKind::BanditSim, "bandit-four-arm").unwrap();
    let again = parse_config(CommandKind::BanditSim, &p.to_toml().unwrap()).unwrap();
    assert_eq!(p, again);
}

#[test]
fn unknown_preset_lists_alternatives() {
    let err = preset(CommandKind::GenData, "dataset9").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("dataset1") && msg.contains("dataset9"), "{msg}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let config = parse_config(CommandKind::GenData, GEN_DATA_MINIMAL).unwrap();
    let dir_a = tmp_dir("det-a");
    let dir_b = tmp_dir("det-b");
    commands::run(&config, &dir_a).unwrap();
    commands::run(&config, &dir_b).unwrap();
    for name in ["dataset.cgsd", "effective-config.toml"] {
        let a = fs::read(dir_a.join(name)).unwrap();
        let b = fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    // A different seed changes the dataset.
    let mut other = config.clone();
    other.set_seed(99);
    let dir_c = tmp_dir("det-c");
    commands::run(&other, &dir_c).unwrap();
    assert_ne!(
        fs::read(dir_a.join("dataset.cgsd")).unwrap(),
        fs::read(dir_c.join("dataset.cgsd")).unwrap()
    );
}

#[test]
fn manifest_digests_verify() {
    let config = parse_config(CommandKind::GenData, GEN_DATA_MINIMAL).unwrap();
    let dir = tmp_dir("manifest");
    let manifest = commands::run(&config, &dir).unwrap();
    assert_eq!(manifest.outputs.len(), 2);
    verify_manifest(&dir).unwrap();

    // Tampering with an output breaks verification.
    let victim = dir.join("dataset.cgsd");
    let mut bytes = fs::read(&victim).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xFF;
    fs::write(&victim, bytes).unwrap();
    assert!(verify_manifest(&dir).is_err());
}

#[test]
fn bandit_sim_runs_fixed_bank_end_to_end() {
    let text = r#"
plan = [
  { frames = 60, hypothesis = "H1", gsnr_db = 10.0 },
  { frames = 40, hypothesis = "H0" },
]
actions_us = [8.0, 32.0]
policies = [
  { kind = "egreedy" },
  { kind = "always", arm = 0 },
]
n_seeds = 2
seed = 7

[bank]
kind = "fixed"
pd = [0.6, 0.95]
"#;
    let config = parse_config(CommandKind::BanditSim, text).unwrap();
    let dir = tmp_dir("bandit");
    commands::run(&config, &dir).unwrap();
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert!(summary.starts_with("policy,mean_average_reward\n"));
    assert_eq!(summary.lines().count(), 3);
    let trace = fs::read_to_string(dir.join("trace_egreedy-a2.csv")).unwrap();
    assert!(trace
        .starts_with("frame,section,gsnr_db,hypothesis,action_id,decision,reward,smoothed_reward"));
    assert_eq!(trace.lines().count(), 101);
}

#[test]
fn four_arm_preset_summary_favors_adaptive_policies() {
    // The stock four-arm scenario: both epsilon-greedy rows must beat the
    // always-short baseline in the emitted summary.
    let config = preset(CommandKind::BanditSim, "bandit-four-arm").unwrap();
    let dir = tmp_dir("four-arm");
    commands::run(&config, &dir).unwrap();
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    let value = |label: &str| -> f64 {
        summary
            .lines()
            .find(|l| l.starts_with(label))
            .unwrap_or_else(|| panic!("no row {label} in {summary}"))
            .rsplit(',')
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    let always_short = value("always-a0");
    assert!(value("egreedy-a4") > always_short);
    assert!(value("egreedy-a2") > always_short);
}

#[test]
fn cost_preset_reproduces_reported_values() {
    let config = preset(CommandKind::Cost, "cost-table").unwrap();
    let dir = tmp_dir("cost");
    commands::run(&config, &dir).unwrap();
    let text = fs::read_to_string(dir.join("cost.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].contains("38464") && lines[1].contains("513"));
    assert!(lines[2].contains("4853776") && lines[2].contains("30577"));
    assert!(lines[3].contains("27074624") && lines[3].contains("42665"));
}

#[test]
fn exit_codes_distinguish_config_and_runtime_errors() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_specsense");

    // Config error: malformed TOML file.
    let dir = tmp_dir("exit-codes");
    let bad_config = dir.join("bad.toml");
    fs::write(&bad_config, "epislon = definitely not toml").unwrap();
    let status = Command::new(bin)
        .args(["gen-data", "--config"])
        .arg(&bad_config)
        .arg("--out")
        .arg(dir.join("o1"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Runtime error: valid config pointing at a missing dataset.
    let roc_config = dir.join("roc.toml");
    fs::write(&roc_config, "dataset = \"/nonexistent.cgsd\"\n[detector]\nkind = \"ed\"\n").unwrap();
    let status = Command::new(bin)
        .args(["roc", "--config"])
        .arg(&roc_config)
        .arg("--out")
        .arg(dir.join("o2"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));

    // Success path.
    let ok_config = dir.join("ok.toml");
    fs::write(&ok_config, GEN_DATA_MINIMAL).unwrap();
    let status = Command::new(bin)
        .args(["gen-data", "--config"])
        .arg(&ok_config)
        .arg("--out")
        .arg(dir.join("o3"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    // Unknown flags are clap's domain and also exit 2.
    let status = Command::new(bin).args(["gen-data", "--bogus"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn live_bank_config_accepted() {
    let text = r#"
plan = [
  { frames = 10, hypothesis = "H1", gsnr_db = 5.0 },
  { frames = 10, hypothesis = "H0" },
]
actions_us = [8.0, 32.0]
policies = [{ kind = "egreedy" }]
n_seeds = 1
seed = 3

[bank]
kind = "live"
signal = "gaussian"
channel = "flat"
n_cal = 500

[bank.noise]
kind = "cscwg"
variance = 1.0

[bank.detector]
kind = "ed"
"#;
    let config = parse_config(CommandKind::BanditSim, text).unwrap();
    let dir = tmp_dir("live-bank");
    commands::run(&config, &dir).unwrap();
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
}
