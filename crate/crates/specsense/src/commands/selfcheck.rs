//! Fast end-to-end sanity checks across all modules.

use cnn_engine::{build_network, count_cost, grad_check, ArchSpec};
use detectors::{calibrate_threshold, energy_stat};
use nas_qlearn::{count_search_space, NasConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensing_bandit::{expected_reward, RewardWeights, SensingAction};
use signal_engine::seeds::derive_seed;
use signal_engine::{gen_cscwg_noise, gen_ofdm_burst, Hypothesis};

use crate::config::SelfcheckConfig;
use crate::csvout::{emit_csv, Value};
use crate::manifest::ManifestBuilder;
use crate::{CliError, Result};

fn check_cost_table() -> std::result::Result<(), String> {
    let rows = [
        ("C64x3,GAP", 100usize, 0.038, 0.5),
        ("C64x3,C64x3,C32x5,C32x5,C16x3,C16x3,GAP", 160, 4.854, 30.6),
        ("C32x3,C32x3,C64x5,C64x5,C16x5,C16x5,C8x3,C64x3,GAP", 640, 27.075, 42.7),
    ];
    for (tokens, n, rrm_m, w_k) in rows {
        let cost = count_cost(&ArchSpec::parse_tokens(tokens).map_err(|e| e.to_string())?, n);
        let got_m = (cost.rrm_millions() * 1000.0).round() / 1000.0;
        let got_k = (cost.weights_thousands() * 10.0).round() / 10.0;
        if got_m != rrm_m || got_k != w_k {
            return Err(format!("{tokens}: ({got_m}M, {got_k}K) expected ({rrm_m}M, {w_k}K)"));
        }
    }
    Ok(())
}

fn check_search_space() -> std::result::Result<(), String> {
    let count = count_search_space(&NasConfig::paper_default(100)).map_err(|e| e.to_string())?;
    if !(16_777_216..=214_358_881).contains(&count) {
        return Err(format!("count {count} outside [8^8, 11^8]"));
    }
    Ok(())
}

fn check_expected_rewards() -> std::result::Result<(), String> {
    let w = RewardWeights::default();
    let short = SensingAction::at_50ns(0, 8.0);
    let long = SensingAction::at_50ns(1, 32.0);
    let cases = [
        (expected_reward(&short, Hypothesis::H0, 0.0, &w), 6.878),
        (expected_reward(&long, Hypothesis::H0, 0.0, &w), 3.752),
        (expected_reward(&short, Hypothesis::H1, 0.01, &w), -20.05),
        (expected_reward(&long, Hypothesis::H1, 0.01, &w), -20.80),
        (expected_reward(&short, Hypothesis::H1, 0.5, &w), -10.25),
        (expected_reward(&long, Hypothesis::H1, 0.95, &w), -2.0),
    ];
    for (got, want) in cases {
        if (got - want).abs() > 1e-9 {
            return Err(format!("expected reward {got} but the closed form gives {want}"));
        }
    }
    Ok(())
}

fn check_cyclic_prefix() -> std::result::Result<(), String> {
    let burst = gen_ofdm_burst(4, 7).map_err(|e| e.to_string())?;
    for sym in 0..4 {
        let base = sym * 80;
        for k in 0..16 {
            let d = (burst.samples()[base + k] - burst.samples()[base + k + 64]).norm();
            if d > 1e-12 {
                return Err(format!("cyclic prefix broken at symbol {sym}, offset {k}"));
            }
        }
    }
    Ok(())
}

fn check_calibration(seed: u64) -> std::result::Result<(), String> {
    let stats: Vec<f64> = (0..20_000)
        .map(|i| {
            energy_stat(&gen_cscwg_noise(100, 1.0, derive_seed(seed, i)).expect("valid args"))
        })
        .collect();
    let thr = calibrate_threshold(&stats, 0.05).map_err(|e| e.to_string())?;
    let fresh: Vec<f64> = (0..20_000)
        .map(|i| {
            energy_stat(
                &gen_cscwg_noise(100, 1.0, derive_seed(seed, 1_000_000 + i)).expect("valid args"),
            )
        })
        .collect();
    let pfa = fresh.iter().filter(|&&s| s > thr.value).count() as f64 / fresh.len() as f64;
    if !(0.03..=0.07).contains(&pfa) {
        return Err(format!("realized pfa {pfa} far from the 0.05 target"));
    }
    Ok(())
}

fn check_gradients(seed: u64) -> std::result::Result<(), String> {
    let arch = ArchSpec::parse_tokens("C4x3,P2,C3x5,GAP").map_err(|e| e.to_string())?;
    let net = build_network(&arch, 16, seed).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2));
    let input: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..16).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
        .collect();
    let err = grad_check(&net, &input, 1.0, 1e-5).map_err(|e| e.to_string())?;
    if err >= 1e-5 {
        return Err(format!("gradient error {err} at or above 1e-5"));
    }
    Ok(())
}

pub fn run(config: &SelfcheckConfig, manifest: &mut ManifestBuilder) -> Result<()> {
    let checks: Vec<(&str, std::result::Result<(), String>)> = vec![
        ("cost-table", check_cost_table()),
        ("search-space-bound", check_search_space()),
        ("expected-rewards", check_expected_rewards()),
        ("ofdm-cyclic-prefix", check_cyclic_prefix()),
        ("detector-calibration", check_calibration(config.seed)),
        ("cnn-gradients", check_gradients(config.seed)),
    ];

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (name, outcome) in &checks {
        match outcome {
            Ok(()) => {
                eprintln!("selfcheck: {name} ... ok");
                rows.push(vec![Value::from(*name), Value::from("ok")]);
            }
            Err(msg) => {
                eprintln!("selfcheck: {name} ... FAIL ({msg})");
                rows.push(vec![Value::from(*name), Value::from(format!("FAIL: {msg}"))]);
                failures.push(name.to_string());
            }
        }
    }
    let path = manifest.declare("selfcheck.csv");
    emit_csv(&path, &["check", "status"], &rows)?;
    if !failures.is_empty() {
        return Err(CliError::Runtime(format!("selfcheck failed: {}", failures.join(", "))));
    }
    Ok(())
}
