use std::fs;

use cnn_engine::{kfold_accuracy, ArchSpec};
use nas_qlearn::{
    run_search_resumed, EpsilonSchedule, NasAction, NasConfig, NasState, QEntry, QTable,
};
use serde::{Deserialize, Serialize};
use signal_engine::read_dataset;
use signal_engine::seeds::derive_seed;

use crate::config::{EvaluatorConfig, NasSearchConfig};
use crate::csvout::{emit_csv, Value};
use crate::manifest::ManifestBuilder;
use crate::{CliError, Result};

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    entries: Vec<CheckpointEntry>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointEntry {
    state: String,
    action: String,
    q: f64,
    visits: u64,
}

fn save_checkpoint(path: &std::path::Path, table: &QTable) -> Result<()> {
    let entries = table
        .iter()
        .map(|((state, action), entry)| CheckpointEntry {
            state: state.key(),
            action: action.token(),
            q: entry.q,
            visits: entry.visits,
        })
        .collect();
    let text = serde_json::to_string_pretty(&Checkpoint { version: 1, entries })
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

fn load_checkpoint(path: &str) -> Result<QTable> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read checkpoint {path}: {e}")))?;
    let checkpoint: Checkpoint =
        serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    if checkpoint.version != 1 {
        return Err(CliError::Config(format!(
            "unsupported checkpoint version {}",
            checkpoint.version
        )));
    }
    let mut table = QTable::new();
    for e in checkpoint.entries {
        let state = NasState::parse_key(&e.state).map_err(CliError::runtime)?;
        let action = NasAction::parse_token(&e.action).map_err(CliError::runtime)?;
        table
            .insert(state, action, QEntry { q: e.q, visits: e.visits })
            .map_err(CliError::runtime)?;
    }
    Ok(table)
}

pub fn run(config: &NasSearchConfig, manifest: &mut ManifestBuilder) -> Result<()> {
    // Resolve the evaluator first: the k-fold variant pins the input
    // length to its dataset.
    let mut dataset = None;
    let input_length = match &config.evaluator {
        EvaluatorConfig::Planted { .. } => config.input_length.ok_or_else(|| {
            CliError::Config("planted evaluators need an explicit input_length".into())
        })?,
        EvaluatorConfig::Kfold { dataset: path, .. } => {
            let data = read_dataset(path).map_err(CliError::runtime)?;
            let n = data.signals()[0].len();
            if let Some(requested) = config.input_length {
                if requested != n {
                    return Err(CliError::Config(format!(
                        "input_length {requested} does not match dataset signals of {n}"
                    )));
                }
            }
            dataset = Some(data);
            n
        }
    };

    let nas_config = NasConfig {
        max_layers: config.max_layers,
        min_length: config.min_length,
        input_length,
        filter_counts: config.filter_counts.clone(),
        filter_sizes: config.filter_sizes.clone(),
        pool_sizes: config.pool_sizes.clone(),
        episodes: config.episodes,
        epsilon: EpsilonSchedule::Linear { decay_fraction: config.epsilon_decay_fraction },
        q_init: config.q_init,
        discount: config.discount,
        cache_rewards: config.cache_rewards,
    };

    let initial = match &config.resume {
        Some(path) => load_checkpoint(path)?,
        None => QTable::new(),
    };

    // Rewards are deterministic in the master seed: the k-fold evaluator
    // reuses one derived seed so every architecture faces the same folds.
    let eval_seed = derive_seed(config.seed, 1);
    let outcome = match &config.evaluator {
        EvaluatorConfig::Planted { arch, floor } => {
            let planted = ArchSpec::parse_tokens(arch).map_err(CliError::runtime)?;
            let floor = *floor;
            if !(0.0..=0.5).contains(&floor) {
                return Err(CliError::Config(format!(
                    "planted floor must lie in [0, 0.5], got {floor}"
                )));
            }
            run_search_resumed(&nas_config, initial, derive_seed(config.seed, 0), |arch| {
                Ok(if *arch == planted { 1.0 } else { floor })
            })
        }
        EvaluatorConfig::Kfold { k, epochs, .. } => {
            let data = dataset.as_ref().expect("dataset loaded above");
            let (k, epochs) = (*k, *epochs);
            run_search_resumed(&nas_config, initial, derive_seed(config.seed, 0), |arch| {
                kfold_accuracy(arch, data, k, epochs, eval_seed).map_err(|e| e.to_string())
            })
        }
    }
    .map_err(CliError::runtime)?;

    let qtable_path = manifest.declare("qtable.json");
    save_checkpoint(&qtable_path, &outcome.table)?;

    let rows: Vec<Vec<Value>> = outcome
        .episodes
        .iter()
        .map(|r| {
            vec![
                Value::from(r.episode),
                Value::from(r.epsilon),
                Value::from(r.arch_tokens.clone()),
                Value::from(r.reward),
            ]
        })
        .collect();
    let episodes_path = manifest.declare("episodes.csv");
    emit_csv(&episodes_path, &["episode", "epsilon", "arch_tokens", "reward"], &rows)?;

    let best = outcome.best_arch(&nas_config).map_err(CliError::runtime)?;
    let best_path = manifest.declare("best.txt");
    fs::write(&best_path, format!("{}\n", best.tokens()))?;
    eprintln!("nas-search: best architecture {}", best.tokens());
    Ok(())
}
