use cnn_engine::{count_cost, ArchSpec};

use crate::config::CostConfig;
use crate::csvout::{emit_csv, Value};
use crate::manifest::ManifestBuilder;
use crate::{CliError, Result};

pub fn run(config: &CostConfig, manifest: &mut ManifestBuilder) -> Result<()> {
    if config.archs.len() != config.input_lengths.len() {
        return Err(CliError::Config(format!(
            "{} architectures but {} input lengths",
            config.archs.len(),
            config.input_lengths.len()
        )));
    }
    let mut rows = Vec::with_capacity(config.archs.len());
    for (tokens, &n) in config.archs.iter().zip(&config.input_lengths) {
        let arch = ArchSpec::parse_tokens(tokens).map_err(CliError::runtime)?;
        let cost = count_cost(&arch, n);
        rows.push(vec![
            Value::from(arch.tokens()),
            Value::from(n),
            Value::UInt(cost.rrm),
            Value::UInt(cost.weights),
            Value::from(cost.rrm_millions()),
            Value::from(cost.weights_thousands()),
        ]);
    }
    let path = manifest.declare("cost.csv");
    emit_csv(
        &path,
        &["arch", "input_length", "rrm", "weights", "rrm_millions", "weights_thousands"],
        &rows,
    )?;
    eprintln!("cost: {} architectures reported", config.archs.len());
    Ok(())
}
