use signal_engine::{build_dataset, write_dataset, DatasetSpec};

use crate::config::GenDataConfig;
use crate::manifest::ManifestBuilder;
use crate::{CliError, Result};

pub fn run(config: &GenDataConfig, manifest: &mut ManifestBuilder) -> Result<()> {
    let spec = DatasetSpec {
        signal_kind: config.signal.to_kind(),
        noise: config.noise.to_spec(),
        channel_kind: config.channel.to_kind(),
        n_samples_per_signal: config.n_samples,
        snr_grid_db: config.snr_grid_db.clone(),
        h0_count: config.h0_count,
        h1_count: config.h1_count,
        sample_interval: config.sample_interval_ns * 1e-9,
        seed: config.seed,
    };
    let dataset = build_dataset(&spec).map_err(CliError::runtime)?;
    let path = manifest.declare("dataset.cgsd");
    write_dataset(&path, &dataset).map_err(CliError::runtime)?;
    eprintln!(
        "gen-data: wrote {} signals of {} samples to {}",
        dataset.len(),
        config.n_samples,
        path.display()
    );
    Ok(())
}
