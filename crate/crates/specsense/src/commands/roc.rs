use detectors::roc_curve;
use signal_engine::{read_dataset, Hypothesis};

use crate::config::RocConfig;
use crate::csvout::{emit_csv, Value};
use crate::manifest::ManifestBuilder;
use crate::{CliError, Result};

pub fn run(config: &RocConfig, manifest: &mut ManifestBuilder) -> Result<()> {
    let dataset = read_dataset(&config.dataset).map_err(CliError::runtime)?;
    let detector = config.detector.to_kind();
    let n_samples = dataset.signals()[0].len();

    let mut h0_stats = Vec::new();
    let mut h1_stats = Vec::new();
    for ((signal, label), snr) in dataset
        .signals()
        .iter()
        .zip(dataset.labels())
        .zip(dataset.snr_db())
    {
        let stat = detector.statistic(signal).map_err(CliError::runtime)?;
        match label {
            Hypothesis::H0 => h0_stats.push(stat),
            Hypothesis::H1 => {
                // Optional restriction to a single SNR slice (container
                // values are f32, so compare with a loose tolerance).
                if config
                    .snr_db
                    .map(|want| snr.map(|s| (s - want).abs() < 1e-3).unwrap_or(false))
                    .unwrap_or(true)
                {
                    h1_stats.push(stat);
                }
            }
        }
    }
    let curve = roc_curve(&h0_stats, &h1_stats, config.n_points).map_err(CliError::runtime)?;

    let rows: Vec<Vec<Value>> = curve
        .iter()
        .map(|p| {
            vec![
                Value::from(detector.name()),
                Value::from(n_samples),
                config.snr_db.map(Value::Float).unwrap_or(Value::Missing),
                Value::from(p.pfa),
                Value::from(p.pd),
            ]
        })
        .collect();
    let path = manifest.declare("roc.csv");
    emit_csv(&path, &["detector", "n_samples", "snr_db", "pfa", "pd"], &rows)?;
    eprintln!(
        "roc: {} points over {} H0 / {} H1 statistics",
        curve.len(),
        h0_stats.len(),
        h1_stats.len()
    );
    Ok(())
}
