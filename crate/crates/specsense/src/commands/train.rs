use cnn_engine::{build_network, save_network, train_with_validation, ArchSpec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use signal_engine::read_dataset;
use signal_engine::seeds::derive_seed;

use crate::config::TrainConfig;
use crate::csvout::{emit_csv, Value};
use crate::manifest::ManifestBuilder;
use crate::{CliError, Result};

pub fn run(config: &TrainConfig, manifest: &mut ManifestBuilder) -> Result<()> {
    if !(0.0..1.0).contains(&config.val_fraction) {
        return Err(CliError::Config(format!(
            "val_fraction must lie in [0, 1), got {}",
            config.val_fraction
        )));
    }
    let dataset = read_dataset(&config.dataset).map_err(CliError::runtime)?;
    let arch = ArchSpec::parse_tokens(&config.arch).map_err(CliError::runtime)?;
    let input_length = dataset.signals()[0].len();

    // Seeded shuffle, validation slice from the tail.
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0));
    order.shuffle(&mut rng);
    let n_val = (dataset.len() as f64 * config.val_fraction).round() as usize;
    let (val_idx, train_idx) = order.split_at(n_val);
    let train_set = dataset.subset(train_idx).map_err(CliError::runtime)?;
    let val_set = if n_val > 0 {
        Some(dataset.subset(val_idx).map_err(CliError::runtime)?)
    } else {
        None
    };

    let mut network =
        build_network(&arch, input_length, derive_seed(config.seed, 1)).map_err(CliError::runtime)?;
    let report = train_with_validation(
        &mut network,
        &train_set,
        val_set.as_ref(),
        config.epochs,
        derive_seed(config.seed, 2),
    )
    .map_err(CliError::runtime)?;

    let rows: Vec<Vec<Value>> = report
        .epoch_losses
        .iter()
        .enumerate()
        .map(|(epoch, loss)| {
            let val = report
                .val_accuracies
                .get(epoch)
                .map(|a| Value::Float(*a))
                .unwrap_or(Value::Missing);
            vec![Value::from(epoch + 1), Value::from(*loss), val]
        })
        .collect();
    let log_path = manifest.declare("training_log.csv");
    emit_csv(&log_path, &["epoch", "loss", "val_accuracy"], &rows)?;

    let net_path = manifest.declare("network.bin");
    save_network(&net_path, &network).map_err(CliError::runtime)?;
    eprintln!(
        "train: {} epochs on {} signals, final loss {:.6}",
        config.epochs,
        train_set.len(),
        report.final_loss()
    );
    Ok(())
}
