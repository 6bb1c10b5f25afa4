//! Backpropagation, adaptive-moment training, and K-fold evaluation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use signal_engine::seeds::derive_seed;
use signal_engine::{Hypothesis, LabeledDataset};

use crate::arch::ArchSpec;
use crate::error::CnnError;
use crate::network::{build_network, sigmoid, ForwardCache, Network, RtLayer};
use crate::Result;

pub(crate) const LEARNING_RATE: f64 = 1e-3;
pub(crate) const BATCH_SIZE: usize = 64;
const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// Stable binary cross-entropy from the logit.
pub(crate) fn bce_loss(logit: f64, label: f64) -> f64 {
    // ln(1 + e^z) - y*z, computed without overflow.
    let softplus = logit.max(0.0) + (-logit.abs()).exp().ln_1p();
    softplus - label * logit
}

/// Per-epoch training record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean training loss per epoch.
    pub epoch_losses: Vec<f64>,
    /// Held-out accuracy per epoch; empty when no validation set was given.
    pub val_accuracies: Vec<f64>,
}

impl TrainReport {
    pub fn final_loss(&self) -> f64 {
        *self.epoch_losses.last().expect("at least one epoch")
    }
}

/// Gradient of the loss for one sample, flattened in parameter order.
pub(crate) fn backward(network: &Network, cache: &ForwardCache, label: f64) -> Vec<f64> {
    let mut grads = vec![0.0; network.parameter_count()];
    let dz = sigmoid(cache.logit) - label;

    // Classifier block sits at the end of the flat layout.
    let n_last = network.classifier_weights.len();
    let cls_base = network.parameter_count() - n_last - 1;
    for (i, g) in cache.gap_out.iter().enumerate() {
        grads[cls_base + i] = dz * g;
    }
    grads[cls_base + n_last] = dz;

    // Gradient flowing into the GAP input.
    let gap_input = cache.layer_inputs.last().expect("gap always has an input");
    let time = gap_input[0].len();
    let mut dcurrent: Vec<Vec<f64>> = network
        .classifier_weights
        .iter()
        .map(|w| vec![dz * w / time as f64; time])
        .collect();

    // Walk conv/pool layers backward; the final layer (GAP) is done above.
    let mut param_base = cls_base;
    for (li, layer) in network.layers.iter().enumerate().rev().skip(1) {
        match layer {
            RtLayer::Pool { .. } => {
                let input = &cache.layer_inputs[li];
                let argmax = cache.pool_argmax[li].as_ref().expect("pool cache");
                let mut dinput: Vec<Vec<f64>> =
                    input.iter().map(|ch| vec![0.0; ch.len()]).collect();
                for (c, dch) in dcurrent.iter().enumerate() {
                    for (w, &d) in dch.iter().enumerate() {
                        dinput[c][argmax[c][w]] += d;
                    }
                }
                dcurrent = dinput;
            }
            RtLayer::Conv(conv) => {
                param_base -= conv.weights.len() + conv.bias.len();
                let input = &cache.layer_inputs[li];
                let pre = cache.conv_preacts[li].as_ref().expect("conv cache");
                let n = input[0].len();
                let pad = (conv.kernel_size - 1) / 2;

                // ReLU gate on the output gradient.
                let mut dpre = dcurrent;
                for (f, ch) in dpre.iter_mut().enumerate() {
                    for (t, d) in ch.iter_mut().enumerate() {
                        if pre[f][t] <= 0.0 {
                            *d = 0.0;
                        }
                    }
                }

                let wbase = param_base;
                let bbase = param_base + conv.weights.len();
                let mut dinput: Vec<Vec<f64>> = vec![vec![0.0; n]; conv.in_channels];
                for f in 0..conv.n_filters {
                    let dch = &dpre[f];
                    grads[bbase + f] += dch.iter().sum::<f64>();
                    for c in 0..conv.in_channels {
                        let x = &input[c];
                        let widx = (f * conv.in_channels + c) * conv.kernel_size;
                        for j in 0..conv.kernel_size {
                            let mut acc = 0.0;
                            let w = conv.weights[widx + j];
                            for (t, &d) in dch.iter().enumerate() {
                                let s = t + j;
                                if s >= pad && s - pad < n {
                                    acc += d * x[s - pad];
                                    dinput[c][s - pad] += d * w;
                                }
                            }
                            grads[wbase + widx + j] = acc;
                        }
                    }
                }
                dcurrent = dinput;
            }
            RtLayer::Gap => unreachable!("GAP is terminal"),
        }
    }
    grads
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    fn new(n: usize) -> Self {
        Self { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    fn step(&mut self, grads: &[f64], lr: f64, out: &mut [f64]) {
        self.t += 1;
        let bc1 = 1.0 - ADAM_BETA1.powi(self.t as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.t as i32);
        for i in 0..grads.len() {
            self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * grads[i];
            self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * grads[i] * grads[i];
            let mhat = self.m[i] / bc1;
            let vhat = self.v[i] / bc2;
            out[i] = -lr * mhat / (vhat.sqrt() + ADAM_EPS);
        }
    }
}

fn dataset_inputs(dataset: &LabeledDataset, network: &Network) -> Result<Vec<(Vec<Vec<f64>>, f64)>> {
    dataset
        .signals()
        .iter()
        .zip(dataset.labels())
        .map(|(signal, label)| {
            if signal.len() != network.input_length() {
                return Err(CnnError::InvalidArgument(format!(
                    "signal length {} does not match network input {}",
                    signal.len(),
                    network.input_length()
                )));
            }
            let y = match label {
                Hypothesis::H0 => 0.0,
                Hypothesis::H1 => 1.0,
            };
            Ok((Network::signal_channels(signal), y))
        })
        .collect()
}

/// Trains in place with mini-batch Adam (batch 64, step 1e-3) on binary
/// cross-entropy, recording per-epoch validation accuracy when a held-out
/// set is supplied. Deterministic in `seed`.
pub fn train_with_validation(
    network: &mut Network,
    dataset: &LabeledDataset,
    validation: Option<&LabeledDataset>,
    epochs: usize,
    seed: u64,
) -> Result<TrainReport> {
    if epochs == 0 {
        return Err(CnnError::InvalidArgument("epochs must be >= 1".into()));
    }
    if dataset.count(Hypothesis::H0) == 0 || dataset.count(Hypothesis::H1) == 0 {
        return Err(CnnError::InvalidArgument(
            "training set must contain both hypotheses".into(),
        ));
    }
    let samples = dataset_inputs(dataset, network)?;
    let n_params = network.parameter_count();
    let mut adam = Adam::new(n_params);
    let mut step = vec![0.0; n_params];
    let mut batch_grad = vec![0.0; n_params];
    let mut order: Vec<usize> = (0..samples.len()).collect();

    let mut epoch_losses = Vec::with_capacity(epochs);
    let mut val_accuracies = Vec::new();
    for epoch in 0..epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, epoch as u64));
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(BATCH_SIZE) {
            batch_grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                let (input, label) = &samples[i];
                let cache = network.forward_cached(input)?;
                loss_sum += bce_loss(cache.logit, *label);
                let g = backward(network, &cache, *label);
                for (acc, gi) in batch_grad.iter_mut().zip(&g) {
                    *acc += gi;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            batch_grad.iter_mut().for_each(|g| *g *= scale);
            adam.step(&batch_grad, LEARNING_RATE, &mut step);
            network.apply_step(&step);
        }
        epoch_losses.push(loss_sum / samples.len() as f64);
        if let Some(val) = validation {
            val_accuracies.push(accuracy(network, val)?);
        }
    }
    Ok(TrainReport { epoch_losses, val_accuracies })
}

/// [`train_with_validation`] without a held-out set.
pub fn train(
    network: &mut Network,
    dataset: &LabeledDataset,
    epochs: usize,
    seed: u64,
) -> Result<TrainReport> {
    train_with_validation(network, dataset, None, epochs, seed)
}

/// Fraction of signals classified correctly at threshold 0.5 (probability
/// above 0.5 reads as H1).
pub fn accuracy(network: &Network, dataset: &LabeledDataset) -> Result<f64> {
    if dataset.is_empty() {
        return Err(CnnError::InvalidArgument("cannot score an empty dataset".into()));
    }
    let mut correct = 0usize;
    for (signal, label) in dataset.signals().iter().zip(dataset.labels()) {
        let p = network.forward_signal(signal)?;
        let decided_h1 = p > 0.5;
        let is_h1 = *label == Hypothesis::H1;
        if decided_h1 == is_h1 {
            correct += 1;
        }
    }
    Ok(correct as f64 / dataset.len() as f64)
}

/// Partitions indices 0..n into k near-equal contiguous folds.
pub(crate) fn fold_bounds(n: usize, k: usize) -> Vec<(usize, usize)> {
    (0..k).map(|f| (f * n / k, (f + 1) * n / k)).collect()
}

/// Mean held-out accuracy over a seeded K-fold split: each fold is scored
/// by a fresh network trained on the remaining folds. Fold jobs are
/// independent (fold seeds derive from `(seed, fold)`), so they run in
/// parallel without affecting the result.
pub fn kfold_accuracy(
    arch: &ArchSpec,
    dataset: &LabeledDataset,
    k: usize,
    epochs: usize,
    seed: u64,
) -> Result<f64> {
    if k < 2 {
        return Err(CnnError::InvalidArgument("k-fold needs k >= 2".into()));
    }
    if dataset.len() < k {
        return Err(CnnError::InvalidArgument(format!(
            "dataset of {} cannot be split into {k} folds",
            dataset.len()
        )));
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
    order.shuffle(&mut rng);
    let bounds = fold_bounds(dataset.len(), k);

    let input_length = dataset.signals()[0].len();
    let fold_accs: Vec<f64> = bounds
        .par_iter()
        .enumerate()
        .map(|(f, &(start, end))| -> Result<f64> {
            let val_idx = &order[start..end];
            let train_idx: Vec<usize> = order[..start]
                .iter()
                .chain(&order[end..])
                .copied()
                .collect();
            let train_set = dataset.subset(&train_idx).map_err(to_cnn_err)?;
            let val_set = dataset.subset(val_idx).map_err(to_cnn_err)?;
            let mut network =
                build_network(arch, input_length, derive_seed(seed, 1 + 2 * f as u64))?;
            train(&mut network, &train_set, epochs, derive_seed(seed, 2 + 2 * f as u64))?;
            accuracy(&network, &val_set)
        })
        .collect::<Result<_>>()?;
    Ok(fold_accs.iter().sum::<f64>() / k as f64)
}

fn to_cnn_err(err: signal_engine::SignalError) -> CnnError {
    CnnError::InvalidArgument(err.to_string())
}
