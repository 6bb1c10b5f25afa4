//! Network construction, the forward pass, and serialization.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use signal_engine::ComplexSignal;

use crate::arch::{ArchSpec, LayerSpec};
use crate::error::CnnError;
use crate::{Result, INPUT_CHANNELS};

/// Parameters of one convolution layer. Weights are stored row-major as
/// `[filter][in_channel][tap]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvParams {
    pub n_filters: usize,
    pub kernel_size: usize,
    pub in_channels: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl ConvParams {
    #[inline]
    pub fn weight_index(&self, filter: usize, channel: usize, tap: usize) -> usize {
        (filter * self.in_channels + channel) * self.kernel_size + tap
    }
}

/// Runtime layer of a built network.
#[derive(Debug, Clone, PartialEq)]
pub enum RtLayer {
    Conv(ConvParams),
    Pool { size: usize },
    Gap,
}

/// A built network: architecture plus parameters, bound to one input length.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    arch: ArchSpec,
    input_length: usize,
    /// Input length seen by each layer, plus the final (GAP input) length.
    lengths: Vec<usize>,
    pub layers: Vec<RtLayer>,
    pub classifier_weights: Vec<f64>,
    pub classifier_bias: f64,
}

/// Per-sample activations retained for backpropagation.
pub(crate) struct ForwardCache {
    /// Input to each layer, channels x time.
    pub layer_inputs: Vec<Vec<Vec<f64>>>,
    /// Pre-ReLU activations of conv layers (`None` for pool/GAP slots).
    pub conv_preacts: Vec<Option<Vec<Vec<f64>>>>,
    /// Winning input index per pooling window (`None` for conv/GAP slots).
    pub pool_argmax: Vec<Option<Vec<Vec<usize>>>>,
    pub gap_out: Vec<f64>,
    pub logit: f64,
}

impl ForwardCache {
    pub fn probability(&self) -> f64 {
        sigmoid(self.logit)
    }
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Builds a network with fan-in-scaled Gaussian weights (zero biases),
/// deterministic in the seed. Pool layers must see inputs at least as long
/// as their window.
pub fn build_network(arch: &ArchSpec, input_length: usize, seed: u64) -> Result<Network> {
    if input_length == 0 {
        return Err(CnnError::InvalidArgument("input length must be >= 1".into()));
    }
    // Resolve per-layer lengths first so shape errors surface before any
    // parameter is drawn.
    let mut lengths = Vec::with_capacity(arch.layers().len() + 1);
    let mut length = input_length;
    for layer in arch.layers() {
        lengths.push(length);
        if let LayerSpec::Pool { pool_size } = *layer {
            if length < pool_size {
                return Err(CnnError::InvalidArchitecture(format!(
                    "pool of size {pool_size} cannot consume a length-{length} signal"
                )));
            }
            length /= pool_size;
        }
    }
    lengths.push(length);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(arch.layers().len());
    let mut channels = INPUT_CHANNELS;
    for layer in arch.layers() {
        match *layer {
            LayerSpec::Conv { n_filters, kernel_size } => {
                let fan_in = channels * kernel_size;
                let std = (2.0 / fan_in as f64).sqrt();
                let dist = Normal::new(0.0, std).expect("positive std");
                let weights = (0..n_filters * fan_in).map(|_| dist.sample(&mut rng)).collect();
                layers.push(RtLayer::Conv(ConvParams {
                    n_filters,
                    kernel_size,
                    in_channels: channels,
                    weights,
                    bias: vec![0.0; n_filters],
                }));
                channels = n_filters;
            }
            LayerSpec::Pool { pool_size } => layers.push(RtLayer::Pool { size: pool_size }),
            LayerSpec::Gap => layers.push(RtLayer::Gap),
        }
    }
    // Small fan-in-scaled draws for the readout: GAP features are
    // nonnegative whatever the conv signs, so a near-zero start lets the
    // classifier pick its signs from the data instead of fighting a large
    // random initialization at the fixed 1e-3 step size.
    let dist = Normal::new(0.0, 0.01 * (1.0 / channels as f64).sqrt()).expect("positive std");
    let classifier_weights = (0..channels).map(|_| dist.sample(&mut rng)).collect();
    Ok(Network {
        arch: arch.clone(),
        input_length,
        lengths,
        layers,
        classifier_weights,
        classifier_bias: 0.0,
    })
}

impl Network {
    pub fn arch(&self) -> &ArchSpec {
        &self.arch
    }

    pub fn input_length(&self) -> usize {
        self.input_length
    }

    /// Splits a complex signal into its I and Q channels.
    pub fn signal_channels(signal: &ComplexSignal) -> Vec<Vec<f64>> {
        vec![
            signal.samples().iter().map(|s| s.re).collect(),
            signal.samples().iter().map(|s| s.im).collect(),
        ]
    }

    fn check_input(&self, input: &[Vec<f64>]) -> Result<()> {
        if input.len() != INPUT_CHANNELS || input.iter().any(|c| c.len() != self.input_length) {
            return Err(CnnError::InvalidArgument(format!(
                "expected {INPUT_CHANNELS} channels of length {}, got {:?}",
                self.input_length,
                input.iter().map(|c| c.len()).collect::<Vec<_>>()
            )));
        }
        Ok(())
    }

    pub(crate) fn forward_cached(&self, input: &[Vec<f64>]) -> Result<ForwardCache> {
        self.check_input(input)?;
        let mut layer_inputs = Vec::with_capacity(self.layers.len());
        let mut conv_preacts = vec![None; self.layers.len()];
        let mut pool_argmax = vec![None; self.layers.len()];
        let mut current: Vec<Vec<f64>> = input.to_vec();

        for (li, layer) in self.layers.iter().enumerate() {
            layer_inputs.push(current.clone());
            match layer {
                RtLayer::Conv(conv) => {
                    let n = current[0].len();
                    let pad = (conv.kernel_size - 1) / 2;
                    let mut pre = vec![vec![0.0; n]; conv.n_filters];
                    for f in 0..conv.n_filters {
                        let out = &mut pre[f];
                        for (c, x) in current.iter().enumerate() {
                            let base = (f * conv.in_channels + c) * conv.kernel_size;
                            let w = &conv.weights[base..base + conv.kernel_size];
                            for (t, o) in out.iter_mut().enumerate() {
                                let mut acc = 0.0;
                                for (j, &wj) in w.iter().enumerate() {
                                    let s = t + j;
                                    if s >= pad && s - pad < n {
                                        acc += wj * x[s - pad];
                                    }
                                }
                                *o += acc;
                            }
                        }
                        let b = conv.bias[f];
                        for o in pre[f].iter_mut() {
                            *o += b;
                        }
                    }
                    let post: Vec<Vec<f64>> = pre
                        .iter()
                        .map(|ch| ch.iter().map(|&v| v.max(0.0)).collect())
                        .collect();
                    conv_preacts[li] = Some(pre);
                    current = post;
                }
                RtLayer::Pool { size } => {
                    let n_out = current[0].len() / size;
                    let mut out = vec![vec![0.0; n_out]; current.len()];
                    let mut argmax = vec![vec![0usize; n_out]; current.len()];
                    for (c, x) in current.iter().enumerate() {
                        for w in 0..n_out {
                            let start = w * size;
                            let mut best = x[start];
                            let mut best_i = start;
                            for (i, &v) in x[start + 1..start + size].iter().enumerate() {
                                if v > best {
                                    best = v;
                                    best_i = start + 1 + i;
                                }
                            }
                            out[c][w] = best;
                            argmax[c][w] = best_i;
                        }
                    }
                    pool_argmax[li] = Some(argmax);
                    current = out;
                }
                RtLayer::Gap => {
                    let gap: Vec<f64> = current
                        .iter()
                        .map(|ch| ch.iter().sum::<f64>() / ch.len() as f64)
                        .collect();
                    let logit = self
                        .classifier_weights
                        .iter()
                        .zip(&gap)
                        .map(|(w, g)| w * g)
                        .sum::<f64>()
                        + self.classifier_bias;
                    return Ok(ForwardCache {
                        layer_inputs,
                        conv_preacts,
                        pool_argmax,
                        gap_out: gap,
                        logit,
                    });
                }
            }
        }
        unreachable!("validated architectures terminate in GAP")
    }

    /// Detection probability for one 2-channel input.
    pub fn forward(&self, input: &[Vec<f64>]) -> Result<f64> {
        Ok(self.forward_cached(input)?.probability())
    }

    /// Detection probability for one complex signal.
    pub fn forward_signal(&self, signal: &ComplexSignal) -> Result<f64> {
        self.forward(&Self::signal_channels(signal))
    }

    /// Probabilities for a batch of signals.
    pub fn forward_batch(&self, signals: &[ComplexSignal]) -> Result<Vec<f64>> {
        signals.iter().map(|s| self.forward_signal(s)).collect()
    }

    /// Total number of trainable parameters.
    pub fn parameter_count(&self) -> usize {
        let conv: usize = self
            .layers
            .iter()
            .map(|l| match l {
                RtLayer::Conv(c) => c.weights.len() + c.bias.len(),
                _ => 0,
            })
            .sum();
        conv + self.classifier_weights.len() + 1
    }

    /// Reads the parameter at a flat index. The order is: each convolution's
    /// weights then biases, in layer order, then the classifier weights and
    /// finally its bias.
    pub fn get_param(&self, mut idx: usize) -> f64 {
        for layer in &self.layers {
            if let RtLayer::Conv(c) = layer {
                if idx < c.weights.len() {
                    return c.weights[idx];
                }
                idx -= c.weights.len();
                if idx < c.bias.len() {
                    return c.bias[idx];
                }
                idx -= c.bias.len();
            }
        }
        if idx < self.classifier_weights.len() {
            return self.classifier_weights[idx];
        }
        idx -= self.classifier_weights.len();
        assert_eq!(idx, 0, "parameter index out of range");
        self.classifier_bias
    }

    /// Writes the parameter at a flat index (see [`Network::get_param`]).
    pub fn set_param(&mut self, mut idx: usize, value: f64) {
        for layer in &mut self.layers {
            if let RtLayer::Conv(c) = layer {
                if idx < c.weights.len() {
                    c.weights[idx] = value;
                    return;
                }
                idx -= c.weights.len();
                if idx < c.bias.len() {
                    c.bias[idx] = value;
                    return;
                }
                idx -= c.bias.len();
            }
        }
        if idx < self.classifier_weights.len() {
            self.classifier_weights[idx] = value;
            return;
        }
        idx -= self.classifier_weights.len();
        assert_eq!(idx, 0, "parameter index out of range");
        self.classifier_bias = value;
    }

    /// Applies `step[i]` additively to every parameter.
    pub(crate) fn apply_step(&mut self, step: &[f64]) {
        let mut idx = 0;
        for layer in &mut self.layers {
            if let RtLayer::Conv(c) = layer {
                for w in &mut c.weights {
                    *w += step[idx];
                    idx += 1;
                }
                for b in &mut c.bias {
                    *b += step[idx];
                    idx += 1;
                }
            }
        }
        for w in &mut self.classifier_weights {
            *w += step[idx];
            idx += 1;
        }
        self.classifier_bias += step[idx];
        debug_assert_eq!(idx + 1, step.len());
    }
}

/// Serializes a network: token header, input length, then the flat f64
/// parameter array in layer order (little-endian).
pub fn save_network<P: AsRef<Path>>(path: P, network: &Network) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let tokens = network.arch().tokens();
    w.write_all(&(tokens.len() as u32).to_le_bytes())?;
    w.write_all(tokens.as_bytes())?;
    w.write_all(&(network.input_length() as u32).to_le_bytes())?;
    let count = network.parameter_count();
    w.write_all(&(count as u64).to_le_bytes())?;
    for i in 0..count {
        w.write_all(&network.get_param(i).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a network written by [`save_network`].
pub fn load_network<P: AsRef<Path>>(path: P) -> Result<Network> {
    let mut r = BufReader::new(File::open(path)?);
    let mut len4 = [0u8; 4];
    r.read_exact(&mut len4)?;
    let tlen = u32::from_le_bytes(len4) as usize;
    if tlen > 1 << 16 {
        return Err(CnnError::Format("unreasonable token length".into()));
    }
    let mut tokens = vec![0u8; tlen];
    r.read_exact(&mut tokens)?;
    let tokens = String::from_utf8(tokens).map_err(|_| CnnError::Format("bad token text".into()))?;
    let arch = ArchSpec::parse_tokens(&tokens)?;
    r.read_exact(&mut len4)?;
    let input_length = u32::from_le_bytes(len4) as usize;
    let mut len8 = [0u8; 8];
    r.read_exact(&mut len8)?;
    let count = u64::from_le_bytes(len8) as usize;

    let mut network = build_network(&arch, input_length, 0)?;
    if count != network.parameter_count() {
        return Err(CnnError::Format(format!(
            "parameter count {count} does not match architecture ({})",
            network.parameter_count()
        )));
    }
    for i in 0..count {
        r.read_exact(&mut len8)?;
        network.set_param(i, f64::from_le_bytes(len8));
    }
    Ok(network)
}
