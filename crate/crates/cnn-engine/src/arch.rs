//! Architecture descriptions, token serialization, and the cost model.

use std::fmt;

use crate::error::CnnError;
use crate::{Result, INPUT_CHANNELS};

/// One layer of a detector network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LayerSpec {
    /// Same-padding stride-1 convolution with ReLU.
    Conv { n_filters: usize, kernel_size: usize },
    /// Non-overlapping max pooling; output length floor(n / pool_size).
    Pool { pool_size: usize },
    /// Global average pooling; terminal layer feeding the classifier neuron.
    Gap,
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerSpec::Conv { n_filters, kernel_size } => write!(f, "C{n_filters}x{kernel_size}"),
            LayerSpec::Pool { pool_size } => write!(f, "P{pool_size}"),
            LayerSpec::Gap => write!(f, "GAP"),
        }
    }
}

/// An ordered, validated layer sequence: starts with a convolution and ends
/// with exactly one GAP layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArchSpec {
    layers: Vec<LayerSpec>,
}

impl ArchSpec {
    pub fn new(layers: Vec<LayerSpec>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(CnnError::InvalidArchitecture(
                "architecture needs at least one convolution and the GAP layer".into(),
            ));
        }
        match layers[0] {
            LayerSpec::Conv { .. } => {}
            other => {
                return Err(CnnError::InvalidArchitecture(format!(
                    "first layer must be a convolution, got {other}"
                )))
            }
        }
        let gap_count = layers.iter().filter(|l| matches!(l, LayerSpec::Gap)).count();
        if gap_count != 1 || *layers.last().unwrap() != LayerSpec::Gap {
            return Err(CnnError::InvalidArchitecture(
                "exactly one GAP layer is required, in final position".into(),
            ));
        }
        for layer in &layers {
            match *layer {
                LayerSpec::Conv { n_filters, kernel_size } => {
                    if n_filters == 0 || kernel_size == 0 {
                        return Err(CnnError::InvalidArchitecture(
                            "convolution parameters must be positive".into(),
                        ));
                    }
                }
                LayerSpec::Pool { pool_size } => {
                    if pool_size == 0 {
                        return Err(CnnError::InvalidArchitecture(
                            "pool size must be positive".into(),
                        ));
                    }
                }
                LayerSpec::Gap => {}
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    /// Number of layers excluding the terminal GAP.
    pub fn hidden_len(&self) -> usize {
        self.layers.len() - 1
    }

    /// Filters of the last convolution before GAP; the classifier width.
    pub fn final_channels(&self) -> usize {
        self.layers
            .iter()
            .rev()
            .find_map(|l| match l {
                LayerSpec::Conv { n_filters, .. } => Some(*n_filters),
                _ => None,
            })
            .expect("validated architectures start with a convolution")
    }

    /// Compact token form, e.g. `C64x3,C32x5,P2,GAP`.
    pub fn tokens(&self) -> String {
        self.layers
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the token form produced by [`ArchSpec::tokens`].
    pub fn parse_tokens(text: &str) -> Result<Self> {
        let mut layers = Vec::new();
        for token in text.split(',') {
            let token = token.trim();
            if token.eq_ignore_ascii_case("GAP") {
                layers.push(LayerSpec::Gap);
            } else if let Some(rest) = token.strip_prefix(['C', 'c']) {
                let (nf, ks) = rest.split_once(['x', 'X']).ok_or_else(|| {
                    CnnError::Format(format!("bad conv token `{token}`, expected C<f>x<k>"))
                })?;
                layers.push(LayerSpec::Conv {
                    n_filters: nf
                        .parse()
                        .map_err(|_| CnnError::Format(format!("bad filter count in `{token}`")))?,
                    kernel_size: ks
                        .parse()
                        .map_err(|_| CnnError::Format(format!("bad kernel size in `{token}`")))?,
                });
            } else if let Some(rest) = token.strip_prefix(['P', 'p']) {
                layers.push(LayerSpec::Pool {
                    pool_size: rest
                        .parse()
                        .map_err(|_| CnnError::Format(format!("bad pool size in `{token}`")))?,
                });
            } else {
                return Err(CnnError::Format(format!("unrecognized layer token `{token}`")));
            }
        }
        Self::new(layers)
    }
}

/// Inference cost of an architecture at a given input length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostReport {
    /// Real multiplications per inference.
    pub rrm: u64,
    /// Trainable parameters (weights and biases).
    pub weights: u64,
}

impl CostReport {
    pub fn rrm_millions(&self) -> f64 {
        self.rrm as f64 / 1e6
    }

    pub fn weights_thousands(&self) -> f64 {
        self.weights as f64 / 1e3
    }
}

/// Counts real multiplications and trainable weights.
///
/// Convolutions run same-padded at stride 1, so each contributes
/// N * n_f * (s_f * c_in) multiplications and n_f * (s_f * c_in) + n_f
/// weights. Pooling and GAP contribute no multiplications; the final
/// classifier neuron adds one multiplication per input channel plus a bias
/// weight. Bias additions are not multiplications.
pub fn count_cost(arch: &ArchSpec, input_length: usize) -> CostReport {
    let mut rrm: u64 = 0;
    let mut weights: u64 = 0;
    let mut length = input_length as u64;
    let mut channels = INPUT_CHANNELS as u64;
    for layer in arch.layers() {
        match *layer {
            LayerSpec::Conv { n_filters, kernel_size } => {
                let fan_in = kernel_size as u64 * channels;
                rrm += length * n_filters as u64 * fan_in;
                weights += n_filters as u64 * fan_in + n_filters as u64;
                channels = n_filters as u64;
            }
            LayerSpec::Pool { pool_size } => {
                length /= pool_size as u64;
            }
            LayerSpec::Gap => {
                rrm += channels;
                weights += channels + 1;
            }
        }
    }
    CostReport { rrm, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conv(n_filters: usize, kernel_size: usize) -> LayerSpec {
        LayerSpec::Conv { n_filters, kernel_size }
    }

    pub(crate) fn dataset1_arch() -> ArchSpec {
        ArchSpec::new(vec![conv(64, 3), LayerSpec::Gap]).unwrap()
    }

    pub(crate) fn dataset2_arch() -> ArchSpec {
        ArchSpec::new(vec![
            conv(64, 3),
            conv(64, 3),
            conv(32, 5),
            conv(32, 5),
            conv(16, 3),
            conv(16, 3),
            LayerSpec::Gap,
        ])
        .unwrap()
    }

    pub(crate) fn dataset3_arch() -> ArchSpec {
        ArchSpec::new(vec![
            conv(32, 3),
            conv(32, 3),
            conv(64, 5),
            conv(64, 5),
            conv(16, 5),
            conv(16, 5),
            conv(8, 3),
            conv(64, 3),
            LayerSpec::Gap,
        ])
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_shapes() {
        assert!(ArchSpec::new(vec![LayerSpec::Gap]).is_err());
        assert!(ArchSpec::new(vec![LayerSpec::Pool { pool_size: 4 }, LayerSpec::Gap]).is_err());
        assert!(ArchSpec::new(vec![conv(8, 3)]).is_err());
        assert!(ArchSpec::new(vec![conv(8, 3), LayerSpec::Gap, LayerSpec::Gap]).is_err());
        assert!(ArchSpec::new(vec![conv(8, 3), LayerSpec::Gap, conv(8, 3)]).is_err());
    }

    #[test]
    fn token_round_trip() {
        let arch = ArchSpec::new(vec![
            conv(64, 3),
            LayerSpec::Pool { pool_size: 2 },
            conv(32, 5),
            LayerSpec::Gap,
        ])
        .unwrap();
        assert_eq!(arch.tokens(), "C64x3,P2,C32x5,GAP");
        assert_eq!(ArchSpec::parse_tokens(&arch.tokens()).unwrap(), arch);
        assert!(ArchSpec::parse_tokens("C64,GAP").is_err());
        assert!(ArchSpec::parse_tokens("X3,GAP").is_err());
    }

    #[test]
    fn cost_counts_are_exact() {
        // Single conv: 100 * 64 * (3*2) = 38,400 plus 64 classifier
        // multiplications; 448 conv weights plus 65 classifier weights.
        let c = count_cost(&dataset1_arch(), 100);
        assert_eq!(c.rrm, 38_464);
        assert_eq!(c.weights, 513);

        let c = count_cost(&dataset2_arch(), 160);
        assert_eq!(c.rrm, 4_853_776);
        assert_eq!(c.weights, 30_577);

        let c = count_cost(&dataset3_arch(), 640);
        assert_eq!(c.rrm, 27_074_624);
        assert_eq!(c.weights, 42_665);
    }

    #[test]
    fn cost_rounds_to_reported_figures() {
        let rows = [
            (dataset1_arch(), 100usize, 0.038, 0.5),
            (dataset2_arch(), 160, 4.854, 30.6),
            (dataset3_arch(), 640, 27.075, 42.7),
        ];
        for (arch, n, rrm_m, w_k) in rows {
            let c = count_cost(&arch, n);
            let rounded_m = (c.rrm_millions() * 1000.0).round() / 1000.0;
            let rounded_k = (c.weights_thousands() * 10.0).round() / 10.0;
            assert_eq!(rounded_m, rrm_m, "{}", arch.tokens());
            assert_eq!(rounded_k, w_k, "{}", arch.tokens());
        }
    }

    #[test]
    fn pooling_divides_cost_length() {
        let arch = ArchSpec::new(vec![
            conv(8, 3),
            LayerSpec::Pool { pool_size: 4 },
            conv(8, 3),
            LayerSpec::Gap,
        ])
        .unwrap();
        let c = count_cost(&arch, 100);
        // 100*8*6 + 25*8*24 + 8 = 4800 + 4800 + 8.
        assert_eq!(c.rrm, 9_608);
    }
}
