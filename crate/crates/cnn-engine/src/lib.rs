//! A minimal trainable 1-D convolutional detector.
//!
//! Networks are chains of same-padding stride-1 convolutions (ReLU),
//! non-overlapping max-pooling layers, and a terminal global average
//! pooling layer feeding one sigmoid neuron that classifies a complex
//! baseband signal (I/Q as two input channels) into noise-only vs.
//! signal-plus-noise. Training is mini-batch adaptive-moment gradient
//! descent on binary cross-entropy, fully deterministic in its seed.
//!
//! The crate also carries the inference cost model (real multiplications
//! and trainable-weight counts) used to compare architectures.

mod arch;
mod error;
mod gradcheck;
mod network;
mod train;

pub use arch::{count_cost, ArchSpec, CostReport, LayerSpec};
pub use error::CnnError;
pub use gradcheck::grad_check;
pub use network::{build_network, load_network, save_network, ConvParams, Network, RtLayer};
pub use train::{accuracy, kfold_accuracy, train, train_with_validation, TrainReport};

pub type Result<T> = std::result::Result<T, CnnError>;

/// Networks always consume in-phase and quadrature channels.
pub const INPUT_CHANNELS: usize = 2;
