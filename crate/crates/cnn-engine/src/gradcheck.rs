//! Finite-difference verification of the analytic gradients.

use crate::error::CnnError;
use crate::network::Network;
use crate::train::{backward, bce_loss};
use crate::Result;

/// Compares the analytic gradient of the binary cross-entropy loss against
/// central finite differences on every parameter, returning the maximum
/// relative error. The error is |ga - gn| / max(1, |ga|, |gn|), so tiny
/// gradients are compared absolutely.
pub fn grad_check(network: &Network, input: &[Vec<f64>], label: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(CnnError::InvalidArgument("perturbation must be positive".into()));
    }
    let cache = network.forward_cached(input)?;
    let analytic = backward(network, &cache, label);

    let mut probe = network.clone();
    let mut worst: f64 = 0.0;
    for i in 0..analytic.len() {
        let original = probe.get_param(i);
        probe.set_param(i, original + h);
        let up = bce_loss(probe.forward_cached(input)?.logit, label);
        probe.set_param(i, original - h);
        let down = bce_loss(probe.forward_cached(input)?.logit, label);
        probe.set_param(i, original);
        let numeric = (up - down) / (2.0 * h);
        let err = (analytic[i] - numeric).abs() / analytic[i].abs().max(numeric.abs()).max(1.0);
        worst = worst.max(err);
    }
    Ok(worst)
}
