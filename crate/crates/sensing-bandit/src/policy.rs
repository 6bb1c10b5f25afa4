//! Constant-step-size bandit policies.

use rand::Rng;

use crate::error::BanditError;
use crate::Result;

/// Agent state for both policies: exponential-recency value estimates for
/// epsilon-greedy and soft-max preferences for the gradient bandit. Step
/// sizes stay constant because the environment is non-stationary.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditAgent {
    estimates: Vec<f64>,
    preferences: Vec<f64>,
    pub epsilon: f64,
    pub alpha_lr: f64,
    pub alpha_pr: f64,
}

impl BanditAgent {
    pub fn new(n_actions: usize, epsilon: f64, alpha_lr: f64, alpha_pr: f64) -> Result<Self> {
        if n_actions == 0 {
            return Err(BanditError::InvalidArgument("need at least one action".into()));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(BanditError::InvalidArgument(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        for (name, step) in [("alpha_lr", alpha_lr), ("alpha_pr", alpha_pr)] {
            if !(step > 0.0 && step <= 1.0) {
                return Err(BanditError::InvalidArgument(format!(
                    "{name} must lie in (0, 1], got {step}"
                )));
            }
        }
        Ok(Self {
            estimates: vec![0.0; n_actions],
            preferences: vec![0.0; n_actions],
            epsilon,
            alpha_lr,
            alpha_pr,
        })
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn preferences(&self) -> &[f64] {
        &self.preferences
    }

    /// Index of the greedy arm; ties break to the lowest index.
    pub fn greedy(&self) -> usize {
        let mut best = 0;
        for (i, &q) in self.estimates.iter().enumerate().skip(1) {
            if q > self.estimates[best] {
                best = i;
            }
        }
        best
    }

    /// Epsilon-greedy selection: the greedy arm with probability
    /// 1 - eps + eps/|A|, any other arm with probability eps/|A|.
    pub fn egreedy_select<R: Rng>(&self, rng: &mut R) -> usize {
        if rng.gen::<f64>() < self.epsilon {
            rng.gen_range(0..self.estimates.len())
        } else {
            self.greedy()
        }
    }

    /// Exponential-recency update of the chosen arm's value estimate.
    pub fn update_estimate(&mut self, action: usize, reward: f64) {
        self.estimates[action] += self.alpha_lr * (reward - self.estimates[action]);
    }

    /// Soft-max action probabilities of the current preferences.
    pub fn gb_policy(&self) -> Vec<f64> {
        gb_probabilities(&self.preferences)
    }

    /// Samples an arm from the soft-max policy.
    pub fn gb_select<R: Rng>(&self, rng: &mut R) -> usize {
        let probs = self.gb_policy();
        let mut u = rng.gen::<f64>();
        for (i, p) in probs.iter().enumerate() {
            if u < *p {
                return i;
            }
            u -= p;
        }
        probs.len() - 1
    }

    /// Gradient-bandit preference update for a played arm: the chosen
    /// preference climbs by alpha_pr * (r - Q(a)) * (1 - pi(a)) while every
    /// other arm b descends by alpha_pr * (r - Q(b)) * pi(b); the played
    /// arm's per-action baseline is then refreshed with the value rule.
    pub fn gb_update(&mut self, action: usize, reward: f64) {
        let probs = self.gb_policy();
        for (b, p) in probs.iter().enumerate() {
            if b == action {
                self.preferences[b] +=
                    self.alpha_pr * (reward - self.estimates[b]) * (1.0 - p);
            } else {
                self.preferences[b] -= self.alpha_pr * (reward - self.estimates[b]) * p;
            }
        }
        self.update_estimate(action, reward);
    }
}

/// Numerically stable soft-max over preference values.
pub fn gb_probabilities(preferences: &[f64]) -> Vec<f64> {
    let max = preferences.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = preferences.iter().map(|h| (h - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}
