//! Per-frame rewards and their closed-form expectations.

use signal_engine::Hypothesis;

use crate::error::BanditError;
use crate::Result;

/// The detector's verdict for one frame: channel read as vacant (D0) or
/// occupied (D1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    D0,
    D1,
}

/// One sensing-time option of the agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingAction {
    pub id: usize,
    pub sensing_time_us: f64,
    pub sample_count: usize,
}

impl SensingAction {
    /// Action at the default 50 ns sampling time (20 samples per us).
    pub fn at_50ns(id: usize, sensing_time_us: f64) -> Self {
        Self {
            id,
            sensing_time_us,
            sample_count: (sensing_time_us * 20.0).round() as usize,
        }
    }

    pub fn validate(&self, frame_us: f64) -> Result<()> {
        if !(self.sensing_time_us > 0.0 && self.sensing_time_us < frame_us) {
            return Err(BanditError::InvalidArgument(format!(
                "sensing time {} us must lie inside the {} us frame",
                self.sensing_time_us, frame_us
            )));
        }
        if self.sample_count == 0 {
            return Err(BanditError::InvalidArgument("sample count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Reward constants. The aggregate reward is a weighted sum of throughput,
/// interference, and complexity; only the products lambda1*R_SU,
/// lambda2*xi, and lambda3 are observable, so those are the stored
/// primitives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardWeights {
    /// lambda1 * R_SU: reward per microsecond of transmission time.
    pub throughput_rate: f64,
    /// lambda2 * xi: penalty for one missed detection.
    pub interference_penalty: f64,
    /// lambda3: penalty per microsecond of sensing time.
    pub complexity_rate: f64,
    /// Frame length T_f in microseconds.
    pub frame_us: f64,
    /// Calibrated false-alarm target shared by all detectors.
    pub target_pfa: f64,
}

impl Default for RewardWeights {
    /// The published constants: lambda1*R_SU*(T_f - T_sen) =
    /// (T_f - T_sen)/10, lambda2*xi = 20, lambda3*T_sen = T_sen/32,
    /// T_f = 80 us, p_fa = 0.01.
    fn default() -> Self {
        Self {
            throughput_rate: 0.1,
            interference_penalty: 20.0,
            complexity_rate: 1.0 / 32.0,
            frame_us: 80.0,
            target_pfa: 0.01,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.throughput_rate > 0.0
            && self.interference_penalty > 0.0
            && self.complexity_rate > 0.0
            && self.frame_us > 0.0;
        if !all_positive {
            return Err(BanditError::InvalidArgument("weights must be positive".into()));
        }
        if !(self.target_pfa > 0.0 && self.target_pfa < 1.0) {
            return Err(BanditError::InvalidArgument("target Pfa must lie in (0, 1)".into()));
        }
        // Priority ordering: interference dominates throughput dominates
        // complexity over the whole frame.
        if !(self.interference_penalty > self.throughput_rate * self.frame_us
            && self.throughput_rate * self.frame_us > self.complexity_rate * self.frame_us)
        {
            return Err(BanditError::InvalidArgument(
                "weights must rank interference above throughput above complexity".into(),
            ));
        }
        Ok(())
    }
}

/// Reward of one frame: the secondary user transmits (and earns
/// throughput) only on (H0, D0); a missed detection (H1, D0) transmits
/// into the primary user and pays the interference penalty; sensing
/// complexity is always paid.
pub fn frame_reward(
    true_state: Hypothesis,
    decision: Decision,
    action: &SensingAction,
    weights: &RewardWeights,
) -> f64 {
    let mut reward = -weights.complexity_rate * action.sensing_time_us;
    if decision == Decision::D0 {
        match true_state {
            Hypothesis::H0 => {
                reward += weights.throughput_rate * (weights.frame_us - action.sensing_time_us)
            }
            Hypothesis::H1 => reward -= weights.interference_penalty,
        }
    }
    reward
}

/// Closed-form expected reward of an action under one hypothesis. Under
/// H0 the decision follows the calibrated false-alarm rate; under H1 it
/// follows `pd` for this action at the ambient SNR.
pub fn expected_reward(
    action: &SensingAction,
    hypothesis: Hypothesis,
    pd: f64,
    weights: &RewardWeights,
) -> f64 {
    let p_d1 = match hypothesis {
        Hypothesis::H0 => weights.target_pfa,
        Hypothesis::H1 => pd,
    };
    (1.0 - p_d1) * frame_reward(hypothesis, Decision::D0, action, weights)
        + p_d1 * frame_reward(hypothesis, Decision::D1, action, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short() -> SensingAction {
        SensingAction::at_50ns(0, 8.0)
    }

    fn long() -> SensingAction {
        SensingAction::at_50ns(1, 32.0)
    }

    #[test]
    fn sample_counts_at_50ns() {
        assert_eq!(short().sample_count, 160);
        assert_eq!(SensingAction::at_50ns(2, 16.0).sample_count, 320);
        assert_eq!(SensingAction::at_50ns(3, 24.0).sample_count, 480);
        assert_eq!(long().sample_count, 640);
    }

    #[test]
    fn default_weights_satisfy_priority_ordering() {
        RewardWeights::default().validate().unwrap();
        let mut w = RewardWeights::default();
        w.interference_penalty = 1.0; // below throughput over the frame
        assert!(w.validate().is_err());
    }

    #[test]
    fn scenario_rewards_with_published_constants() {
        let w = RewardWeights::default();
        // Idle channel, correct rejection, short sensing: 7.2 - 0.25.
        let r = frame_reward(Hypothesis::H0, Decision::D0, &short(), &w);
        assert!((r - 6.95).abs() < 1e-12);
        // Missed detection with the long action: -20 - 1.
        let r = frame_reward(Hypothesis::H1, Decision::D0, &long(), &w);
        assert!((r + 21.0).abs() < 1e-12);
        // False alarm, short: complexity only.
        let r = frame_reward(Hypothesis::H0, Decision::D1, &short(), &w);
        assert!((r + 0.25).abs() < 1e-12);
        // Correct detection, long: complexity only.
        let r = frame_reward(Hypothesis::H1, Decision::D1, &long(), &w);
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn reward_structure_matches_event_table() {
        // Throughput appears only on (H0, D0); interference only on
        // (H1, D0); complexity always.
        let w = RewardWeights::default();
        for action in [short(), long()] {
            let complexity = -w.complexity_rate * action.sensing_time_us;
            assert_eq!(frame_reward(Hypothesis::H0, Decision::D1, &action, &w), complexity);
            assert_eq!(frame_reward(Hypothesis::H1, Decision::D1, &action, &w), complexity);
            assert!(frame_reward(Hypothesis::H0, Decision::D0, &action, &w) > complexity);
            assert!(frame_reward(Hypothesis::H1, Decision::D0, &action, &w) < complexity);
        }
    }

    #[test]
    fn expected_rewards_for_the_four_cases() {
        let w = RewardWeights::default();
        // Idle channel: short earns 6.878, long 3.752; short wins.
        let qs = expected_reward(&short(), Hypothesis::H0, 0.0, &w);
        let ql = expected_reward(&long(), Hypothesis::H0, 0.0, &w);
        assert!((qs - 6.878).abs() < 1e-12);
        assert!((ql - 3.752).abs() < 1e-12);
        assert!(qs > ql);

        // Occupied, very low SNR (both detectors at the false-alarm
        // floor): short loses slightly less.
        let qs = expected_reward(&short(), Hypothesis::H1, 0.01, &w);
        let ql = expected_reward(&long(), Hypothesis::H1, 0.01, &w);
        assert!((qs + 20.05).abs() < 1e-12);
        assert!((ql + 20.80).abs() < 1e-12);
        assert!(qs > ql);

        // Occupied, medium SNR: the long action's higher Pd wins.
        let qs = expected_reward(&short(), Hypothesis::H1, 0.5, &w);
        let ql = expected_reward(&long(), Hypothesis::H1, 0.95, &w);
        assert!((qs + 10.25).abs() < 1e-12);
        assert!((ql + 2.0).abs() < 1e-12);
        assert!(ql > qs);

        // Occupied, high SNR (both certain): short conserves energy.
        let qs = expected_reward(&short(), Hypothesis::H1, 1.0, &w);
        let ql = expected_reward(&long(), Hypothesis::H1, 1.0, &w);
        assert!((qs + 0.25).abs() < 1e-12);
        assert!((ql + 1.0).abs() < 1e-12);
        assert!(qs > ql);
    }
}
