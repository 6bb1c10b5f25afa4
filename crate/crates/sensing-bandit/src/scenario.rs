//! Frame-by-frame simulation over non-stationary section plans.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use signal_engine::seeds::derive_seed;
use signal_engine::Hypothesis;

use crate::bank::DetectorBank;
use crate::error::BanditError;
use crate::policy::BanditAgent;
use crate::reward::{frame_reward, Decision, RewardWeights, SensingAction};
use crate::Result;

/// A stretch of frames sharing one channel condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanSection {
    pub frames: usize,
    pub hypothesis: Hypothesis,
    /// GSNR of the primary user's signal; required for H1 sections.
    pub gsnr_db: Option<f64>,
}

/// An ordered sequence of channel conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePlan {
    sections: Vec<PlanSection>,
}

impl FramePlan {
    pub fn new(sections: Vec<PlanSection>) -> Result<Self> {
        if sections.is_empty() {
            return Err(BanditError::InvalidArgument("plan needs at least one section".into()));
        }
        for (i, s) in sections.iter().enumerate() {
            if s.frames == 0 {
                return Err(BanditError::InvalidArgument(format!("section {i} has zero frames")));
            }
            if s.hypothesis == Hypothesis::H1 && s.gsnr_db.is_none() {
                return Err(BanditError::InvalidArgument(format!(
                    "H1 section {i} is missing its GSNR"
                )));
            }
        }
        Ok(Self { sections })
    }

    pub fn sections(&self) -> &[PlanSection] {
        &self.sections
    }

    pub fn total_frames(&self) -> usize {
        self.sections.iter().map(|s| s.frames).sum()
    }

    /// GSNRs appearing in H1 sections, deduplicated.
    pub fn h1_gsnrs(&self) -> Vec<f64> {
        let mut gs: Vec<f64> = self.sections.iter().filter_map(|s| s.gsnr_db).collect();
        gs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        gs.dedup();
        gs
    }
}

/// Which policy drives the action choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    EpsilonGreedy,
    GradientBandit,
    /// Fixed policy: always play the action at this index.
    Always(usize),
}

/// Policy plus its step-size parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub epsilon: f64,
    pub alpha_lr: f64,
    pub alpha_pr: f64,
}

impl PolicySpec {
    /// The published operating point: epsilon = alpha_lr = 0.15 with a
    /// preference step of 0.1.
    pub fn new(kind: PolicyKind) -> Self {
        Self { kind, epsilon: 0.15, alpha_lr: 0.15, alpha_pr: 0.1 }
    }

    pub fn label(&self, actions: &[SensingAction]) -> String {
        match self.kind {
            PolicyKind::EpsilonGreedy => format!("egreedy-a{}", actions.len()),
            PolicyKind::GradientBandit => format!("gb-a{}", actions.len()),
            PolicyKind::Always(idx) => {
                let id = actions.get(idx).map(|a| a.id).unwrap_or(idx);
                format!("always-a{id}")
            }
        }
    }
}

/// One simulated frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRecord {
    pub frame: usize,
    pub section: usize,
    pub gsnr_db: Option<f64>,
    pub hypothesis: Hypothesis,
    pub action_id: usize,
    pub decision: Decision,
    pub reward: f64,
}

/// The full record of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTrace {
    pub records: Vec<FrameRecord>,
}

impl ScenarioTrace {
    /// Mean reward over all frames.
    pub fn mean_reward(&self) -> f64 {
        self.records.iter().map(|r| r.reward).sum::<f64>() / self.records.len() as f64
    }

    /// Trailing moving average of the reward (presentation only; agents
    /// never see it).
    pub fn smoothed_rewards(&self, window: usize) -> Vec<f64> {
        let window = window.max(1);
        let mut out = Vec::with_capacity(self.records.len());
        let mut sum = 0.0;
        for (i, r) in self.records.iter().enumerate() {
            sum += r.reward;
            if i >= window {
                sum -= self.records[i - window].reward;
            }
            out.push(sum / window.min(i + 1) as f64);
        }
        out
    }
}

/// Runs one scenario: per frame the policy picks an action, the bank
/// samples the detector's decision under the section's true condition,
/// the reward is booked, and learning policies update from it (fixed
/// policies bypass updates). Feedback arrives in the same frame.
pub fn run_scenario(
    plan: &FramePlan,
    policy: &PolicySpec,
    actions: &[SensingAction],
    bank: &DetectorBank,
    weights: &RewardWeights,
    seed: u64,
) -> Result<ScenarioTrace> {
    weights.validate()?;
    if actions.is_empty() {
        return Err(BanditError::InvalidArgument("need at least one action".into()));
    }
    for action in actions {
        action.validate(weights.frame_us)?;
    }
    if let PolicyKind::Always(idx) = policy.kind {
        if idx >= actions.len() {
            return Err(BanditError::InvalidArgument(format!(
                "fixed policy index {idx} out of range for {} actions",
                actions.len()
            )));
        }
    }
    // Analytic banks must cover every plan GSNR and respect the
    // longer-sensing-never-worse shape before any frame runs.
    if let DetectorBank::Analytic(analytic) = bank {
        analytic.validate_monotone(actions, &plan.h1_gsnrs())?;
    }

    let mut agent =
        BanditAgent::new(actions.len(), policy.epsilon, policy.alpha_lr, policy.alpha_pr)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(plan.total_frames());
    let mut frame = 0usize;
    for (section_idx, section) in plan.sections().iter().enumerate() {
        for _ in 0..section.frames {
            let choice = match policy.kind {
                PolicyKind::EpsilonGreedy => agent.egreedy_select(&mut rng),
                PolicyKind::GradientBandit => agent.gb_select(&mut rng),
                PolicyKind::Always(idx) => idx,
            };
            let action = &actions[choice];
            let decision = bank.decide(
                action.id,
                section.hypothesis,
                section.gsnr_db,
                derive_seed(seed, frame as u64),
            )?;
            let reward = frame_reward(section.hypothesis, decision, action, weights);
            match policy.kind {
                PolicyKind::EpsilonGreedy => agent.update_estimate(choice, reward),
                PolicyKind::GradientBandit => agent.gb_update(choice, reward),
                PolicyKind::Always(_) => {}
            }
            records.push(FrameRecord {
                frame,
                section: section_idx,
                gsnr_db: section.gsnr_db,
                hypothesis: section.hypothesis,
                action_id: action.id,
                decision,
                reward,
            });
            frame += 1;
        }
    }
    Ok(ScenarioTrace { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::{AnalyticBank, PdModel};
    use crate::reward::expected_reward;
    use std::collections::BTreeMap;

    fn two_actions() -> Vec<SensingAction> {
        vec![SensingAction::at_50ns(0, 8.0), SensingAction::at_50ns(1, 32.0)]
    }

    fn fixed_bank(pd_short: f64, pd_long: f64, p_fa: f64) -> DetectorBank {
        let mut curves = BTreeMap::new();
        curves.insert(0, PdModel::Fixed(pd_short));
        curves.insert(1, PdModel::Fixed(pd_long));
        DetectorBank::Analytic(AnalyticBank::new(p_fa, curves).unwrap())
    }

    #[test]
    fn plan_validation() {
        assert!(FramePlan::new(vec![]).is_err());
        assert!(FramePlan::new(vec![PlanSection {
            frames: 0,
            hypothesis: Hypothesis::H0,
            gsnr_db: None,
        }])
        .is_err());
        assert!(FramePlan::new(vec![PlanSection {
            frames: 10,
            hypothesis: Hypothesis::H1,
            gsnr_db: None,
        }])
        .is_err());
    }

    #[test]
    fn single_condition_mean_matches_expectation() {
        // Always-short on an idle channel converges to the closed form.
        let plan = FramePlan::new(vec![PlanSection {
            frames: 100_000,
            hypothesis: Hypothesis::H0,
            gsnr_db: None,
        }])
        .unwrap();
        let actions = two_actions();
        let bank = fixed_bank(0.5, 0.9, 0.01);
        let weights = RewardWeights::default();
        let trace = run_scenario(
            &plan,
            &PolicySpec::new(PolicyKind::Always(0)),
            &actions,
            &bank,
            &weights,
            11,
        )
        .unwrap();
        let expect = expected_reward(&actions[0], Hypothesis::H0, 0.0, &weights);
        assert!((expect - 6.878).abs() < 1e-12);
        assert!(
            (trace.mean_reward() - expect).abs() < 0.01 * expect.abs(),
            "mean {} vs {expect}",
            trace.mean_reward()
        );
    }

    #[test]
    fn deterministic_bank_pays_exact_complexity() {
        // Pd = 1 everywhere with zero-ish false alarm: under H1 every
        // frame is a correct detection, so the reward is exactly the
        // complexity cost of the chosen arm.
        let plan = FramePlan::new(vec![PlanSection {
            frames: 500,
            hypothesis: Hypothesis::H1,
            gsnr_db: Some(10.0),
        }])
        .unwrap();
        let actions = two_actions();
        let bank = fixed_bank(1.0, 1.0, 1e-12);
        let weights = RewardWeights::default();
        for (idx, expect) in [(0usize, -0.25), (1usize, -1.0)] {
            let trace = run_scenario(
                &plan,
                &PolicySpec::new(PolicyKind::Always(idx)),
                &actions,
                &bank,
                &weights,
                3,
            )
            .unwrap();
            for r in &trace.records {
                assert_eq!(r.decision, Decision::D1);
                assert!((r.reward - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uncovered_gsnr_is_rejected_up_front() {
        let plan = FramePlan::new(vec![PlanSection {
            frames: 10,
            hypothesis: Hypothesis::H1,
            gsnr_db: Some(12.0),
        }])
        .unwrap();
        let actions = two_actions();
        let mut curves = BTreeMap::new();
        curves.insert(0, PdModel::Table(vec![(0.0, 0.1), (5.0, 0.5)]));
        curves.insert(1, PdModel::Table(vec![(0.0, 0.2), (5.0, 0.9)]));
        let bank = DetectorBank::Analytic(AnalyticBank::new(0.01, curves).unwrap());
        let err = run_scenario(
            &plan,
            &PolicySpec::new(PolicyKind::Always(0)),
            &actions,
            &bank,
            &RewardWeights::default(),
            1,
        )
        .unwrap_err();
        assert!(matches!(err, BanditError::UncoveredGsnr { .. }));
    }

    #[test]
    fn traces_are_deterministic_and_complete() {
        let plan = FramePlan::new(vec![
            PlanSection { frames: 50, hypothesis: Hypothesis::H1, gsnr_db: Some(8.0) },
            PlanSection { frames: 30, hypothesis: Hypothesis::H0, gsnr_db: None },
        ])
        .unwrap();
        let actions = two_actions();
        let bank = fixed_bank(0.4, 0.8, 0.01);
        let spec = PolicySpec::new(PolicyKind::EpsilonGreedy);
        let a = run_scenario(&plan, &spec, &actions, &bank, &RewardWeights::default(), 5).unwrap();
        let b = run_scenario(&plan, &spec, &actions, &bank, &RewardWeights::default(), 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 80);
        assert_eq!(a.records[49].section, 0);
        assert_eq!(a.records[50].section, 1);
        let c = run_scenario(&plan, &spec, &actions, &bank, &RewardWeights::default(), 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn smoothing_is_a_trailing_average() {
        let records: Vec<FrameRecord> = (0..5)
            .map(|i| FrameRecord {
                frame: i,
                section: 0,
                gsnr_db: None,
                hypothesis: Hypothesis::H0,
                action_id: 0,
                decision: Decision::D0,
                reward: i as f64,
            })
            .collect();
        let trace = ScenarioTrace { records };
        let sm = trace.smoothed_rewards(3);
        assert_eq!(sm, vec![0.0, 0.5, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn fixed_policy_index_is_checked() {
        let plan = FramePlan::new(vec![PlanSection {
            frames: 1,
            hypothesis: Hypothesis::H0,
            gsnr_db: None,
        }])
        .unwrap();
        let err = run_scenario(
            &plan,
            &PolicySpec::new(PolicyKind::Always(5)),
            &two_actions(),
            &fixed_bank(0.5, 0.9, 0.01),
            &RewardWeights::default(),
            1,
        )
        .unwrap_err();
        assert!(matches!(err, BanditError::InvalidArgument(_)));
    }
}
