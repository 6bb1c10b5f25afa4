//! The action-value table, its update rule, and greedy extraction.

use std::collections::BTreeMap;

use cnn_engine::ArchSpec;

use crate::mdp::{actions_to_arch, legal_actions, NasAction, NasConfig, NasState};
use crate::search::Trajectory;
use crate::{NasError, Result};

/// Value estimate and visit count of one state-action pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QEntry {
    pub q: f64,
    pub visits: u64,
}

/// Associative store from canonical state-action keys to estimates.
///
/// Terminal states are not stored: every terminal encoding shares the
/// fixed value 0, which the update rule supplies implicitly.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QTable {
    entries: BTreeMap<(NasState, NasAction), QEntry>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, state: &NasState, action: NasAction) -> Option<QEntry> {
        self.entries.get(&(*state, action)).copied()
    }

    /// Stored value, or `q_init` for never-visited pairs.
    pub fn q_or_init(&self, state: &NasState, action: NasAction, q_init: f64) -> f64 {
        self.get(state, action).map_or(q_init, |e| e.q)
    }

    /// Inserts an entry verbatim (checkpoint loading / search resumption).
    pub fn insert(&mut self, state: NasState, action: NasAction, entry: QEntry) -> Result<()> {
        if entry.visits == 0 {
            return Err(NasError::InvalidArgument(
                "stored entries must have at least one visit".into(),
            ));
        }
        self.entries.insert((state, action), entry);
        Ok(())
    }

    /// Iterates entries in canonical key order.
    pub fn iter(&self) -> impl Iterator<Item = (&(NasState, NasAction), &QEntry)> {
        self.entries.iter()
    }

    /// Greedy value of a state: the maximum over its legal actions, with
    /// unseen actions valued at `q_init`.
    pub fn max_q(&self, state: &NasState, config: &NasConfig, q_init: f64) -> f64 {
        legal_actions(state, config)
            .into_iter()
            .map(|a| self.q_or_init(state, a, q_init))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action of a state; ties resolve to the smallest canonical
    /// action key because legal actions arrive canonically sorted.
    pub fn greedy_action(&self, state: &NasState, config: &NasConfig, q_init: f64) -> NasAction {
        let mut best_action = None;
        let mut best_q = f64::NEG_INFINITY;
        for action in legal_actions(state, config) {
            let q = self.q_or_init(state, action, q_init);
            if q > best_q {
                best_q = q;
                best_action = Some(action);
            }
        }
        best_action.expect("every reachable state has at least one legal action")
    }

    fn update_pair(&mut self, state: NasState, action: NasAction, target: f64, q_init: f64) {
        let entry = self
            .entries
            .entry((state, action))
            .or_insert(QEntry { q: q_init, visits: 0 });
        entry.visits += 1;
        let alpha = 1.0 / entry.visits as f64;
        entry.q += alpha * (target - entry.q);
    }
}

/// Backward pass of the tabular update over one finished episode.
///
/// Visiting pairs from the terminal end to the first: the visit count is
/// bumped, then Q moves by 1/N toward `r + discount * max_a' Q(s', a')`,
/// where the reward is the episode's accuracy at the final (GAP) step and
/// zero elsewhere, and the terminal successor contributes value 0. With
/// the 1/N step size each entry equals the arithmetic mean of the targets
/// it has received.
pub fn update_q(
    table: &mut QTable,
    trajectory: &Trajectory,
    reward: f64,
    config: &NasConfig,
) -> Result<()> {
    if !(0.0..=1.0).contains(&reward) {
        return Err(NasError::InvalidArgument(format!(
            "reward must lie in [0, 1], got {reward}"
        )));
    }
    trajectory.validate(config)?;
    let steps = trajectory.steps();
    for (i, (state, action)) in steps.iter().enumerate().rev() {
        let is_final = i + 1 == steps.len();
        let successor_value = if is_final {
            0.0
        } else {
            table.max_q(&steps[i + 1].0, config, config.q_init)
        };
        let r = if is_final { reward } else { 0.0 };
        table.update_pair(*state, *action, r + config.discount * successor_value, config.q_init);
    }
    Ok(())
}

/// Greedy walk from the start state under the stored values (unseen pairs
/// valued `q_init`, canonical tie-break), ending at GAP. The layer cap
/// guarantees termination; an empty table yields the canonical minimal
/// architecture.
pub fn extract_best(table: &QTable, config: &NasConfig) -> Result<ArchSpec> {
    config.validate()?;
    let mut state = NasState::initial(config);
    let mut actions = Vec::new();
    loop {
        let action = table.greedy_action(&state, config, config.q_init);
        actions.push(action);
        match crate::mdp::transition(&state, action, config)? {
            crate::mdp::Step::Continue(next) => state = next,
            crate::mdp::Step::Finished(_) => break,
        }
    }
    actions_to_arch(&actions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{transition, Step};
    use crate::search::Trajectory;
    use cnn_engine::LayerSpec;

    fn config() -> NasConfig {
        let mut c = NasConfig::paper_default(100);
        c.q_init = 0.0;
        c
    }

    /// Builds the trajectory for an explicit action list.
    fn trajectory(actions: &[NasAction], config: &NasConfig) -> Trajectory {
        let mut steps = Vec::new();
        let mut state = NasState::initial(config);
        for &a in actions {
            steps.push((state, a));
            match transition(&state, a, config).unwrap() {
                Step::Continue(next) => state = next,
                Step::Finished(_) => break,
            }
        }
        Trajectory::from_steps(steps)
    }

    #[test]
    fn single_layer_episode_takes_terminal_reward() {
        let c = config();
        let mut table = QTable::new();
        let traj = trajectory(
            &[NasAction::Conv { n_filters: 8, kernel_size: 3 }, NasAction::Gap],
            &c,
        );
        update_q(&mut table, &traj, 0.8, &c).unwrap();
        // The gap step takes the raw reward; the conv step bootstraps it.
        let (s1, gap) = traj.steps()[1];
        assert_eq!(table.get(&s1, gap).unwrap().q, 0.8);
        let (s0, conv) = traj.steps()[0];
        assert_eq!(table.get(&s0, conv).unwrap().q, 0.8);
        assert_eq!(table.get(&s0, conv).unwrap().visits, 1);
    }

    #[test]
    fn sample_average_identity() {
        // Repeated terminal targets: Q equals their arithmetic mean.
        let c = config();
        let mut table = QTable::new();
        let traj = trajectory(
            &[NasAction::Conv { n_filters: 8, kernel_size: 3 }, NasAction::Gap],
            &c,
        );
        update_q(&mut table, &traj, 0.5, &c).unwrap();
        update_q(&mut table, &traj, 0.7, &c).unwrap();
        let (s1, gap) = traj.steps()[1];
        assert!((table.get(&s1, gap).unwrap().q - 0.6).abs() < 1e-15);

        let targets = [0.1, 0.9, 0.3, 0.25, 1.0, 0.0, 0.6];
        let mut table = QTable::new();
        for &t in &targets {
            update_q(&mut table, &traj, t, &c).unwrap();
        }
        let mean = targets.iter().sum::<f64>() / targets.len() as f64;
        assert!(
            (table.get(&s1, gap).unwrap().q - mean).abs() < 1e-12,
            "sample-average identity violated"
        );
        assert_eq!(table.get(&s1, gap).unwrap().visits, targets.len() as u64);
    }

    #[test]
    fn backward_order_propagates_in_one_pass() {
        // Two-layer episode on a fresh table: both entries reach the
        // terminal reward after a single backward sweep.
        let c = config();
        let mut table = QTable::new();
        let traj = trajectory(
            &[
                NasAction::Conv { n_filters: 8, kernel_size: 3 },
                NasAction::Conv { n_filters: 16, kernel_size: 5 },
                NasAction::Gap,
            ],
            &c,
        );
        update_q(&mut table, &traj, 0.9, &c).unwrap();
        for (state, action) in traj.steps() {
            assert_eq!(table.get(state, *action).unwrap().q, 0.9);
        }
    }

    #[test]
    fn reward_range_is_enforced() {
        let c = config();
        let mut table = QTable::new();
        let traj = trajectory(
            &[NasAction::Conv { n_filters: 8, kernel_size: 3 }, NasAction::Gap],
            &c,
        );
        assert!(update_q(&mut table, &traj, 1.5, &c).is_err());
        assert!(update_q(&mut table, &traj, -0.1, &c).is_err());
    }

    #[test]
    fn extract_best_from_empty_table_is_canonical_minimal() {
        let c = config();
        let arch = extract_best(&QTable::new(), &c).unwrap();
        assert_eq!(
            arch.layers(),
            &[LayerSpec::Conv { n_filters: 8, kernel_size: 3 }, LayerSpec::Gap]
        );
    }

    #[test]
    fn extract_best_follows_single_stored_trajectory() {
        let c = config();
        let mut table = QTable::new();
        let traj = trajectory(
            &[
                NasAction::Conv { n_filters: 32, kernel_size: 5 },
                NasAction::Pool { pool_size: 2 },
                NasAction::Conv { n_filters: 16, kernel_size: 3 },
                NasAction::Gap,
            ],
            &c,
        );
        update_q(&mut table, &traj, 0.75, &c).unwrap();
        let arch = extract_best(&table, &c).unwrap();
        assert_eq!(arch.tokens(), "C32x5,P2,C16x3,GAP");
    }

    #[test]
    fn extract_best_is_shift_invariant() {
        // Adding a positive constant to every stored value cannot change
        // the greedy walk.
        let c = config();
        let mut table = QTable::new();
        let traj = trajectory(
            &[
                NasAction::Conv { n_filters: 64, kernel_size: 3 },
                NasAction::Conv { n_filters: 8, kernel_size: 5 },
                NasAction::Gap,
            ],
            &c,
        );
        update_q(&mut table, &traj, 0.9, &c).unwrap();
        update_q(
            &mut table,
            &trajectory(&[NasAction::Conv { n_filters: 8, kernel_size: 3 }, NasAction::Gap], &c),
            0.4,
            &c,
        )
        .unwrap();
        let before = extract_best(&table, &c).unwrap();

        let mut shifted = QTable::new();
        for (&(s, a), &e) in table.iter() {
            shifted.insert(s, a, QEntry { q: e.q + 100.0, visits: e.visits }).unwrap();
        }
        // Shift q_init identically so unseen actions keep their rank.
        let mut c_shift = c.clone();
        c_shift.q_init = c.q_init + 100.0;
        // q_init range check only allows [0,1]; walk manually instead.
        let mut state = NasState::initial(&c);
        let mut actions = Vec::new();
        loop {
            let mut best = (f64::NEG_INFINITY, None);
            for action in legal_actions(&state, &c) {
                let q = shifted.q_or_init(&state, action, c.q_init + 100.0);
                if q > best.0 {
                    best = (q, Some(action));
                }
            }
            let action = best.1.unwrap();
            actions.push(action);
            match transition(&state, action, &c).unwrap() {
                Step::Continue(next) => state = next,
                Step::Finished(_) => break,
            }
        }
        let after = actions_to_arch(&actions).unwrap();
        assert_eq!(before, after);
    }
}
