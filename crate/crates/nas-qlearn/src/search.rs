//! Episode sampling and the outer search loop.

use std::collections::HashMap;

use cnn_engine::ArchSpec;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mdp::{actions_to_arch, legal_actions, transition, NasAction, NasConfig, NasState, Step};
use crate::qtable::{update_q, QTable};
use crate::{NasError, Result};

/// One finished episode: the visited (state, action) pairs in order. The
/// first action is a convolution and the last action is GAP.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    steps: Vec<(NasState, NasAction)>,
}

impl Trajectory {
    pub(crate) fn from_steps(steps: Vec<(NasState, NasAction)>) -> Self {
        Self { steps }
    }

    /// Builds a trajectory from explicit steps, checking the structural
    /// invariants against the configuration.
    pub fn new(steps: Vec<(NasState, NasAction)>, config: &NasConfig) -> Result<Self> {
        let t = Self { steps };
        t.validate(config)?;
        Ok(t)
    }

    pub fn steps(&self) -> &[(NasState, NasAction)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The architecture this episode assembled.
    pub fn arch(&self) -> Result<ArchSpec> {
        let actions: Vec<NasAction> = self.steps.iter().map(|(_, a)| *a).collect();
        actions_to_arch(&actions)
    }

    /// Structural invariants: non-empty, conv first, GAP last and only
    /// last, at most `max_layers` non-GAP actions.
    pub fn validate(&self, config: &NasConfig) -> Result<()> {
        if self.steps.is_empty() {
            return Err(NasError::InvalidArgument("empty trajectory".into()));
        }
        if !matches!(self.steps[0].1, NasAction::Conv { .. }) {
            return Err(NasError::InvalidArgument("first action must be a convolution".into()));
        }
        let gaps = self
            .steps
            .iter()
            .filter(|(_, a)| matches!(a, NasAction::Gap))
            .count();
        if gaps != 1 || !matches!(self.steps.last().unwrap().1, NasAction::Gap) {
            return Err(NasError::InvalidArgument("exactly one terminal GAP is required".into()));
        }
        if self.steps.len() > config.max_layers + 1 {
            return Err(NasError::InvalidArgument(format!(
                "trajectory of {} actions exceeds the layer cap {}",
                self.steps.len(),
                config.max_layers
            )));
        }
        Ok(())
    }
}

/// Samples one episode under the epsilon-greedy behavior policy: the
/// greedy action (max stored value, unseen pairs at `q_init`, canonical
/// tie-break) with probability 1 - eps + eps/|A|, any other legal action
/// with probability eps/|A| each.
pub fn sample_episode<R: Rng>(
    table: &QTable,
    epsilon: f64,
    config: &NasConfig,
    rng: &mut R,
) -> Result<Trajectory> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(NasError::InvalidArgument(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    let mut state = NasState::initial(config);
    let mut steps = Vec::new();
    loop {
        let action = if rng.gen::<f64>() < epsilon {
            let legal = legal_actions(&state, config);
            legal[rng.gen_range(0..legal.len())]
        } else {
            table.greedy_action(&state, config, config.q_init)
        };
        steps.push((state, action));
        match transition(&state, action, config)? {
            Step::Continue(next) => state = next,
            Step::Finished(_) => return Ok(Trajectory::from_steps(steps)),
        }
    }
}

/// One line of the episode log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub epsilon: f64,
    pub arch_tokens: String,
    pub reward: f64,
}

/// Final table and per-episode log of a search run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub table: QTable,
    pub episodes: Vec<EpisodeRecord>,
}

impl SearchOutcome {
    pub fn best_arch(&self, config: &NasConfig) -> Result<ArchSpec> {
        crate::qtable::extract_best(&self.table, config)
    }
}

/// Runs the search from a fresh table.
pub fn run_search<F>(config: &NasConfig, seed: u64, evaluator: F) -> Result<SearchOutcome>
where
    F: FnMut(&ArchSpec) -> std::result::Result<f64, String>,
{
    run_search_resumed(config, QTable::new(), seed, evaluator)
}

/// Runs the search continuing from a previously saved table; visit counts
/// keep growing monotonically, which lets long searches be split across
/// runs.
///
/// Each episode samples a trajectory, evaluates its architecture (through
/// a reward cache unless disabled), and applies the backward update.
pub fn run_search_resumed<F>(
    config: &NasConfig,
    mut table: QTable,
    seed: u64,
    mut evaluator: F,
) -> Result<SearchOutcome>
where
    F: FnMut(&ArchSpec) -> std::result::Result<f64, String>,
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache: HashMap<String, f64> = HashMap::new();
    let mut episodes = Vec::with_capacity(config.episodes);
    for episode in 0..config.episodes {
        let epsilon = config.epsilon.epsilon(episode, config.episodes);
        let trajectory = sample_episode(&table, epsilon, config, &mut rng)?;
        let arch = trajectory.arch()?;
        let tokens = arch.tokens();
        let reward = match cache.get(&tokens) {
            Some(&r) if config.cache_rewards => r,
            _ => {
                let r = evaluator(&arch)
                    .map_err(|message| NasError::EvaluatorFailed { episode, message })?;
                if !(0.0..=1.0).contains(&r) {
                    return Err(NasError::EvaluatorFailed {
                        episode,
                        message: format!("reward {r} outside [0, 1]"),
                    });
                }
                cache.insert(tokens.clone(), r);
                r
            }
        };
        update_q(&mut table, &trajectory, reward, config)?;
        episodes.push(EpisodeRecord { episode, epsilon, arch_tokens: tokens, reward });
    }
    Ok(SearchOutcome { table, episodes })
}
