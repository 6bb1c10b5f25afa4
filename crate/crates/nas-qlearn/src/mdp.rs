//! States, actions, and transitions of the layer-selection MDP.

use cnn_engine::{ArchSpec, LayerSpec};

use crate::error::NasError;
use crate::Result;

/// Exploration-rate schedule over episode indices.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsilonSchedule {
    /// epsilon(n) = max(1 - n / (decay_fraction * episodes), 0): a full
    /// exploratory policy decaying to greedy over the first
    /// `decay_fraction` of the budget.
    Linear { decay_fraction: f64 },
    Constant(f64),
}

impl EpsilonSchedule {
    pub fn epsilon(&self, episode: usize, total_episodes: usize) -> f64 {
        match *self {
            EpsilonSchedule::Linear { decay_fraction } => {
                let horizon = decay_fraction * total_episodes as f64;
                (1.0 - episode as f64 / horizon).max(0.0)
            }
            EpsilonSchedule::Constant(eps) => eps,
        }
    }
}

/// Search-space and schedule configuration.
///
/// `max_layers` caps the number of convolution/pooling layers; once an
/// episode has placed that many the only remaining action is GAP, so
/// trajectories hold at most `max_layers + 1` actions.
#[derive(Debug, Clone, PartialEq)]
pub struct NasConfig {
    pub max_layers: usize,
    /// Pooling permission drops once the signal would shrink below this.
    pub min_length: usize,
    pub input_length: usize,
    pub filter_counts: Vec<usize>,
    pub filter_sizes: Vec<usize>,
    pub pool_sizes: Vec<usize>,
    pub episodes: usize,
    pub epsilon: EpsilonSchedule,
    /// Value assumed for state-action pairs never visited.
    pub q_init: f64,
    /// Weight of the bootstrapped successor maximum in the update target.
    pub discount: f64,
    /// Reuse the first evaluation of a repeated architecture.
    pub cache_rewards: bool,
}

impl NasConfig {
    /// The published search-space constants: eight layers maximum, signal
    /// floor of eight samples, filter counts {8,16,32,64}, filter sizes
    /// {3,5}, pooling sizes {2,4}.
    pub fn paper_default(input_length: usize) -> Self {
        Self {
            max_layers: 8,
            min_length: 8,
            input_length,
            filter_counts: vec![8, 16, 32, 64],
            filter_sizes: vec![3, 5],
            pool_sizes: vec![2, 4],
            episodes: 3000,
            epsilon: EpsilonSchedule::Linear { decay_fraction: 0.9 },
            q_init: 0.5,
            discount: 1.0,
            cache_rewards: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_layers < 2 {
            return Err(NasError::InvalidArgument("max_layers must be >= 2".into()));
        }
        if self.min_length == 0 || self.input_length == 0 {
            return Err(NasError::InvalidArgument("lengths must be >= 1".into()));
        }
        if self.filter_counts.is_empty() || self.filter_sizes.is_empty() || self.pool_sizes.is_empty()
        {
            return Err(NasError::InvalidArgument("layer menus must be non-empty".into()));
        }
        if self.episodes == 0 {
            return Err(NasError::InvalidArgument("episode budget must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.q_init) || !(0.0..=1.0).contains(&self.discount) {
            return Err(NasError::InvalidArgument(
                "q_init and discount must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// The hyperparameters of the most recently placed layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrevLayer {
    Conv { n_filters: usize, kernel_size: usize },
    Pool { pool_size: usize },
}

/// A non-terminal MDP state. `layer_index` counts placed layers, so the
/// initial state has index 0 and no previous layer.
///
/// Only the previous layer's hyperparameters are encoded, so two different
/// prefixes that agree on layer count, last layer, pooling permission, and
/// running length share one state (and one row of action values).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NasState {
    pub layer_index: usize,
    pub prev: Option<PrevLayer>,
    pub pooling_allowed: bool,
    pub signal_length: usize,
}

impl NasState {
    pub fn initial(config: &NasConfig) -> Self {
        Self {
            layer_index: 0,
            prev: None,
            pooling_allowed: true,
            signal_length: config.input_length,
        }
    }

    /// Canonical text key, e.g. `l=2;prev=C64x3;pp=1;len=100`.
    pub fn key(&self) -> String {
        let prev = match self.prev {
            None => "-".to_string(),
            Some(PrevLayer::Conv { n_filters, kernel_size }) => format!("C{n_filters}x{kernel_size}"),
            Some(PrevLayer::Pool { pool_size }) => format!("P{pool_size}"),
        };
        format!(
            "l={};prev={};pp={};len={}",
            self.layer_index,
            prev,
            u8::from(self.pooling_allowed),
            self.signal_length
        )
    }

    /// Parses the form produced by [`NasState::key`].
    pub fn parse_key(text: &str) -> Result<Self> {
        let bad = || NasError::InvalidArgument(format!("malformed state key `{text}`"));
        let mut fields = text.split(';');
        let mut expect = |prefix: &str| -> Result<String> {
            fields
                .next()
                .and_then(|f| f.strip_prefix(prefix))
                .map(str::to_string)
                .ok_or_else(bad)
        };
        let layer_index = expect("l=")?.parse().map_err(|_| bad())?;
        let prev_text = expect("prev=")?;
        let prev = match prev_text.as_str() {
            "-" => None,
            other => match NasAction::parse_token(other)? {
                NasAction::Conv { n_filters, kernel_size } => {
                    Some(PrevLayer::Conv { n_filters, kernel_size })
                }
                NasAction::Pool { pool_size } => Some(PrevLayer::Pool { pool_size }),
                NasAction::Gap => return Err(bad()),
            },
        };
        let pooling_allowed = match expect("pp=")?.as_str() {
            "0" => false,
            "1" => true,
            _ => return Err(bad()),
        };
        let signal_length = expect("len=")?.parse().map_err(|_| bad())?;
        Ok(Self { layer_index, prev, pooling_allowed, signal_length })
    }
}

/// Terminal-state encoding reached by choosing GAP; carries the previous
/// layer's fields. All terminal states share the fixed value 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TerminalState {
    pub layer_index: usize,
    pub prev: Option<PrevLayer>,
    pub pooling_allowed: bool,
}

/// One action: the next layer's hyperparameters, or GAP to finish.
///
/// The derived ordering is the canonical tie-break ordering: GAP sorts
/// first (type code 0), then convolutions by (filters, size), then
/// poolings by size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NasAction {
    Gap,
    Conv { n_filters: usize, kernel_size: usize },
    Pool { pool_size: usize },
}

impl NasAction {
    pub fn token(&self) -> String {
        match *self {
            NasAction::Gap => "GAP".to_string(),
            NasAction::Conv { n_filters, kernel_size } => format!("C{n_filters}x{kernel_size}"),
            NasAction::Pool { pool_size } => format!("P{pool_size}"),
        }
    }

    pub fn to_layer(&self) -> LayerSpec {
        match *self {
            NasAction::Gap => LayerSpec::Gap,
            NasAction::Conv { n_filters, kernel_size } => {
                LayerSpec::Conv { n_filters, kernel_size }
            }
            NasAction::Pool { pool_size } => LayerSpec::Pool { pool_size },
        }
    }

    /// Parses the form produced by [`NasAction::token`].
    pub fn parse_token(text: &str) -> Result<Self> {
        let bad = || NasError::InvalidArgument(format!("malformed action token `{text}`"));
        if text.eq_ignore_ascii_case("GAP") {
            return Ok(NasAction::Gap);
        }
        if let Some(rest) = text.strip_prefix(['C', 'c']) {
            let (nf, ks) = rest.split_once(['x', 'X']).ok_or_else(bad)?;
            return Ok(NasAction::Conv {
                n_filters: nf.parse().map_err(|_| bad())?,
                kernel_size: ks.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = text.strip_prefix(['P', 'p']) {
            return Ok(NasAction::Pool { pool_size: rest.parse().map_err(|_| bad())? });
        }
        Err(bad())
    }
}

/// Result of applying an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Continue(NasState),
    Finished(TerminalState),
}

/// Legal actions in canonical order. The initial state admits only
/// convolutions; once `max_layers` layers are placed only GAP remains;
/// otherwise every convolution, GAP, and any pooling that fits the
/// current length while pooling is still permitted.
pub fn legal_actions(state: &NasState, config: &NasConfig) -> Vec<NasAction> {
    if state.layer_index >= config.max_layers {
        return vec![NasAction::Gap];
    }
    let mut actions = Vec::with_capacity(
        config.filter_counts.len() * config.filter_sizes.len() + config.pool_sizes.len() + 1,
    );
    if state.layer_index > 0 {
        actions.push(NasAction::Gap);
    }
    for &n_filters in &config.filter_counts {
        for &kernel_size in &config.filter_sizes {
            actions.push(NasAction::Conv { n_filters, kernel_size });
        }
    }
    if state.layer_index > 0 && state.pooling_allowed {
        for &pool_size in &config.pool_sizes {
            if state.signal_length >= pool_size {
                actions.push(NasAction::Pool { pool_size });
            }
        }
    }
    actions.sort_unstable();
    actions
}

/// Applies an action: convolutions preserve the signal length, poolings
/// divide it (revoking pooling permission once it falls below the
/// configured floor), and GAP finishes the episode.
pub fn transition(state: &NasState, action: NasAction, config: &NasConfig) -> Result<Step> {
    if !legal_actions(state, config).contains(&action) {
        return Err(NasError::InvalidArgument(format!(
            "action {} is not legal in state {}",
            action.token(),
            state.key()
        )));
    }
    Ok(match action {
        NasAction::Gap => Step::Finished(TerminalState {
            layer_index: state.layer_index + 1,
            prev: state.prev,
            pooling_allowed: state.pooling_allowed,
        }),
        NasAction::Conv { n_filters, kernel_size } => Step::Continue(NasState {
            layer_index: state.layer_index + 1,
            prev: Some(PrevLayer::Conv { n_filters, kernel_size }),
            pooling_allowed: state.pooling_allowed,
            signal_length: state.signal_length,
        }),
        NasAction::Pool { pool_size } => {
            let new_length = state.signal_length / pool_size;
            Step::Continue(NasState {
                layer_index: state.layer_index + 1,
                prev: Some(PrevLayer::Pool { pool_size }),
                pooling_allowed: state.pooling_allowed && new_length >= config.min_length,
                signal_length: new_length,
            })
        }
    })
}

/// Builds the architecture a finished action sequence describes.
pub fn actions_to_arch(actions: &[NasAction]) -> Result<ArchSpec> {
    ArchSpec::new(actions.iter().map(NasAction::to_layer).collect())
        .map_err(|e| NasError::InvalidArgument(e.to_string()))
}
