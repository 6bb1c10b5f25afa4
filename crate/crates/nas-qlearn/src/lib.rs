//! Tabular Q-learning over the layer-selection MDP.
//!
//! An agent assembles a CNN one layer at a time: states encode the layer
//! index, the previous layer's hyperparameters, the pooling-permission
//! flag, and the running signal length; actions pick the next layer from
//! small menus of convolutions and poolings or terminate with global
//! average pooling. The terminal reward is the evaluated accuracy of the
//! finished architecture, propagated backward with a 1/N visit-count step
//! size so every action value is the running mean of its targets.

mod count;
mod error;
mod mdp;
mod qtable;
mod search;

pub use count::count_search_space;
pub use error::NasError;
pub use mdp::{
    legal_actions, transition, EpsilonSchedule, NasAction, NasConfig, NasState, PrevLayer, Step,
    TerminalState,
};
pub use qtable::{extract_best, update_q, QEntry, QTable};
pub use search::{run_search, run_search_resumed, sample_episode, EpisodeRecord, SearchOutcome, Trajectory};

pub type Result<T> = std::result::Result<T, NasError>;
