//! Multi-armed-bandit selection of the sensing time.
//!
//! A secondary user splits each frame into a sensing interval and a
//! transmission interval. Longer sensing detects weak primary users more
//! reliably but costs throughput and energy; the right choice depends on
//! the (unobserved, drifting) channel condition. This crate provides the
//! per-frame reward bookkeeping, epsilon-greedy and gradient-bandit
//! policies with constant step sizes, closed-form expected rewards, and a
//! frame-by-frame simulator over non-stationary section plans, backed by
//! either analytic detection-probability curves or live detectors.

mod bank;
mod error;
mod policy;
mod reward;
mod scenario;
pub mod scenarios;

pub use bank::{AnalyticBank, DetectorBank, LiveArm, LiveBank, PdModel, SignalRecipe};
pub use error::BanditError;
pub use policy::{gb_probabilities, BanditAgent};
pub use reward::{expected_reward, frame_reward, Decision, RewardWeights, SensingAction};
pub use scenario::{
    run_scenario, FramePlan, FrameRecord, PlanSection, PolicyKind, PolicySpec, ScenarioTrace,
};

pub type Result<T> = std::result::Result<T, BanditError>;
