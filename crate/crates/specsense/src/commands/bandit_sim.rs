use std::collections::BTreeMap;

use sensing_bandit::{
    run_scenario, AnalyticBank, DetectorBank, FramePlan, LiveBank, PdModel, PlanSection,
    PolicyKind, PolicySpec, RewardWeights, SensingAction, SignalRecipe,
};
use signal_engine::seeds::derive_seed;
use signal_engine::Hypothesis;

use crate::config::{BankConfig, BanditSimConfig, PolicyConfig, WeightsConfig};
use crate::csvout::{emit_csv, Value};
use crate::manifest::ManifestBuilder;
use crate::{CliError, Result};

fn to_weights(config: &Option<WeightsConfig>) -> RewardWeights {
    let c = config.clone().unwrap_or_default();
    RewardWeights {
        throughput_rate: c.throughput_rate,
        interference_penalty: c.interference_penalty,
        complexity_rate: c.complexity_rate,
        frame_us: c.frame_us,
        target_pfa: c.target_pfa,
    }
}

fn to_plan(config: &BanditSimConfig) -> Result<FramePlan> {
    let sections = config
        .plan
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let hypothesis = match s.hypothesis.as_str() {
                "H0" | "h0" => Hypothesis::H0,
                "H1" | "h1" => Hypothesis::H1,
                other => {
                    return Err(CliError::Config(format!(
                        "section {i}: hypothesis must be H0 or H1, got `{other}`"
                    )))
                }
            };
            Ok(PlanSection { frames: s.frames, hypothesis, gsnr_db: s.gsnr_db })
        })
        .collect::<Result<Vec<_>>>()?;
    FramePlan::new(sections).map_err(CliError::runtime)
}

fn to_bank(
    config: &BanditSimConfig,
    actions: &[SensingAction],
    weights: &RewardWeights,
) -> Result<DetectorBank> {
    match &config.bank {
        BankConfig::Logistic { midpoints_db, width_db } => {
            if midpoints_db.len() != actions.len() {
                return Err(CliError::Config(format!(
                    "bank has {} midpoints for {} actions",
                    midpoints_db.len(),
                    actions.len()
                )));
            }
            let mut curves = BTreeMap::new();
            for (action, mid) in actions.iter().zip(midpoints_db) {
                curves.insert(
                    action.id,
                    PdModel::Logistic { midpoint_db: *mid, width_db: *width_db },
                );
            }
            Ok(DetectorBank::Analytic(
                AnalyticBank::new(weights.target_pfa, curves).map_err(CliError::runtime)?,
            ))
        }
        BankConfig::Fixed { pd } => {
            if pd.len() != actions.len() {
                return Err(CliError::Config(format!(
                    "bank has {} Pd values for {} actions",
                    pd.len(),
                    actions.len()
                )));
            }
            let mut curves = BTreeMap::new();
            for (action, p) in actions.iter().zip(pd) {
                curves.insert(action.id, PdModel::Fixed(*p));
            }
            Ok(DetectorBank::Analytic(
                AnalyticBank::new(weights.target_pfa, curves).map_err(CliError::runtime)?,
            ))
        }
        BankConfig::Live { detector, signal, channel, noise, n_cal } => {
            let recipe = SignalRecipe {
                signal_kind: signal.to_kind(),
                noise: noise.to_spec(),
                channel_kind: channel.to_kind(),
                sample_interval: 50e-9,
            };
            LiveBank::calibrate(
                recipe,
                detector.to_kind(),
                actions,
                *n_cal,
                weights.target_pfa,
                derive_seed(config.seed, 0xCA1),
            )
            .map(DetectorBank::Live)
            .map_err(CliError::runtime)
        }
    }
}

struct ResolvedPolicy {
    label: String,
    spec: PolicySpec,
    /// Indices into the global action list this policy may play.
    arm_indices: Vec<usize>,
}

fn resolve_policy(
    config: &BanditSimConfig,
    policy: &PolicyConfig,
    actions: &[SensingAction],
) -> Result<ResolvedPolicy> {
    let all: Vec<usize> = (0..actions.len()).collect();
    let arm_indices = match &policy.arms {
        Some(subset) => {
            for &i in subset {
                if i >= actions.len() {
                    return Err(CliError::Config(format!(
                        "policy arm index {i} out of range for {} actions",
                        actions.len()
                    )));
                }
            }
            subset.clone()
        }
        None => all,
    };
    let kind = match policy.kind.as_str() {
        "egreedy" => PolicyKind::EpsilonGreedy,
        "gb" => PolicyKind::GradientBandit,
        "always" => {
            let arm = policy.arm.ok_or_else(|| {
                CliError::Config("`always` policies need an `arm` index".into())
            })?;
            let local = arm_indices.iter().position(|&i| i == arm).ok_or_else(|| {
                CliError::Config(format!("`always` arm {arm} not in this policy's arm set"))
            })?;
            PolicyKind::Always(local)
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown policy kind `{other}` (egreedy, gb, always)"
            )))
        }
    };
    let spec = PolicySpec {
        kind,
        epsilon: config.epsilon,
        alpha_lr: config.alpha_lr,
        alpha_pr: config.alpha_pr,
    };
    let restricted: Vec<SensingAction> = arm_indices.iter().map(|&i| actions[i]).collect();
    let label = policy.label.clone().unwrap_or_else(|| spec.label(&restricted));
    Ok(ResolvedPolicy { label, spec, arm_indices })
}

pub fn run(config: &BanditSimConfig, manifest: &mut ManifestBuilder) -> Result<()> {
    if config.n_seeds == 0 {
        return Err(CliError::Config("n_seeds must be >= 1".into()));
    }
    let weights = to_weights(&config.weights);
    weights.validate().map_err(CliError::runtime)?;
    let plan = to_plan(config)?;
    let actions: Vec<SensingAction> = config
        .actions_us
        .iter()
        .enumerate()
        .map(|(id, &us)| SensingAction::at_50ns(id, us))
        .collect();
    let bank = to_bank(config, &actions, &weights)?;

    let policies: Vec<ResolvedPolicy> = config
        .policies
        .iter()
        .map(|p| resolve_policy(config, p, &actions))
        .collect::<Result<_>>()?;
    {
        let mut labels: Vec<&String> = policies.iter().map(|p| &p.label).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != policies.len() {
            return Err(CliError::Config("policy labels must be unique".into()));
        }
    }

    let mut summary_rows = Vec::new();
    for policy in &policies {
        let restricted: Vec<SensingAction> =
            policy.arm_indices.iter().map(|&i| actions[i]).collect();
        let mut means = Vec::with_capacity(config.n_seeds);
        for s in 0..config.n_seeds {
            // The run seed depends only on the seed index, so every policy
            // faces common decision noise.
            let run_seed = derive_seed(config.seed, s as u64);
            let trace = run_scenario(&plan, &policy.spec, &restricted, &bank, &weights, run_seed)
                .map_err(CliError::runtime)?;
            if s == 0 {
                let smoothed = trace.smoothed_rewards(config.smoothing_window);
                let rows: Vec<Vec<Value>> = trace
                    .records
                    .iter()
                    .zip(&smoothed)
                    .map(|(r, sm)| {
                        vec![
                            Value::from(r.frame),
                            Value::from(r.section),
                            r.gsnr_db.map(Value::Float).unwrap_or(Value::Missing),
                            Value::from(match r.hypothesis {
                                Hypothesis::H0 => "H0",
                                Hypothesis::H1 => "H1",
                            }),
                            Value::from(r.action_id),
                            Value::from(match r.decision {
                                sensing_bandit::Decision::D0 => "D0",
                                sensing_bandit::Decision::D1 => "D1",
                            }),
                            Value::from(r.reward),
                            Value::from(*sm),
                        ]
                    })
                    .collect();
                let path = manifest.declare(&format!("trace_{}.csv", policy.label));
                emit_csv(
                    &path,
                    &[
                        "frame",
                        "section",
                        "gsnr_db",
                        "hypothesis",
                        "action_id",
                        "decision",
                        "reward",
                        "smoothed_reward",
                    ],
                    &rows,
                )?;
            }
            means.push(trace.mean_reward());
        }
        let mean = means.iter().sum::<f64>() / means.len() as f64;
        summary_rows.push(vec![Value::from(policy.label.clone()), Value::from(mean)]);
        eprintln!("bandit-sim: {} mean average reward {mean:.4}", policy.label);
    }
    let path = manifest.declare("summary.csv");
    emit_csv(&path, &["policy", "mean_average_reward"], &summary_rows)?;
    Ok(())
}
