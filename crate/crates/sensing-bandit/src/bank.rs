//! Detection models behind the frame simulator.
//!
//! Analytic banks map (action, GSNR) to a detection probability directly;
//! live banks run a calibrated statistic on a freshly generated signal
//! every frame. Analytic tables are typically produced offline by Monte
//! Carlo calibration of a live bank at each (action, GSNR) pair.

use std::collections::BTreeMap;

use detectors::{calibrate_threshold, DetectorKind};
use rand::{Rng, SeedableRng};
use signal_engine::seeds::derive_seed;
use signal_engine::{gen_signal_under, ChannelKind, Hypothesis, NoiseSpec, SignalKind};

use crate::error::BanditError;
use crate::reward::{Decision, SensingAction};
use crate::Result;

/// How a live bank manufactures its per-frame signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalRecipe {
    pub signal_kind: SignalKind,
    pub noise: NoiseSpec,
    pub channel_kind: ChannelKind,
    pub sample_interval: f64,
}

/// Detection probability as a function of GSNR for one action.
#[derive(Debug, Clone, PartialEq)]
pub enum PdModel {
    /// Constant probability at every GSNR.
    Fixed(f64),
    /// Three-interval curve: p_fa at low GSNR rising to 1, with the given
    /// midpoint and logistic width in dB.
    Logistic { midpoint_db: f64, width_db: f64 },
    /// Piecewise-linear interpolation over sorted (gsnr_db, pd) knots;
    /// GSNRs outside the knot range are uncovered.
    Table(Vec<(f64, f64)>),
}

impl PdModel {
    fn pd(&self, gsnr_db: f64, p_fa: f64) -> Option<f64> {
        match self {
            PdModel::Fixed(p) => Some(*p),
            PdModel::Logistic { midpoint_db, width_db } => {
                let z = (gsnr_db - midpoint_db) / width_db;
                Some(p_fa + (1.0 - p_fa) / (1.0 + (-z).exp()))
            }
            PdModel::Table(knots) => {
                let (first, last) = (knots.first()?, knots.last()?);
                if gsnr_db < first.0 || gsnr_db > last.0 {
                    return None;
                }
                let i = knots.partition_point(|(g, _)| *g <= gsnr_db).saturating_sub(1);
                let (g0, p0) = knots[i];
                if i + 1 == knots.len() {
                    return Some(p0);
                }
                let (g1, p1) = knots[i + 1];
                Some(p0 + (p1 - p0) * (gsnr_db - g0) / (g1 - g0))
            }
        }
    }
}

/// Per-action detection-probability curves plus the shared false-alarm
/// rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticBank {
    p_fa: f64,
    curves: BTreeMap<usize, PdModel>,
}

impl AnalyticBank {
    pub fn new(p_fa: f64, curves: BTreeMap<usize, PdModel>) -> Result<Self> {
        if !(p_fa > 0.0 && p_fa < 1.0) {
            return Err(BanditError::InvalidArgument("p_fa must lie in (0, 1)".into()));
        }
        for (id, model) in &curves {
            let valid = match model {
                PdModel::Fixed(p) => (0.0..=1.0).contains(p),
                PdModel::Logistic { width_db, .. } => *width_db > 0.0,
                PdModel::Table(knots) => {
                    !knots.is_empty()
                        && knots.windows(2).all(|w| w[0].0 < w[1].0)
                        && knots.iter().all(|(_, p)| (0.0..=1.0).contains(p))
                }
            };
            if !valid {
                return Err(BanditError::InvalidArgument(format!(
                    "malformed Pd model for action {id}"
                )));
            }
        }
        Ok(Self { p_fa, curves })
    }

    pub fn p_fa(&self) -> f64 {
        self.p_fa
    }

    pub fn pd(&self, action_id: usize, gsnr_db: f64) -> Result<f64> {
        self.curves
            .get(&action_id)
            .and_then(|m| m.pd(gsnr_db, self.p_fa))
            .ok_or(BanditError::UncoveredGsnr { action_id, gsnr_db })
    }

    /// Checks the dominance shape at the probe GSNRs: at equal GSNR a
    /// longer sensing time never detects worse.
    pub fn validate_monotone(&self, actions: &[SensingAction], gsnrs: &[f64]) -> Result<()> {
        let mut ordered: Vec<&SensingAction> = actions.iter().collect();
        ordered.sort_by(|a, b| a.sensing_time_us.partial_cmp(&b.sensing_time_us).unwrap());
        for &g in gsnrs {
            let mut prev: Option<f64> = None;
            for action in &ordered {
                let pd = self.pd(action.id, g)?;
                if let Some(p) = prev {
                    if pd < p - 1e-12 {
                        return Err(BanditError::InvalidArgument(format!(
                            "Pd not monotone in sensing time at {g} dB"
                        )));
                    }
                }
                prev = Some(pd);
            }
        }
        Ok(())
    }
}

/// One live detector: a statistic and its calibrated threshold at the
/// action's sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveArm {
    pub detector: DetectorKind,
    pub threshold: f64,
    pub sample_count: usize,
}

/// Live per-frame detection: each arm generates a fresh signal under the
/// true hypothesis and compares its statistic to the calibrated threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveBank {
    pub recipe: SignalRecipe,
    pub arms: BTreeMap<usize, LiveArm>,
    pub target_pfa: f64,
}

impl LiveBank {
    /// Builds a live bank by calibrating the detector's threshold on
    /// `n_cal` fresh noise-only signals per action.
    pub fn calibrate(
        recipe: SignalRecipe,
        detector: DetectorKind,
        actions: &[SensingAction],
        n_cal: usize,
        target_pfa: f64,
        seed: u64,
    ) -> Result<Self> {
        let mut arms = BTreeMap::new();
        for (k, action) in actions.iter().enumerate() {
            let stats: Vec<f64> = (0..n_cal)
                .map(|i| {
                    let sig = gen_signal_under(
                        Hypothesis::H0,
                        recipe.signal_kind,
                        &recipe.noise,
                        recipe.channel_kind,
                        action.sample_count,
                        recipe.sample_interval,
                        None,
                        derive_seed(seed, (k * n_cal + i) as u64),
                    )
                    .map_err(|e| BanditError::Detector(e.to_string()))?;
                    detector
                        .statistic(&sig)
                        .map_err(|e| BanditError::Detector(e.to_string()))
                })
                .collect::<Result<_>>()?;
            let threshold = calibrate_threshold(&stats, target_pfa)
                .map_err(|e| BanditError::Detector(e.to_string()))?;
            arms.insert(
                action.id,
                LiveArm {
                    detector,
                    threshold: threshold.value,
                    sample_count: action.sample_count,
                },
            );
        }
        Ok(Self { recipe, arms, target_pfa })
    }
}

/// The detection model a scenario runs against.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectorBank {
    Analytic(AnalyticBank),
    Live(LiveBank),
}

impl DetectorBank {
    /// Samples the detector's decision for one frame. All randomness comes
    /// from the frame seed, so two policies sharing a scenario seed see
    /// common decision noise wherever their action choices coincide.
    pub(crate) fn decide(
        &self,
        action_id: usize,
        hypothesis: Hypothesis,
        gsnr_db: Option<f64>,
        frame_seed: u64,
    ) -> Result<Decision> {
        match self {
            DetectorBank::Analytic(bank) => {
                let p_d1 = match hypothesis {
                    Hypothesis::H0 => bank.p_fa(),
                    Hypothesis::H1 => {
                        let g = gsnr_db.ok_or_else(|| {
                            BanditError::InvalidArgument("H1 frame without GSNR".into())
                        })?;
                        bank.pd(action_id, g)?
                    }
                };
                let u = rand_chacha::ChaCha8Rng::seed_from_u64(frame_seed).gen::<f64>();
                Ok(if u < p_d1 { Decision::D1 } else { Decision::D0 })
            }
            DetectorBank::Live(bank) => {
                let arm = bank.arms.get(&action_id).ok_or_else(|| {
                    BanditError::InvalidArgument(format!("no live arm for action {action_id}"))
                })?;
                let signal = gen_signal_under(
                    hypothesis,
                    bank.recipe.signal_kind,
                    &bank.recipe.noise,
                    bank.recipe.channel_kind,
                    arm.sample_count,
                    bank.recipe.sample_interval,
                    gsnr_db,
                    frame_seed,
                )
                .map_err(|e| BanditError::Detector(e.to_string()))?;
                let stat = arm
                    .detector
                    .statistic(&signal)
                    .map_err(|e| BanditError::Detector(e.to_string()))?;
                Ok(if stat > arm.threshold { Decision::D1 } else { Decision::D0 })
            }
        }
    }

    /// The false-alarm rate the bank was built for.
    pub fn target_pfa(&self) -> f64 {
        match self {
            DetectorBank::Analytic(bank) => bank.p_fa(),
            DetectorBank::Live(bank) => bank.target_pfa,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn logistic_curve_shape() {
        let mut curves = BTreeMap::new();
        curves.insert(0, PdModel::Logistic { midpoint_db: 8.0, width_db: 2.0 });
        let bank = AnalyticBank::new(0.01, curves).unwrap();
        let low = bank.pd(0, -30.0).unwrap();
        let mid = bank.pd(0, 8.0).unwrap();
        let high = bank.pd(0, 40.0).unwrap();
        assert!((low - 0.01).abs() < 1e-4, "low tail {low}");
        assert!((mid - 0.505).abs() < 1e-12, "midpoint {mid}");
        assert!(high > 0.9999, "high tail {high}");
    }

    #[test]
    fn table_interpolates_and_rejects_outside() {
        let mut curves = BTreeMap::new();
        curves.insert(3, PdModel::Table(vec![(-5.0, 0.02), (0.0, 0.5), (5.0, 0.9)]));
        let bank = AnalyticBank::new(0.01, curves).unwrap();
        assert!((bank.pd(3, -2.5).unwrap() - 0.26).abs() < 1e-12);
        assert_eq!(bank.pd(3, 5.0).unwrap(), 0.9);
        assert!(matches!(
            bank.pd(3, 10.0),
            Err(BanditError::UncoveredGsnr { action_id: 3, .. })
        ));
        assert!(matches!(bank.pd(7, 0.0), Err(BanditError::UncoveredGsnr { .. })));
    }

    #[test]
    fn monotone_validation() {
        let actions = [SensingAction::at_50ns(0, 8.0), SensingAction::at_50ns(1, 32.0)];
        let mut curves = BTreeMap::new();
        curves.insert(0, PdModel::Logistic { midpoint_db: 8.0, width_db: 2.0 });
        curves.insert(1, PdModel::Logistic { midpoint_db: 4.5, width_db: 2.0 });
        let bank = AnalyticBank::new(0.01, curves).unwrap();
        bank.validate_monotone(&actions, &[-10.0, 0.0, 8.0, 15.0, 30.0]).unwrap();

        // Swapping the curves breaks dominance.
        let mut curves = BTreeMap::new();
        curves.insert(0, PdModel::Logistic { midpoint_db: 4.5, width_db: 2.0 });
        curves.insert(1, PdModel::Logistic { midpoint_db: 8.0, width_db: 2.0 });
        let bank = AnalyticBank::new(0.01, curves).unwrap();
        assert!(bank.validate_monotone(&actions, &[8.0]).is_err());
    }

    #[test]
    fn live_bank_calibrates_near_target() {
        let recipe = SignalRecipe {
            signal_kind: SignalKind::Gaussian,
            noise: NoiseSpec::Cscwg { variance: 1.0 },
            channel_kind: ChannelKind::Flat,
            sample_interval: 50e-9,
        };
        let actions = [SensingAction::at_50ns(0, 8.0)];
        let bank =
            LiveBank::calibrate(recipe, DetectorKind::Energy, &actions, 2_000, 0.05, 9).unwrap();
        let arm = &bank.arms[&0];
        // Fresh noise above threshold roughly five percent of the time.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 4_000;
        let mut alarms = 0;
        for i in 0..n {
            let sig = gen_signal_under(
                Hypothesis::H0,
                recipe.signal_kind,
                &recipe.noise,
                recipe.channel_kind,
                arm.sample_count,
                recipe.sample_interval,
                None,
                derive_seed(rng.gen(), i as u64),
            )
            .unwrap();
            if arm.detector.statistic(&sig).unwrap() > arm.threshold {
                alarms += 1;
            }
        }
        let pfa = alarms as f64 / n as f64;
        assert!((0.03..=0.07).contains(&pfa), "realized pfa {pfa}");
    }
}
