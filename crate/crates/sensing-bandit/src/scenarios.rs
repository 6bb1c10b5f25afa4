//! Ready-made non-stationary scenarios: the published section plans with
//! matching action spaces and monotone analytic detection banks.

use std::collections::BTreeMap;

use signal_engine::Hypothesis;

use crate::bank::{AnalyticBank, DetectorBank, PdModel};
use crate::reward::SensingAction;
use crate::scenario::{FramePlan, PlanSection};
use crate::Result;

fn h1(frames: usize, gsnr_db: f64) -> PlanSection {
    PlanSection { frames, hypothesis: Hypothesis::H1, gsnr_db: Some(gsnr_db) }
}

fn h0(frames: usize) -> PlanSection {
    PlanSection { frames, hypothesis: Hypothesis::H0, gsnr_db: None }
}

/// Five sections of 200 frames: occupied at 15, 8, 0, and -5 dB, then
/// idle.
pub fn five_section_plan() -> FramePlan {
    FramePlan::new(vec![h1(200, 15.0), h1(200, 8.0), h1(200, 0.0), h1(200, -5.0), h0(200)])
        .expect("fixed plan is valid")
}

/// Eight sections of 100 frames: occupied at 30 down to 0 dB in 5 dB
/// steps, then idle.
pub fn eight_section_plan() -> FramePlan {
    FramePlan::new(vec![
        h1(100, 30.0),
        h1(100, 25.0),
        h1(100, 20.0),
        h1(100, 15.0),
        h1(100, 10.0),
        h1(100, 5.0),
        h1(100, 0.0),
        h0(100),
    ])
    .expect("fixed plan is valid")
}

/// Short and long sensing times: 8 and 32 us.
pub fn two_arm_actions() -> Vec<SensingAction> {
    vec![SensingAction::at_50ns(0, 8.0), SensingAction::at_50ns(3, 32.0)]
}

/// The four-option menu: 8, 16, 24, and 32 us.
pub fn four_arm_actions() -> Vec<SensingAction> {
    vec![
        SensingAction::at_50ns(0, 8.0),
        SensingAction::at_50ns(1, 16.0),
        SensingAction::at_50ns(2, 24.0),
        SensingAction::at_50ns(3, 32.0),
    ]
}

/// Logistic midpoint (dB) for a sensing time: longer windows detect the
/// same GSNR more reliably, so the curve midpoint slides down from 8 dB at
/// 8 us to 4.5 dB at 32 us.
fn midpoint_db(sensing_time_us: f64) -> f64 {
    match sensing_time_us {
        t if t <= 8.0 => 8.0,
        t if t <= 16.0 => 6.5,
        t if t <= 24.0 => 5.5,
        _ => 4.5,
    }
}

/// Monotone analytic bank with three-interval logistic Pd curves for the
/// given actions at the shared false-alarm target.
pub fn logistic_bank(actions: &[SensingAction], p_fa: f64) -> Result<DetectorBank> {
    let mut curves = BTreeMap::new();
    for action in actions {
        curves.insert(
            action.id,
            PdModel::Logistic { midpoint_db: midpoint_db(action.sensing_time_us), width_db: 2.0 },
        );
    }
    Ok(DetectorBank::Analytic(AnalyticBank::new(p_fa, curves)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plans_have_published_shapes() {
        let five = five_section_plan();
        assert_eq!(five.sections().len(), 5);
        assert_eq!(five.total_frames(), 1000);
        let eight = eight_section_plan();
        assert_eq!(eight.sections().len(), 8);
        assert_eq!(eight.total_frames(), 800);
    }

    #[test]
    fn banks_cover_their_plans() {
        let bank = logistic_bank(&two_arm_actions(), 0.01).unwrap();
        if let DetectorBank::Analytic(b) = &bank {
            b.validate_monotone(&two_arm_actions(), &five_section_plan().h1_gsnrs())
                .unwrap();
        }
        let bank = logistic_bank(&four_arm_actions(), 0.01).unwrap();
        if let DetectorBank::Analytic(b) = &bank {
            b.validate_monotone(&four_arm_actions(), &eight_section_plan().h1_gsnrs())
                .unwrap();
        }
    }
}
