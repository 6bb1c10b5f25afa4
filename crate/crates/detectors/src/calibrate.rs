//! Threshold calibration and detection-rate evaluation.

use signal_engine::Hypothesis;

use crate::error::DetectorError;
use crate::Result;

/// A detection threshold calibrated to a target false-alarm rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorThreshold {
    pub value: f64,
    pub target_pfa: f64,
    pub calibration_size: usize,
}

/// One operating point of a detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub pd: f64,
    pub pfa: f64,
    /// SNR/GSNR context of the measurement; NaN when not applicable.
    pub snr_db: f64,
}

impl RatePoint {
    pub fn with_snr(mut self, snr_db: f64) -> Self {
        self.snr_db = snr_db;
        self
    }
}

/// Empirical (1 - target_pfa) quantile of H0 statistics, using the higher
/// order statistic so the realized calibration-set Pfa never exceeds the
/// target.
pub fn calibrate_threshold(h0_stats: &[f64], target_pfa: f64) -> Result<DetectorThreshold> {
    if !(target_pfa > 0.0 && target_pfa < 1.0) {
        return Err(DetectorError::InvalidArgument(format!(
            "target Pfa must lie in (0, 1), got {target_pfa}"
        )));
    }
    let n = h0_stats.len();
    if (n as f64) < 1.0 / target_pfa {
        return Err(DetectorError::InvalidArgument(format!(
            "calibration set of {n} is too small for Pfa target {target_pfa}"
        )));
    }
    if h0_stats.iter().any(|s| !s.is_finite()) {
        return Err(DetectorError::InvalidArgument("non-finite calibration statistic".into()));
    }
    let mut sorted = h0_stats.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = 1.0 - target_pfa;
    let idx = ((n - 1) as f64 * q).ceil() as usize;
    Ok(DetectorThreshold {
        value: sorted[idx],
        target_pfa,
        calibration_size: n,
    })
}

/// Fraction of H1 statistics above the threshold (pd) and of H0 statistics
/// above it (pfa). Both classes must be represented.
pub fn empirical_rates(stats: &[f64], labels: &[Hypothesis], threshold: f64) -> Result<RatePoint> {
    if stats.len() != labels.len() {
        return Err(DetectorError::InvalidArgument(format!(
            "stats and labels must be parallel: {} vs {}",
            stats.len(),
            labels.len()
        )));
    }
    let (mut h0, mut h1, mut fa, mut det) = (0usize, 0usize, 0usize, 0usize);
    for (&s, &label) in stats.iter().zip(labels) {
        match label {
            Hypothesis::H0 => {
                h0 += 1;
                if s > threshold {
                    fa += 1;
                }
            }
            Hypothesis::H1 => {
                h1 += 1;
                if s > threshold {
                    det += 1;
                }
            }
        }
    }
    if h0 == 0 || h1 == 0 {
        return Err(DetectorError::InvalidArgument(
            "both hypotheses must be present to estimate rates".into(),
        ));
    }
    Ok(RatePoint {
        pd: det as f64 / h1 as f64,
        pfa: fa as f64 / h0 as f64,
        snr_db: f64::NAN,
    })
}

/// Sweeps `n_points` thresholds over the pooled range of both statistic
/// sets, from just below the pooled minimum (pd = pfa = 1) up to the pooled
/// maximum (pd = pfa = 0). Both pd and pfa are non-increasing along the
/// returned curve.
pub fn roc_curve(h0_stats: &[f64], h1_stats: &[f64], n_points: usize) -> Result<Vec<RatePoint>> {
    if h0_stats.is_empty() || h1_stats.is_empty() {
        return Err(DetectorError::InvalidArgument("both statistic sets must be non-empty".into()));
    }
    if n_points < 2 {
        return Err(DetectorError::InvalidArgument("need at least two sweep points".into()));
    }
    let min = h0_stats
        .iter()
        .chain(h1_stats)
        .fold(f64::INFINITY, |m, &v| m.min(v));
    let max = h0_stats
        .iter()
        .chain(h1_stats)
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    if !min.is_finite() || !max.is_finite() {
        return Err(DetectorError::InvalidArgument("non-finite statistic in ROC sweep".into()));
    }
    let delta = 1e-9 * (max - min).max(min.abs()).max(1.0);
    let lo = min - delta;
    let step = (max - lo) / (n_points - 1) as f64;

    let rate_above = |stats: &[f64], t: f64| {
        stats.iter().filter(|&&s| s > t).count() as f64 / stats.len() as f64
    };
    Ok((0..n_points)
        .map(|i| {
            let t = lo + step * i as f64;
            RatePoint {
                pd: rate_above(h1_stats, t),
                pfa: rate_above(h0_stats, t),
                snr_db: f64::NAN,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_definition_on_ladder() {
        // stats = 1..=100, target 0.5: the median-adjacent order statistic;
        // exactly <= 50 values exceed it.
        let stats: Vec<f64> = (1..=100).map(|v| v as f64).collect();
        let thr = calibrate_threshold(&stats, 0.5).unwrap();
        assert_eq!(thr.value, 51.0);
        let above = stats.iter().filter(|&&s| s > thr.value).count();
        assert!(above <= 50);
        assert_eq!(above, 49);
    }

    #[test]
    fn constant_stats_give_zero_pfa() {
        let stats = vec![3.25; 64];
        let thr = calibrate_threshold(&stats, 0.1).unwrap();
        assert_eq!(thr.value, 3.25);
        assert_eq!(stats.iter().filter(|&&s| s > thr.value).count(), 0);
    }

    #[test]
    fn calibration_set_size_is_enforced() {
        let stats = vec![1.0; 50];
        assert!(calibrate_threshold(&stats, 0.01).is_err());
        assert!(calibrate_threshold(&stats, 0.5).is_ok());
        assert!(calibrate_threshold(&stats, 0.0).is_err());
        assert!(calibrate_threshold(&stats, 1.0).is_err());
    }

    #[test]
    fn calibration_guarantee_on_calibration_set() {
        // Realized Pfa on the calibration set itself never exceeds the
        // target, for arbitrary value patterns including ties.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for trial in 0..100 {
            let n = rng.gen_range(100..2000);
            let stats: Vec<f64> = (0..n).map(|_| (rng.gen::<f64>() * 10.0).round()).collect();
            let target = rng.gen_range(0.011..0.5);
            let thr = calibrate_threshold(&stats, target).unwrap();
            let realized =
                stats.iter().filter(|&&s| s > thr.value).count() as f64 / n as f64;
            assert!(realized <= target, "trial {trial}: {realized} > {target}");
        }
    }

    #[test]
    fn rates_on_toy_cases() {
        let stats = vec![1.0, 2.0, 3.0, 4.0];
        let labels = vec![Hypothesis::H0, Hypothesis::H0, Hypothesis::H1, Hypothesis::H1];
        let r = empirical_rates(&stats, &labels, 2.5).unwrap();
        assert_eq!((r.pd, r.pfa), (1.0, 0.0));
        let r = empirical_rates(&stats, &labels, 0.0).unwrap();
        assert_eq!((r.pd, r.pfa), (1.0, 1.0));
        let r = empirical_rates(&stats, &labels, 9.0).unwrap();
        assert_eq!((r.pd, r.pfa), (0.0, 0.0));

        let single = empirical_rates(&stats, &[Hypothesis::H0; 4], 1.0);
        assert!(single.is_err());
    }

    #[test]
    fn roc_endpoints_and_monotonicity() {
        let h0 = vec![0.1, 0.4, 0.2, 0.9];
        let h1 = vec![0.5, 1.4, 0.8, 2.0];
        let curve = roc_curve(&h0, &h1, 33).unwrap();
        assert_eq!((curve[0].pd, curve[0].pfa), (1.0, 1.0));
        let last = curve.last().unwrap();
        assert_eq!((last.pd, last.pfa), (0.0, 0.0));
        for pair in curve.windows(2) {
            assert!(pair[1].pd <= pair[0].pd);
            assert!(pair[1].pfa <= pair[0].pfa);
        }
    }

    #[test]
    fn roc_separated_distributions_hit_corner() {
        let h0 = vec![0.0, 0.5, 1.0];
        let h1 = vec![10.0, 10.5, 11.0];
        let curve = roc_curve(&h0, &h1, 50).unwrap();
        assert!(curve.iter().any(|p| p.pfa == 0.0 && p.pd == 1.0));
    }
}
