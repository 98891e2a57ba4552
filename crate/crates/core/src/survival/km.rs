use serde::{Deserialize, Serialize};

use super::{SurvivalError, SurvivalSample};

/// Product-limit survival estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmCurve {
    /// Distinct times with at least one event, ascending.
    pub event_times: Vec<f64>,
    /// S(t) just after each event time.
    pub surv: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub events: Vec<usize>,
    /// Times of censored observations, ascending.
    pub censor_times: Vec<f64>,
}

impl KmCurve {
    /// Right-continuous S(t).
    pub fn survival_at(&self, t: f64) -> f64 {
        let k = self.event_times.partition_point(|&e| e <= t);
        if k == 0 {
            1.0
        } else {
            self.surv[k - 1]
        }
    }

    pub fn n(&self) -> usize {
        self.at_risk.first().copied().unwrap_or(self.censor_times.len())
    }
}

/// Kaplan-Meier estimator S(t) = Π_{tᵢ ≤ t} (1 − dᵢ/nᵢ).
///
/// Subjects censored at an event time are still at risk for that event.
pub fn km_estimate(samples: &[SurvivalSample]) -> Result<KmCurve, SurvivalError> {
    if samples.is_empty() {
        return Err(SurvivalError::EmptyInput);
    }
    for s in samples {
        s.validate()?;
    }
    let mut sorted: Vec<(f64, bool)> = samples.iter().map(|s| (s.time, s.event)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut curve = KmCurve {
        event_times: Vec::new(),
        surv: Vec::new(),
        at_risk: Vec::new(),
        events: Vec::new(),
        censor_times: Vec::new(),
    };
    let mut s = 1.0;
    let mut remaining = sorted.len();
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].0;
        let mut j = i;
        let mut d = 0;
        while j < sorted.len() && sorted[j].0 == t {
            if sorted[j].1 {
                d += 1;
            } else {
                curve.censor_times.push(t);
            }
            j += 1;
        }
        if d > 0 {
            s *= (remaining - d) as f64 / remaining as f64;
            curve.event_times.push(t);
            curve.surv.push(s);
            curve.at_risk.push(remaining);
            curve.events.push(d);
        }
        remaining -= j - i;
        i = j;
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn samples(times: &[f64], events: &[bool]) -> Vec<SurvivalSample> {
        times.iter().zip(events).map(|(&t, &e)| SurvivalSample::new(t, e, vec![])).collect()
    }

    #[test]
    fn all_events() {
        let c = km_estimate(&samples(&[1.0, 2.0, 3.0], &[true; 3])).unwrap();
        assert_eq!(c.event_times, vec![1.0, 2.0, 3.0]);
        assert_eq!(c.surv, vec![2.0 / 3.0, 2.0 / 3.0 * (1.0 - 1.0 / 2.0), 0.0]);
        assert_eq!(c.at_risk, vec![3, 2, 1]);
    }

    #[test]
    fn middle_censored() {
        let c = km_estimate(&samples(&[1.0, 2.0, 3.0], &[true, false, true])).unwrap();
        assert_eq!(c.event_times, vec![1.0, 3.0]);
        assert_eq!(c.surv, vec![2.0 / 3.0, 0.0]);
        assert_eq!(c.at_risk, vec![3, 1]);
        assert_eq!(c.censor_times, vec![2.0]);
        assert_eq!(c.survival_at(2.5), 2.0 / 3.0);
        assert_eq!(c.survival_at(0.5), 1.0);
    }

    #[test]
    fn censored_at_event_time_stays_at_risk() {
        let c = km_estimate(&samples(&[2.0, 2.0, 5.0], &[true, false, true])).unwrap();
        assert_eq!(c.at_risk[0], 3);
        assert_eq!(c.surv[0], 2.0 / 3.0);
    }

    #[test]
    fn all_censored() {
        let c = km_estimate(&samples(&[1.0, 4.0], &[false, false])).unwrap();
        assert!(c.event_times.is_empty());
        assert_eq!(c.survival_at(10.0), 1.0);
        assert_eq!(km_estimate(&[]), Err(SurvivalError::EmptyInput));
    }

    proptest! {
        #[test]
        fn monotone_and_empirical(times in prop::collection::vec(1u32..20, 1..40), cens in prop::collection::vec(any::<bool>(), 40)) {
            let ts: Vec<f64> = times.iter().map(|&t| t as f64).collect();
            let c = km_estimate(&samples(&ts, &cens[..ts.len()])).unwrap();
            prop_assert!(c.surv.windows(2).all(|w| w[1] <= w[0]));
            prop_assert!(c.surv.iter().all(|s| (0.0..=1.0).contains(s)));
            let full = km_estimate(&samples(&ts, &vec![true; ts.len()])).unwrap();
            for &t in &full.event_times {
                let frac = ts.iter().filter(|&&x| x > t).count() as f64 / ts.len() as f64;
                prop_assert!((full.survival_at(t) - frac).abs() < 1e-12);
            }
        }
    }
}
