use serde::Serialize;

use super::special::chi2_sf;
use super::{SurvivalError, SurvivalSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogrankResult {
    pub chi2: f64,
    pub p: f64,
    /// Observed minus expected events in group A.
    pub o_minus_e: f64,
}

/// Two-sample log-rank test with one degree of freedom.
pub fn logrank(group_a: &[SurvivalSample], group_b: &[SurvivalSample]) -> Result<LogrankResult, SurvivalError> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(SurvivalError::EmptyGroup);
    }
    let mut pooled: Vec<(f64, bool, bool)> = group_a
        .iter()
        .map(|s| (s.time, s.event, true))
        .chain(group_b.iter().map(|s| (s.time, s.event, false)))
        .collect();
    for s in group_a.iter().chain(group_b) {
        s.validate()?;
    }
    if !pooled.iter().any(|p| p.1) {
        return Err(SurvivalError::NoEvents);
    }
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut n_a = group_a.len() as f64;
    let mut n = pooled.len() as f64;
    let (mut o_minus_e, mut var) = (0.0, 0.0);
    let mut i = 0;
    while i < pooled.len() {
        let t = pooled[i].0;
        let (mut d, mut d_a, mut leave, mut leave_a) = (0.0, 0.0, 0.0, 0.0);
        while i < pooled.len() && pooled[i].0 == t {
            let (_, ev, in_a) = pooled[i];
            leave += 1.0;
            if in_a {
                leave_a += 1.0;
            }
            if ev {
                d += 1.0;
                if in_a {
                    d_a += 1.0;
                }
            }
            i += 1;
        }
        if d > 0.0 {
            o_minus_e += d_a - d * n_a / n;
            if n > 1.0 {
                var += d * (n_a / n) * (1.0 - n_a / n) * (n - d) / (n - 1.0);
            }
        }
        n -= leave;
        n_a -= leave_a;
    }
    let chi2 = if var > 0.0 { o_minus_e * o_minus_e / var } else { 0.0 };
    Ok(LogrankResult { chi2, p: chi2_sf(chi2, 1.0), o_minus_e })
}
