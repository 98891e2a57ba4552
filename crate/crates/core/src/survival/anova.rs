use serde::Serialize;

use super::special::f_sf;
use super::SurvivalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnovaResult {
    pub f: f64,
    pub p: f64,
    pub df_between: usize,
    pub df_within: usize,
    /// Set when every group has zero spread. `f` is then +inf with p = 0 if
    /// the group means differ, or 0 with p = 1 if all values are identical.
    pub zero_within_variance: bool,
}

/// One-way analysis of variance.
pub fn anova_oneway(groups: &[Vec<f64>]) -> Result<AnovaResult, SurvivalError> {
    if groups.len() < 2 || groups.iter().any(|g| g.len() < 2) {
        return Err(SurvivalError::DegenerateGroups);
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(SurvivalError::InvalidSample("non-finite observation".into()));
    }
    let n: usize = groups.iter().map(Vec::len).sum();
    let k = groups.len();
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let (mut ssb, mut ssw) = (0.0, 0.0);
    let mut means = Vec::with_capacity(k);
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
        means.push(m);
    }
    let df_between = k - 1;
    let df_within = n - k;
    let all_equal_within = groups.iter().all(|g| g.iter().all(|&v| v == g[0]));
    if all_equal_within {
        let means_differ = means.iter().any(|&m| m != means[0]);
        return Ok(AnovaResult {
            f: if means_differ { f64::INFINITY } else { 0.0 },
            p: if means_differ { 0.0 } else { 1.0 },
            df_between,
            df_within,
            zero_within_variance: true,
        });
    }
    let f = (ssb / df_between as f64) / (ssw / df_within as f64);
    Ok(AnovaResult {
        f,
        p: f_sf(f, df_between as f64, df_within as f64),
        df_between,
        df_within,
        zero_within_variance: false,
    })
}
