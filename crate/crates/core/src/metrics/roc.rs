use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{check_binary, MetricsError};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores ≥ threshold are called positive. The leading point uses +inf.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    /// From (0, 0) at threshold +inf down to (1, 1) at the lowest score.
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AucResult {
    pub auc: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Empirical ROC curve with one operating point per distinct score.
///
/// The trapezoid area is accumulated in integer pair counts, so it equals the
/// Mann-Whitney statistic (ties scored one half) exactly.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve, MetricsError> {
    let (n_pos, n_neg) = check_binary(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY }];
    let (mut tp, mut fp) = (0u64, 0u64);
    // Twice the area in units of one positive-negative pair.
    let mut area2 = 0u64;
    let mut i = 0;
    while i < order.len() {
        let thr = scores[order[i]];
        let (tp0, fp0) = (tp, fp);
        while i < order.len() && scores[order[i]] == thr {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        area2 += (fp - fp0) * (tp + tp0);
        points.push(RocPoint { fpr: fp as f64 / n_neg as f64, tpr: tp as f64 / n_pos as f64, threshold: thr });
    }
    let auc = area2 as f64 / (2 * n_pos as u64 * n_neg as u64) as f64;
    Ok(RocCurve { points, auc, n_pos, n_neg })
}

/// Rank-sum form of the AUC, (R₊ − n₊(n₊+1)/2) / (n₊n₋) with midranks.
pub fn mann_whitney_auc(scores: &[f64], labels: &[bool]) -> Result<f64, MetricsError> {
    let (n_pos, n_neg) = check_binary(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j share their mean.
        let mid = (i + 1 + j) as f64 / 2.0;
        rank_sum += mid * order[i..j].iter().filter(|&&k| labels[k]).count() as f64;
        i = j;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos * n_neg) as f64)
}

fn auc_only(scores: &[f64], labels: &[bool]) -> f64 {
    roc_curve(scores, labels).map(|r| r.auc).expect("resample holds both classes")
}

/// Type-7 (linear interpolation) sample quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// AUC with a percentile-bootstrap 95% interval over `resamples` case
/// resamples. Resamples missing a class are redrawn. Resample `b` draws from
/// its own substream of `seed`, so the result does not depend on thread
/// scheduling.
pub fn auc_ci(scores: &[f64], labels: &[bool], resamples: usize, seed: u64) -> Result<AucResult, MetricsError> {
    let (n_pos, n_neg) = check_binary(scores, labels)?;
    if resamples < 100 {
        return Err(MetricsError::Invalid(format!("need at least 100 bootstrap resamples, got {resamples}")));
    }
    let auc = auc_only(scores, labels);
    let n = scores.len();
    let mut dist: Vec<f64> = (0..resamples as u64)
        .into_par_iter()
        .map(|b| {
            let mut g = rng::substream(seed, b);
            let mut s = vec![0.0; n];
            let mut l = vec![false; n];
            loop {
                for k in 0..n {
                    let idx = g.random_range(0..n);
                    s[k] = scores[idx];
                    l[k] = labels[idx];
                }
                let pos = l.iter().filter(|&&x| x).count();
                if pos > 0 && pos < n {
                    return auc_only(&s, &l);
                }
            }
        })
        .collect();
    dist.sort_by(f64::total_cmp);
    let ci_low = quantile(&dist, 0.025).min(auc);
    let ci_high = quantile(&dist, 0.975).max(auc);
    Ok(AucResult { auc, ci_low, ci_high, n_pos, n_neg })
}

/// ROC points as `threshold,fpr,tpr` rows.
pub fn write_roc_csv<W: Write>(writer: W, curve: &RocCurve) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["threshold", "fpr", "tpr"])?;
    for p in &curve.points {
        w.write_record([p.threshold.to_string(), p.fpr.to_string(), p.tpr.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
