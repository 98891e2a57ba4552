use serde::Serialize;

use super::{check_binary, MetricsError};

/// Operating point of the rule `score ≥ threshold → positive`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffResult {
    pub threshold: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub youden_j: f64,
}

fn from_counts(threshold: f64, tp: usize, tn: usize, n_pos: usize, n_neg: usize) -> CutoffResult {
    let sensitivity = tp as f64 / n_pos as f64;
    let specificity = tn as f64 / n_neg as f64;
    CutoffResult { threshold, sensitivity, specificity, youden_j: sensitivity + specificity - 1.0 }
}

pub fn sens_spec_at(scores: &[f64], labels: &[bool], threshold: f64) -> Result<CutoffResult, MetricsError> {
    let (n_pos, n_neg) = check_binary(scores, labels)?;
    let tp = scores.iter().zip(labels).filter(|&(&s, &l)| l && s >= threshold).count();
    let tn = scores.iter().zip(labels).filter(|&(&s, &l)| !l && s < threshold).count();
    Ok(from_counts(threshold, tp, tn, n_pos, n_neg))
}

/// Threshold among the observed scores that maximizes Youden's J.
///
/// J is compared exactly as the integer TP·N + TN·P. Ties go to the higher
/// specificity, then to the lower threshold.
pub fn best_cutoff(scores: &[f64], labels: &[bool]) -> Result<CutoffResult, MetricsError> {
    let (n_pos, n_neg) = check_binary(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    // Walk thresholds from high to low; at each distinct score everything
    // at or above it is called positive.
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut best: Option<(u128, usize, f64, usize)> = None;
    let mut i = 0;
    while i < order.len() {
        let thr = scores[order[i]];
        while i < order.len() && scores[order[i]] == thr {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let tn = n_neg - fp;
        let key = tp as u128 * n_neg as u128 + tn as u128 * n_pos as u128;
        let better = match best {
            None => true,
            Some((bk, btn, _, _)) => key > bk || (key == bk && tn >= btn),
        };
        if better {
            best = Some((key, tn, thr, tp));
        }
    }
    let (_, tn, thr, tp) = best.expect("non-empty scores");
    Ok(from_counts(thr, tp, tn, n_pos, n_neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
    const L: [bool; 4] = [false, false, true, true];

    #[test]
    fn fixtures() {
        let c = best_cutoff(&S, &L).unwrap();
        assert_eq!((c.threshold, c.sensitivity, c.specificity, c.youden_j), (3.0, 1.0, 1.0, 1.0));
        let flat = best_cutoff(&[5.0; 3], &[true, false, true]).unwrap();
        assert_eq!((flat.threshold, flat.youden_j), (5.0, 0.0));
        let at2 = sens_spec_at(&S, &L, 2.0).unwrap();
        assert_eq!((at2.sensitivity, at2.specificity), (1.0, 0.5));
        assert_eq!(sens_spec_at(&S, &L, 0.0).unwrap().specificity, 0.0);
        assert_eq!(sens_spec_at(&S, &L, 9.0).unwrap().sensitivity, 0.0);
    }

    #[test]
    fn ties_prefer_specificity() {
        // Thresholds 4 (sens .5, spec 1) and 2 (sens 1, spec .5) both give J = .5.
        let s = [1.0, 2.0, 3.0, 4.0];
        let l = [false, true, false, true];
        let c = best_cutoff(&s, &l).unwrap();
        assert_eq!((c.threshold, c.specificity), (4.0, 1.0));
    }

    proptest! {
        #[test]
        fn matches_brute_force_and_transforms(data in prop::collection::vec((0u8..8, any::<bool>()), 2..30)) {
            let scores: Vec<f64> = data.iter().map(|d| d.0 as f64).collect();
            let labels: Vec<bool> = data.iter().map(|d| d.1).collect();
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let c = best_cutoff(&scores, &labels).unwrap();
            for &t in &scores {
                let o = sens_spec_at(&scores, &labels, t).unwrap();
                prop_assert!(o.youden_j <= c.youden_j + 1e-12);
            }
            let direct = sens_spec_at(&scores, &labels, c.threshold).unwrap();
            prop_assert_eq!(direct, c);
            let mapped: Vec<f64> = scores.iter().map(|s| (s * 0.5).exp()).collect();
            prop_assert_eq!(best_cutoff(&mapped, &labels).unwrap().threshold, (c.threshold * 0.5).exp());
        }
    }
}
