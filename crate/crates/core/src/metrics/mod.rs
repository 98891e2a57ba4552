//! Discrimination metrics: ROC curves, bootstrap AUC intervals, cutoff
//! selection, and the indicator comparison table.

mod compare;
mod cutoff;
mod roc;

pub use compare::{
    indicator_comparison, read_scores_csv, write_comparison_csv, write_scores_csv, ComparisonOptions, ComparisonRow,
    COMPARISON_HEADER, HORIZONS,
};
pub use cutoff::{best_cutoff, sens_spec_at, CutoffResult};
pub use roc::{auc_ci, mann_whitney_auc, roc_curve, write_roc_csv, AucResult, RocCurve, RocPoint};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("both classes must be present ({n_pos} positive, {n_neg} negative)")]
    SingleClass { n_pos: usize, n_neg: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Survival(#[from] crate::survival::SurvivalError),
    #[error(transparent)]
    Clinical(#[from] crate::clinical::ClinicalError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_binary(scores: &[f64], labels: &[bool]) -> Result<(usize, usize), MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch(format!("{} scores vs {} labels", scores.len(), labels.len())));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(MetricsError::Invalid("NaN score".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricsError::SingleClass { n_pos, n_neg });
    }
    Ok((n_pos, n_neg))
}
