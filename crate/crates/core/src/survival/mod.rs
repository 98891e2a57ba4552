//! Time-to-event statistics: Kaplan-Meier, log-rank, Cox regression, hazard
//! ratios, Harrell's concordance, and one-way ANOVA.

mod anova;
mod cindex;
pub(crate) mod cox;
mod km;
mod logrank;
pub mod special;

pub use anova::{anova_oneway, AnovaResult};
pub use cindex::c_index;
pub use cox::{
    cox_fit, cox_fit_with, hazard_ratio_groups, partial_loglik, BaselinePoint, CoxModel, CoxOptions, HazardRatioResult,
};
pub use km::{km_estimate, KmCurve};
pub use logrank::{logrank, LogrankResult};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SurvivalError {
    #[error("no samples")]
    EmptyInput,
    #[error("group is empty")]
    EmptyGroup,
    #[error("no events observed")]
    NoEvents,
    #[error("need at least {needed} events, found {found}")]
    TooFewEvents { needed: usize, found: usize },
    #[error("covariate {0} is constant")]
    ConstantCovariate(usize),
    #[error("coefficients diverging (standardized |beta| > 20 on covariate {0}): separation")]
    Separation(usize),
    #[error("Newton-Raphson did not converge in {0} iterations")]
    NonConvergence(usize),
    #[error("information matrix is singular")]
    SingularInformation,
    #[error("no permissible pairs for concordance")]
    NoPermissiblePairs,
    #[error("ANOVA needs at least two groups with two values each")]
    DegenerateGroups,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
}

/// One subject's follow-up.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSample {
    /// Follow-up in months, > 0.
    pub time: f64,
    /// `true` for an observed event, `false` for censoring.
    pub event: bool,
    pub covariates: Vec<f64>,
}

impl SurvivalSample {
    pub fn new(time: f64, event: bool, covariates: Vec<f64>) -> Self {
        Self { time, event, covariates }
    }

    fn validate(&self) -> Result<(), SurvivalError> {
        if !(self.time > 0.0) || !self.time.is_finite() {
            return Err(SurvivalError::InvalidSample(format!("time {} must be positive and finite", self.time)));
        }
        if self.covariates.iter().any(|c| !c.is_finite()) {
            return Err(SurvivalError::InvalidSample("non-finite covariate".into()));
        }
        Ok(())
    }
}
