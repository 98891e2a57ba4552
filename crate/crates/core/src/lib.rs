//! Weakly-supervised slide classification and survival statistics for renal
//! cell carcinoma pathology.
//!
//! The crate runs the whole chain at desk scale: slides are tiled into
//! tissue patches, patches are embedded as descriptors, an attention-based
//! multiple-instance model turns each slide into a risk probability, and the
//! survival toolbox (Kaplan-Meier, log-rank, Cox regression, C-index, ROC)
//! evaluates those risks and folds them into a points-based nomogram.

// Index loops mirror the matrix algebra; `!(a < b)` comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clinical;
pub mod imaging;
pub mod metrics;
pub mod mil;
pub mod nomogram;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod survival;
pub mod synth;
