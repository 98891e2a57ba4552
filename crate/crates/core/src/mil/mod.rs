//! Attention-based multiple-instance learning over slide bags.

mod bag;
mod io;
mod model;
mod risk;
mod train;

pub use bag::Bag;
pub use io::MODEL_SCHEMA;
pub use model::{
    mil_forward, mil_gradients, mil_loss, softmax, Hyperparams, MilDims, MilModel, MilOutput, MilParams, PROB_CLAMP,
};
pub use risk::{attention_heatmap, predict_risk, RiskScore, Task};
pub use train::{init_params, mil_train};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MilError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bag {0} has no patches")]
    EmptyBag(String),
    #[error("label {label} outside [0, {classes})")]
    BadLabel { label: usize, classes: usize },
    #[error("no bags to train on")]
    EmptyDataset,
    #[error("training set contains a single class")]
    SingleClassDataset,
    #[error("non-finite parameter")]
    NonFinite,
    #[error("model file: {0}")]
    ModelFile(String),
}
