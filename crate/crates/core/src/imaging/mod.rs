//! Raster handling for slide images: tissue detection, tiling, patch
//! descriptors, and segmentation losses and metrics.

mod descriptor;
mod features;
mod raster;
mod seg;
mod tiling;

pub use descriptor::{patch_descriptor, FeatureVector, DESCRIPTOR_DIM, EDGE_THRESHOLD};
pub use features::{read_features_csv, write_features_csv, FeatureRow};
pub use raster::{Mask, RasterImage};
pub use seg::{
    bce_loss, dice_loss, dice_score, multitask_loss, slide_positive, tumor_area_fraction, BranchWeights,
    MultitaskInput, DICE_EPS, PROB_CLAMP, SLIDE_POSITIVE_FRACTION,
};
pub use tiling::{detect_tissue, tile_image, Patch, DEFAULT_MIN_TISSUE, DEFAULT_PATCH_SIZE, DEFAULT_WHITE_THRESHOLD};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("image {width}x{height} is smaller than patch size {patch}")]
    ImageSmallerThanPatch { width: u32, height: u32, patch: u32 },
    #[error("patch size must be at least 1")]
    BadPatchSize,
    #[error("unsupported descriptor dimension {0} (only 64 is built in)")]
    UnsupportedDim(usize),
    #[error("tissue mask is empty")]
    EmptyTissueMask,
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
    #[error("features file: {0}")]
    Features(String),
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
