//! Report emission: SVG figures and run manifests.

mod manifest;
mod svg;

pub use manifest::{sha256_hex, timestamp_now, OutputDir, RunManifest, MANIFEST_FILE};
pub use svg::{render_km_svg, render_roc_svg, RocSeries};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to plot")]
    EmptyCurve,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
