use super::{ImagingError, Mask, RasterImage};

pub const DEFAULT_WHITE_THRESHOLD: u8 = 220;
pub const DEFAULT_PATCH_SIZE: u32 = 1024;
pub const DEFAULT_MIN_TISSUE: f64 = 0.25;

/// Square crop from a tiling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub origin_x: u32,
    pub origin_y: u32,
    pub size: u32,
    pub pixels: RasterImage,
    pub tissue_fraction: f64,
}

/// A pixel is background iff all three channels exceed `white_threshold`.
pub fn detect_tissue(image: &RasterImage, white_threshold: u8) -> Mask {
    let values = image
        .pixels()
        .chunks_exact(3)
        .map(|p| if p[0].min(p[1]).min(p[2]) > white_threshold { 0.0 } else { 1.0 })
        .collect();
    Mask::new(image.width(), image.height(), values).expect("dimensions come from a valid image")
}

/// Grid-aligned, non-overlapping `patch_size` tiles starting at the origin.
///
/// Partial tiles at the right and bottom edges are dropped, as are tiles whose
/// tissue fraction is below `min_tissue_fraction`. Output is ordered by
/// `(origin_y, origin_x)`.
pub fn tile_image(
    image: &RasterImage,
    tissue: &Mask,
    patch_size: u32,
    min_tissue_fraction: f64,
) -> Result<Vec<Patch>, ImagingError> {
    if patch_size == 0 {
        return Err(ImagingError::BadPatchSize);
    }
    if tissue.width() != image.width() || tissue.height() != image.height() {
        return Err(ImagingError::DimensionMismatch(format!(
            "tissue mask {}x{} vs image {}x{}",
            tissue.width(),
            tissue.height(),
            image.width(),
            image.height()
        )));
    }
    if image.width() < patch_size || image.height() < patch_size {
        return Err(ImagingError::ImageSmallerThanPatch {
            width: image.width(),
            height: image.height(),
            patch: patch_size,
        });
    }
    let cols = image.width() / patch_size;
    let rows = image.height() / patch_size;
    let area = f64::from(patch_size) * f64::from(patch_size);
    let mut patches = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let (x0, y0) = (c * patch_size, r * patch_size);
            let mut sum = 0.0;
            for y in y0..y0 + patch_size {
                for x in x0..x0 + patch_size {
                    sum += tissue.get(x, y);
                }
            }
            let tissue_fraction = sum / area;
            if tissue_fraction < min_tissue_fraction {
                continue;
            }
            patches.push(Patch {
                origin_x: x0,
                origin_y: y0,
                size: patch_size,
                pixels: image.crop(x0, y0, patch_size, patch_size),
                tissue_fraction,
            });
        }
    }
    Ok(patches)
}
