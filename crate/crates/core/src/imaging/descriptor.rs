use super::{ImagingError, Patch};

/// Length of the built-in descriptor.
pub const DESCRIPTOR_DIM: usize = 64;
/// Gradient magnitude above which a pixel counts as an edge.
pub const EDGE_THRESHOLD: f64 = 32.0;

/// Patch embedding consumed by the MIL model.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Deterministic 64-d content descriptor of a patch.
///
/// Layout:
/// - `[0, 48)`: 16-bin intensity histogram for R, G, B in turn (bin = v / 16), each L1-normalized
/// - `[48, 51)`: channel means / 255
/// - `[51, 54)`: channel standard deviations / 127.5
/// - `[54, 62)`: 8-bin histogram of horizontal gradient magnitude (bin width 32), L1-normalized
/// - `62`: tissue fraction
/// - `63`: edge density, the fraction of pixels with gradient magnitude > 32
///
/// Gradient magnitude at (x, y) is |I(x+1, y) − I(x, y)| on the gray
/// intensity I = (R + G + B) / 3, and 0 in the last column. The result
/// depends only on pixel content, never on the patch origin.
pub fn patch_descriptor(patch: &Patch, dim: usize) -> Result<FeatureVector, ImagingError> {
    if dim != DESCRIPTOR_DIM {
        return Err(ImagingError::UnsupportedDim(dim));
    }
    let img = &patch.pixels;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let n = (w * h) as f64;
    let px = img.pixels();

    let mut out = vec![0.0; DESCRIPTOR_DIM];
    let mut sums = [0.0f64; 3];
    for p in px.chunks_exact(3) {
        for c in 0..3 {
            out[c * 16 + usize::from(p[c] / 16)] += 1.0;
            sums[c] += f64::from(p[c]);
        }
    }
    for v in &mut out[..48] {
        *v /= n;
    }
    let means = sums.map(|s| s / n);
    let mut sq = [0.0f64; 3];
    for p in px.chunks_exact(3) {
        for c in 0..3 {
            let d = f64::from(p[c]) - means[c];
            sq[c] += d * d;
        }
    }
    for c in 0..3 {
        out[48 + c] = means[c] / 255.0;
        out[51 + c] = ((sq[c] / n).sqrt() / 127.5).min(1.0);
    }

    let gray = |x: usize, y: usize| {
        let i = (y * w + x) * 3;
        (f64::from(px[i]) + f64::from(px[i + 1]) + f64::from(px[i + 2])) / 3.0
    };
    let mut edges = 0usize;
    for y in 0..h {
        for x in 0..w {
            let g = if x + 1 < w { (gray(x + 1, y) - gray(x, y)).abs() } else { 0.0 };
            let bin = ((g / 32.0) as usize).min(7);
            out[54 + bin] += 1.0;
            if g > EDGE_THRESHOLD {
                edges += 1;
            }
        }
    }
    for v in &mut out[54..62] {
        *v /= n;
    }
    out[62] = patch.tissue_fraction;
    out[63] = edges as f64 / n;
    Ok(FeatureVector(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::RasterImage;
    use proptest::prelude::*;

    fn patch(img: RasterImage, x: u32, y: u32) -> Patch {
        let size = img.width();
        Patch { origin_x: x, origin_y: y, size, pixels: img, tissue_fraction: 1.0 }
    }

    #[test]
    fn uniform_gray() {
        let d = patch_descriptor(&patch(RasterImage::filled(8, 8, [128, 128, 128]).unwrap(), 0, 0), 64).unwrap();
        for c in 0..3 {
            for b in 0..16 {
                assert_eq!(d.0[c * 16 + b], if b == 8 { 1.0 } else { 0.0 });
            }
            assert_eq!(d.0[51 + c], 0.0);
            assert_eq!(d.0[48 + c], 128.0 / 255.0);
        }
        assert_eq!(d.0[54], 1.0);
        assert!(d.0[55..62].iter().all(|&v| v == 0.0));
        assert_eq!(d.0[63], 0.0);
    }

    #[test]
    fn vertical_split_edge_density() {
        // 8x8: left half black, right half white. Only column 3 sees the jump.
        let mut img = RasterImage::filled(8, 8, [255, 255, 255]).unwrap();
        for y in 0..8 {
            for x in 0..4 {
                img.set(x, y, [0, 0, 0]);
            }
        }
        let d = patch_descriptor(&patch(img, 0, 0), 64).unwrap();
        assert_eq!(d.0[63], 8.0 / 64.0);
        assert_eq!(d.0[54 + 7], 8.0 / 64.0);
        assert_eq!(d.0[54], 56.0 / 64.0);
        assert_eq!(d.0[51], 1.0);
    }

    #[test]
    fn unsupported_dim() {
        let p = patch(RasterImage::filled(2, 2, [0, 0, 0]).unwrap(), 0, 0);
        assert!(matches!(patch_descriptor(&p, 1024), Err(ImagingError::UnsupportedDim(1024))));
    }

    proptest! {
        #[test]
        fn histograms_normalized_and_origin_free(
            bytes in prop::collection::vec(any::<u8>(), 5 * 5 * 3),
            ox in 0u32..5000, oy in 0u32..5000,
        ) {
            let img = RasterImage::new(5, 5, bytes).unwrap();
            let a = patch_descriptor(&patch(img.clone(), 0, 0), 64).unwrap();
            let b = patch_descriptor(&patch(img, ox, oy), 64).unwrap();
            prop_assert_eq!(&a, &b);
            for block in [0..16, 16..32, 32..48, 54..62] {
                let s: f64 = a.0[block].iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-9);
            }
            prop_assert!(a.0.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)));
        }
    }
}
