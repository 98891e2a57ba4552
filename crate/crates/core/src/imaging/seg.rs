use super::{ImagingError, Mask};

/// Smoothing term of the soft Dice loss.
pub const DICE_EPS: f64 = 1e-6;
/// Probabilities are clamped to [PROB_CLAMP, 1 − PROB_CLAMP] before logs.
pub const PROB_CLAMP: f64 = 1e-7;
/// A slide is tumor-positive when segmented tumor covers more than this
/// fraction of its tissue.
pub const SLIDE_POSITIVE_FRACTION: f64 = 0.05;

/// Hard Dice overlap 2|A∩B| / (|A| + |B|). Two empty masks score 1.
pub fn dice_score(a: &Mask, b: &Mask) -> Result<f64, ImagingError> {
    a.same_shape(b)?;
    let (mut inter, mut na, mut nb) = (0usize, 0usize, 0usize);
    for (&x, &y) in a.values().iter().zip(b.values()) {
        let (x, y) = (x >= 0.5, y >= 0.5);
        na += x as usize;
        nb += y as usize;
        inter += (x && y) as usize;
    }
    if na + nb == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / (na + nb) as f64)
}

/// Soft Dice loss 1 − (2Σpt + ε) / (Σp + Σt + ε).
pub fn dice_loss(pred: &Mask, truth: &Mask) -> Result<f64, ImagingError> {
    pred.same_shape(truth)?;
    let (mut pt, mut sp, mut st) = (0.0, 0.0, 0.0);
    for (&p, &t) in pred.values().iter().zip(truth.values()) {
        pt += p * t;
        sp += p;
        st += t;
    }
    Ok(1.0 - (2.0 * pt + DICE_EPS) / (sp + st + DICE_EPS))
}

/// Mean binary cross-entropy over paired predictions and 0/1 targets.
pub fn bce_loss(pred: &[f64], truth: &[f64]) -> Result<f64, ImagingError> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(ImagingError::DimensionMismatch(format!("{} predictions vs {} targets", pred.len(), truth.len())));
    }
    let total: f64 = pred
        .iter()
        .zip(truth)
        .map(|(&p, &t)| {
            let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
        })
        .sum();
    Ok(total / pred.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchWeights {
    pub whole_seg: f64,
    pub tumor_seg: f64,
    pub class: f64,
}

impl Default for BranchWeights {
    fn default() -> Self {
        Self { whole_seg: 1.0, tumor_seg: 1.0, class: 1.0 }
    }
}

/// Inputs to the three-branch loss. `tumor_seg` is present only for
/// tumor-positive samples.
#[derive(Debug, Clone, Copy)]
pub struct MultitaskInput<'a> {
    pub whole_seg: (&'a Mask, &'a Mask),
    pub tumor_seg: Option<(&'a Mask, &'a Mask)>,
    pub class: (f64, f64),
}

fn seg_term(pred: &Mask, truth: &Mask) -> Result<f64, ImagingError> {
    Ok(dice_loss(pred, truth)? + bce_loss(pred.values(), truth.values())?)
}

pub fn multitask_loss(input: &MultitaskInput<'_>, weights: BranchWeights) -> Result<f64, ImagingError> {
    let whole = seg_term(input.whole_seg.0, input.whole_seg.1)?;
    let tumor = match input.tumor_seg {
        Some((p, t)) => seg_term(p, t)?,
        None => 0.0,
    };
    let class = bce_loss(&[input.class.0], &[input.class.1])?;
    Ok(weights.whole_seg * whole + weights.tumor_seg * tumor + weights.class * class)
}

/// |seg ∩ tissue| / |tissue|.
pub fn tumor_area_fraction(seg: &Mask, tissue: &Mask) -> Result<f64, ImagingError> {
    seg.same_shape(tissue)?;
    let mut inter = 0usize;
    let mut area = 0usize;
    for (&s, &t) in seg.values().iter().zip(tissue.values()) {
        if t >= 0.5 {
            area += 1;
            inter += (s >= 0.5) as usize;
        }
    }
    if area == 0 {
        return Err(ImagingError::EmptyTissueMask);
    }
    Ok(inter as f64 / area as f64)
}

/// Strictly more than `threshold` of the tissue must be tumor.
pub fn slide_positive(fraction: f64, threshold: f64) -> bool {
    fraction > threshold
}
