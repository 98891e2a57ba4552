use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::MilError;
use crate::imaging::FeatureRow;

/// One slide: a bag of patch embeddings with a single slide-level label.
///
/// Rows are held in canonical order, sorted by patch `(y, x)` and then by
/// feature values, so every reduction over the bag is order-independent of
/// how the rows were supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct Bag {
    pub slide_id: String,
    features: Vec<f64>,
    dim: usize,
    coords: Vec<(u32, u32)>,
    pub label: usize,
}

impl Bag {
    pub fn new(
        slide_id: impl Into<String>,
        rows: Vec<Vec<f64>>,
        coords: Vec<(u32, u32)>,
        label: usize,
    ) -> Result<Self, MilError> {
        let slide_id = slide_id.into();
        if rows.is_empty() {
            return Err(MilError::EmptyBag(slide_id));
        }
        if coords.len() != rows.len() {
            return Err(MilError::DimensionMismatch(format!(
                "bag {slide_id}: {} rows but {} coordinates",
                rows.len(),
                coords.len()
            )));
        }
        let dim = rows[0].len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(MilError::DimensionMismatch(format!("bag {slide_id}: ragged or empty feature rows")));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(MilError::DimensionMismatch(format!("bag {slide_id}: non-finite feature")));
        }
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&a, &b| {
            let (xa, ya) = coords[a];
            let (xb, yb) = coords[b];
            (ya, xa).cmp(&(yb, xb)).then_with(|| lex_cmp(&rows[a], &rows[b]))
        });
        let features = order.iter().flat_map(|&i| rows[i].iter().copied()).collect();
        let coords = order.iter().map(|&i| coords[i]).collect();
        Ok(Self { slide_id, features, dim, coords, label })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.features[k * self.dim..(k + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[(u32, u32)] {
        &self.coords
    }

    /// Groups feature rows by slide, labelling each slide through `label_of`.
    /// Slides for which `label_of` returns `None` are skipped. Output is
    /// sorted by slide id.
    pub fn from_feature_rows<F>(rows: &[FeatureRow], mut label_of: F) -> Result<Vec<Bag>, MilError>
    where
        F: FnMut(&str) -> Option<usize>,
    {
        type Rows = (Vec<Vec<f64>>, Vec<(u32, u32)>);
        let mut grouped: BTreeMap<&str, Rows> = BTreeMap::new();
        for r in rows {
            let e = grouped.entry(r.slide_id.as_str()).or_default();
            e.0.push(r.features.0.clone());
            e.1.push((r.patch_x, r.patch_y));
        }
        let mut bags = Vec::with_capacity(grouped.len());
        for (id, (feats, coords)) in grouped {
            if let Some(label) = label_of(id) {
                bags.push(Bag::new(id, feats, coords, label)?);
            }
        }
        Ok(bags)
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}
