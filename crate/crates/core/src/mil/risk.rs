use serde::{Deserialize, Serialize};

use super::model::{mil_forward, MilModel, MilOutput};
use super::{Bag, MilError};
use crate::imaging::Mask;

/// Prediction task a model is trained for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// RCC versus normal tissue; class 1 is tumor.
    Diagnosis,
    /// ccRCC / pRCC / ChRCC; the reported risk is P(ccRCC).
    Subtype,
    /// High (III/IV) versus low nuclear grade; class 1 is high grade.
    GradeRisk,
    /// Death within the follow-up horizon; class 1 is dead.
    OsRisk,
}

impl Task {
    pub fn positive_class(self) -> usize {
        match self {
            Task::Subtype => 0,
            _ => 1,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "diagnosis" => Task::Diagnosis,
            "subtype" => Task::Subtype,
            "grade_risk" => Task::GradeRisk,
            "os_risk" => Task::OsRisk,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Diagnosis => "diagnosis",
            Task::Subtype => "subtype",
            Task::GradeRisk => "grade_risk",
            Task::OsRisk => "os_risk",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskScore {
    pub slide_id: String,
    pub task: Task,
    pub value: f64,
}

/// Positive-class probability of the model's task.
pub fn predict_risk(bag: &Bag, model: &MilModel) -> Result<RiskScore, MilError> {
    let out = mil_forward(bag, model)?;
    Ok(RiskScore { slide_id: bag.slide_id.clone(), task: model.task, value: out.probs[model.task.positive_class()] })
}

/// Attention heatmap on a grid of `cell`-pixel cells covering
/// `extent = (width, height)`. Each patch's cell holds aₖ / maxⱼ aⱼ; cells
/// without patches are 0. Patches outside the extent are skipped.
pub fn attention_heatmap(bag: &Bag, output: &MilOutput, cell: u32, extent: (u32, u32)) -> Result<Mask, MilError> {
    if cell == 0 || extent.0 == 0 || extent.1 == 0 {
        return Err(MilError::DimensionMismatch("heatmap cell and extent must be positive".into()));
    }
    if output.attention.len() != bag.len() {
        return Err(MilError::DimensionMismatch(format!(
            "{} attention weights for {} patches",
            output.attention.len(),
            bag.len()
        )));
    }
    let cols = extent.0.div_ceil(cell);
    let rows = extent.1.div_ceil(cell);
    let mut heat = vec![0.0f64; cols as usize * rows as usize];
    let max = output.attention.iter().copied().fold(0.0f64, f64::max);
    for (&(x, y), &a) in bag.coords().iter().zip(&output.attention) {
        if x >= extent.0 || y >= extent.1 {
            log::warn!("patch at ({x}, {y}) lies outside the {}x{} extent", extent.0, extent.1);
            continue;
        }
        let idx = (y / cell) as usize * cols as usize + (x / cell) as usize;
        let v = if max > 0.0 { a / max } else { 0.0 };
        heat[idx] = heat[idx].max(v);
    }
    Mask::new(cols, rows, heat).map_err(|e| MilError::DimensionMismatch(e.to_string()))
}
