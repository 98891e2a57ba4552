//! Points-based nomogram over a fitted Cox model.
//!
//! The combined nomogram partners the two slide-level risks with grade and
//! stage. It models overall survival only; no competing event enters the fit.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{best_cutoff, MetricsError};
use crate::survival::cox::cumhaz_left;
use crate::survival::{BaselinePoint, CoxModel};

pub const DEFAULT_MAX_POINTS: f64 = 100.0;
/// Horizons of the scored output, in months.
pub const SCORE_HORIZONS: [f64; 3] = [12.0, 36.0, 60.0];

#[derive(Debug, Error)]
pub enum NomogramError {
    #[error("variable {0} has a degenerate range")]
    DegenerateRange(String),
    #[error("all coefficients are zero")]
    ZeroBeta,
    #[error("missing covariate: {0}")]
    MissingCovariate(String),
    #[error("cutoff has not been set")]
    CutoffUnset,
    #[error("horizon {horizon} exceeds the follow-up of the fit ({max_follow_up})")]
    HorizonBeyondFollowUp { horizon: f64, max_follow_up: f64 },
    #[error("invalid nomogram file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Observed range of one covariate, in model order.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl VariableRange {
    pub fn new(name: impl Into<String>, min: f64, max: f64) -> Self {
        Self { name: name.into(), min, max }
    }

    /// Range spanned by `values`.
    pub fn observed(name: impl Into<String>, values: &[f64]) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(name, min, max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NomogramVariable {
    pub name: String,
    pub beta: f64,
    /// Value worth zero points: the low-risk end of the range.
    #[serde(rename = "ref")]
    pub ref_value: f64,
    pub min: f64,
    pub max: f64,
    /// Centering used by the Cox fit.
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StratifiedGroup {
    Worse,
    Favorable,
}

impl StratifiedGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            StratifiedGroup::Worse => "worse",
            StratifiedGroup::Favorable => "favorable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nomogram {
    pub variables: Vec<NomogramVariable>,
    /// Points per unit of β·x.
    pub scale: f64,
    /// Points awarded to the widest-ranging variable at its high-risk end.
    #[serde(default = "default_max_points")]
    pub max_points: f64,
    pub cutoff: Option<f64>,
    pub baseline: Vec<BaselinePoint>,
    pub max_follow_up: f64,
}

fn default_max_points() -> f64 {
    DEFAULT_MAX_POINTS
}

/// Builds the points scale from a fitted model and covariate ranges given in
/// the model's covariate order.
pub fn build_nomogram(model: &CoxModel, ranges: &[VariableRange]) -> Result<Nomogram, NomogramError> {
    if ranges.len() < model.beta.len() {
        let name = format!("covariate {}", ranges.len());
        return Err(NomogramError::MissingCovariate(name));
    }
    let mut variables = Vec::with_capacity(model.beta.len());
    for ((&beta, r), &mean) in model.beta.iter().zip(ranges).zip(&model.means) {
        if !(r.min.is_finite() && r.max.is_finite() && r.min < r.max) {
            return Err(NomogramError::DegenerateRange(r.name.clone()));
        }
        let ref_value = if beta >= 0.0 { r.min } else { r.max };
        variables.push(NomogramVariable { name: r.name.clone(), beta, ref_value, min: r.min, max: r.max, mean });
    }
    let mut nom = Nomogram {
        variables,
        scale: 0.0,
        max_points: DEFAULT_MAX_POINTS,
        cutoff: None,
        baseline: model.baseline_cumhaz.clone(),
        max_follow_up: model.max_follow_up,
    };
    let span = nom.span();
    if !(span > 0.0) {
        return Err(NomogramError::ZeroBeta);
    }
    nom.scale = nom.max_points / span;
    Ok(nom)
}

impl Nomogram {
    /// Largest |βⱼ·(maxⱼ − minⱼ)| over the variables.
    fn span(&self) -> f64 {
        self.variables.iter().map(|v| (v.beta * (v.max - v.min)).abs()).fold(0.0, f64::max)
    }

    fn check_len(&self, x: &[f64]) -> Result<(), NomogramError> {
        match self.variables.get(x.len()) {
            Some(v) => Err(NomogramError::MissingCovariate(v.name.clone())),
            None => Ok(()),
        }
    }

    fn clamped(v: &NomogramVariable, x: f64) -> f64 {
        if x < v.min || x > v.max {
            log::warn!("{} = {x} outside [{}, {}], clamped", v.name, v.min, v.max);
        }
        x.clamp(v.min, v.max)
    }

    /// Points contributed by each covariate.
    pub fn variable_points(&self, x: &[f64]) -> Result<Vec<f64>, NomogramError> {
        self.check_len(x)?;
        let span = self.span();
        Ok(self
            .variables
            .iter()
            .zip(x)
            .map(|(v, &x)| v.beta * (Self::clamped(v, x) - v.ref_value) / span * self.max_points)
            .collect())
    }

    /// Total points for one covariate vector.
    pub fn score(&self, x: &[f64]) -> Result<f64, NomogramError> {
        Ok(self.variable_points(x)?.iter().sum())
    }

    /// Same nomogram with every point value and the cutoff multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Nomogram {
        let mut n = self.clone();
        n.max_points *= factor;
        n.scale = n.max_points / n.span();
        n.cutoff = n.cutoff.map(|c| c * factor);
        n
    }

    pub fn stratify(&self, total_points: f64) -> Result<StratifiedGroup, NomogramError> {
        let cutoff = self.cutoff.ok_or(NomogramError::CutoffUnset)?;
        Ok(if total_points > cutoff { StratifiedGroup::Worse } else { StratifiedGroup::Favorable })
    }

    /// Sets the cutoff from the Youden-optimal threshold of `points` against
    /// horizon death labels and returns it.
    ///
    /// The optimal rule is points ≥ threshold. The stored cutoff sits halfway
    /// between the threshold and the next lower observed total, so the strict
    /// `> cutoff` rule selects the same patients.
    pub fn fit_cutoff(&mut self, points: &[f64], died: &[bool]) -> Result<f64, NomogramError> {
        let best = best_cutoff(points, died)?;
        let below = points.iter().copied().filter(|&p| p < best.threshold).fold(f64::NEG_INFINITY, f64::max);
        let cutoff = if below.is_finite() { below + (best.threshold - below) / 2.0 } else { best.threshold - 1.0 };
        self.cutoff = Some(cutoff);
        Ok(cutoff)
    }

    /// Cox linear predictor β·(x − x̄) after clamping.
    pub fn linear_predictor(&self, x: &[f64]) -> Result<f64, NomogramError> {
        self.check_len(x)?;
        Ok(self.variables.iter().zip(x).map(|(v, &x)| v.beta * (Self::clamped(v, x) - v.mean)).sum())
    }

    /// S(t | x) = exp(−Λ₀(t)·exp(lp)) with a left-continuous baseline.
    pub fn survival_probability(&self, x: &[f64], horizon_months: f64) -> Result<f64, NomogramError> {
        if horizon_months > self.max_follow_up {
            return Err(NomogramError::HorizonBeyondFollowUp {
                horizon: horizon_months,
                max_follow_up: self.max_follow_up,
            });
        }
        let lp = self.linear_predictor(x)?;
        Ok((-cumhaz_left(&self.baseline, horizon_months) * lp.exp()).exp())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("nomogram serializes")
    }

    pub fn from_json(text: &str) -> Result<Nomogram, NomogramError> {
        let n: Nomogram = serde_json::from_str(text)?;
        if !(n.span() > 0.0) {
            return Err(NomogramError::ZeroBeta);
        }
        if let Some(v) = n.variables.iter().find(|v| !(v.min < v.max)) {
            return Err(NomogramError::DegenerateRange(v.name.clone()));
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPatient {
    pub patient_id: String,
    pub total_points: f64,
    pub group: StratifiedGroup,
    /// Survival at `SCORE_HORIZONS`; `None` past the fit's follow-up.
    pub survival: [Option<f64>; 3],
}

pub fn score_patient(nom: &Nomogram, patient_id: &str, x: &[f64]) -> Result<ScoredPatient, NomogramError> {
    let total_points = nom.score(x)?;
    let mut survival = [None; 3];
    for (slot, &h) in survival.iter_mut().zip(&SCORE_HORIZONS) {
        *slot = match nom.survival_probability(x, h) {
            Ok(s) => Some(s),
            Err(NomogramError::HorizonBeyondFollowUp { .. }) => None,
            Err(e) => return Err(e),
        };
    }
    Ok(ScoredPatient { patient_id: patient_id.to_string(), total_points, group: nom.stratify(total_points)?, survival })
}

pub fn write_scored_csv<W: Write>(writer: W, rows: &[ScoredPatient]) -> Result<(), NomogramError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["patient_id", "total_points", "group", "surv_12m", "surv_36m", "surv_60m"])?;
    for r in rows {
        let mut rec = vec![r.patient_id.clone(), r.total_points.to_string(), r.group.as_str().to_string()];
        rec.extend(r.survival.iter().map(|s| s.map_or_else(|| "NA".to_string(), |v| v.to_string())));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survival::{c_index, cox_fit, SurvivalSample};

    fn toy_model(beta: Vec<f64>) -> CoxModel {
        let p = beta.len();
        CoxModel {
            covariance: vec![vec![0.0; p]; p],
            means: vec![0.5; p],
            beta,
            loglik: 0.0,
            loglik_null: 0.0,
            iterations: 1,
            baseline_cumhaz: vec![BaselinePoint { t: 10.0, cumhaz: 0.2 }, BaselinePoint { t: 30.0, cumhaz: 0.5 }],
            max_follow_up: 50.0,
            n: 10,
            events: 2,
        }
    }

    fn ranges() -> Vec<VariableRange> {
        vec![VariableRange::new("a", 0.0, 1.0), VariableRange::new("b", 1.0, 4.0), VariableRange::new("c", 0.0, 3.0)]
    }

    #[test]
    fn construction_rules() {
        let nom = build_nomogram(&toy_model(vec![0.7, -0.3, 0.1]), &ranges()).unwrap();
        assert_eq!(nom.variables[1].ref_value, 4.0);
        assert_eq!(nom.score(&[0.0, 4.0, 0.0]).unwrap(), 0.0);
        let pts = nom.variable_points(&[1.0, 1.0, 3.0]).unwrap();
        assert_eq!(pts.iter().copied().fold(0.0, f64::max), 100.0);
        assert!(pts.iter().all(|&p| p >= 0.0));

        let tie = build_nomogram(&toy_model(vec![0.75, -0.25, 0.25]), &ranges()).unwrap();
        let pts = tie.variable_points(&[1.0, 1.0, 3.0]).unwrap();
        assert_eq!((pts[0], pts[1], pts[2]), (100.0, 100.0, 100.0));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(build_nomogram(&toy_model(vec![0.0; 3]), &ranges()), Err(NomogramError::ZeroBeta)));
        let mut r = ranges();
        r[2].max = 0.0;
        assert!(matches!(build_nomogram(&toy_model(vec![1.0; 3]), &r), Err(NomogramError::DegenerateRange(_))));
        assert!(matches!(build_nomogram(&toy_model(vec![1.0; 3]), &r[..2]), Err(NomogramError::MissingCovariate(_))));
        let nom = build_nomogram(&toy_model(vec![1.0; 3]), &ranges()).unwrap();
        assert!(matches!(nom.score(&[0.0, 1.0]), Err(NomogramError::MissingCovariate(n)) if n == "c"));
        assert!(matches!(nom.stratify(1.0), Err(NomogramError::CutoffUnset)));
    }

    #[test]
    fn affine_monotone_and_clamped() {
        let nom = build_nomogram(&toy_model(vec![0.7, -0.3, 0.1]), &ranges()).unwrap();
        let base = [0.0, 4.0, 0.0];
        let x = [0.4, 3.0, 1.0];
        let y = [0.2, 2.5, 1.5];
        let both = [0.6, 1.5, 2.5];
        let lhs = nom.score(&x).unwrap() + nom.score(&y).unwrap() - nom.score(&base).unwrap();
        assert!((lhs - nom.score(&both).unwrap()).abs() < 1e-12);
        assert!(nom.score(&[0.5, 2.0, 1.0]).unwrap() <= nom.score(&[0.6, 2.0, 1.0]).unwrap());
        assert_eq!(nom.score(&[7.0, 2.0, 1.0]).unwrap(), nom.score(&[1.0, 2.0, 1.0]).unwrap());
    }

    #[test]
    fn strict_stratification() {
        let mut nom = build_nomogram(&toy_model(vec![0.7, -0.3, 0.1]), &ranges()).unwrap();
        nom.cutoff = Some(50.0);
        assert_eq!(nom.stratify(50.0).unwrap(), StratifiedGroup::Favorable);
        assert_eq!(nom.stratify(50.0 + 1e-9).unwrap(), StratifiedGroup::Worse);
    }

    #[test]
    fn fitted_cutoff_matches_threshold_rule() {
        let mut nom = build_nomogram(&toy_model(vec![0.7, -0.3, 0.1]), &ranges()).unwrap();
        let points = [10.0, 20.0, 30.0, 40.0, 50.0, 60.0];
        let died = [false, false, true, false, true, true];
        let c = nom.fit_cutoff(&points, &died).unwrap();
        let thr = best_cutoff(&points, &died).unwrap().threshold;
        for &p in &points {
            assert_eq!(nom.stratify(p).unwrap() == StratifiedGroup::Worse, p >= thr);
        }
        let big = nom.rescaled(3.7);
        assert_eq!(big.cutoff, Some(c * 3.7));
        for &p in &points {
            assert_eq!(nom.stratify(p).unwrap(), big.stratify(p * 3.7).unwrap());
        }
    }

    #[test]
    fn survival_prediction() {
        let nom = build_nomogram(&toy_model(vec![0.7, -0.3, 0.1]), &ranges()).unwrap();
        let x = [0.5, 2.0, 1.0];
        assert_eq!(nom.survival_probability(&x, 5.0).unwrap(), 1.0);
        assert_eq!(nom.survival_probability(&x, 10.0).unwrap(), 1.0);
        let s20 = nom.survival_probability(&[0.5, 0.5, 0.5], 20.0);
        // Clamping moves b to its range, so compare against the clamped lp.
        let lp = -0.3 * (1.0 - 0.5);
        assert!((s20.unwrap() - (-0.2 * f64::exp(lp)).exp()).abs() < 1e-15);
        assert!(nom.survival_probability(&x, 40.0).unwrap() <= nom.survival_probability(&x, 20.0).unwrap());
        assert!(matches!(nom.survival_probability(&x, 51.0), Err(NomogramError::HorizonBeyondFollowUp { .. })));
    }

    #[test]
    fn breslow_by_hand() {
        let xs = [0.0, 1.0, 0.0, 1.0, 1.0];
        let ev = [true, true, false, true, true];
        let samples: Vec<SurvivalSample> =
            (0..5).map(|i| SurvivalSample::new(1.0 + i as f64, ev[i], vec![xs[i]])).collect();
        let model = cox_fit(&samples).unwrap();
        let nom = build_nomogram(&model, &[VariableRange::observed("x", &xs)]).unwrap();
        let (b, mean) = (model.beta[0], 0.6);
        let mut lambda = 0.0;
        for i in 0..5 {
            // S(t | x̄) just after event i equals the value at any t in (tᵢ, tᵢ₊₁].
            if ev[i] {
                let denom: f64 = (i..5).map(|j| (b * (xs[j] - mean)).exp()).sum();
                lambda += 1.0 / denom;
            }
            if i == 4 {
                break;
            }
            let s = nom.survival_probability(&[mean], 1.5 + i as f64).unwrap();
            assert!((s - (-lambda).exp()).abs() < 1e-12, "t = {}", 1.5 + i as f64);
        }
        let risk: Vec<f64> = samples.iter().map(|s| model.linear_predictor(&s.covariates)).collect();
        let pts: Vec<f64> = samples.iter().map(|s| nom.score(&s.covariates).unwrap()).collect();
        assert_eq!(c_index(&risk, &samples).unwrap(), c_index(&pts, &samples).unwrap());
    }

    #[test]
    fn json_and_csv() {
        let mut nom = build_nomogram(&toy_model(vec![0.7, -0.3, 0.1]), &ranges()).unwrap();
        nom.cutoff = Some(42.5);
        let back = Nomogram::from_json(&nom.to_json()).unwrap();
        assert_eq!(back, nom);
        let json: serde_json::Value = serde_json::from_str(&nom.to_json()).unwrap();
        assert_eq!(json["variables"][1]["ref"], 4.0);
        for key in ["scale", "cutoff", "baseline"] {
            assert!(json.get(key).is_some());
        }

        let rows = vec![score_patient(&nom, "P1", &[1.0, 1.0, 3.0]).unwrap()];
        let mut buf = Vec::new();
        write_scored_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("patient_id,total_points,group,surv_12m,surv_36m,surv_60m\nP1,"));
        assert!(text.contains(",worse,") && text.trim_end().ends_with(",NA"));
    }
}
