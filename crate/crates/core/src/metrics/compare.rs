use std::io::{Read, Write};

use serde::Serialize;

use super::{auc_ci, AucResult, MetricsError};
use crate::clinical::{horizon_label, ClinicalRecord, Event};
use crate::survival::{c_index, SurvivalSample};

/// Horizons in months, in table column order.
pub const HORIZONS: [f64; 3] = [60.0, 36.0, 12.0];

pub const COMPARISON_HEADER: [&str; 8] =
    ["indicator", "auc_5y", "ci_5y", "auc_3y", "ci_3y", "auc_1y", "ci_1y", "c_index"];

#[derive(Debug, Clone, Copy)]
pub struct ComparisonOptions {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        Self { resamples: 2000, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub indicator: String,
    /// One entry per `HORIZONS` value.
    pub auc: [AucResult; 3],
    pub c_index: f64,
}

/// Scores each indicator against horizon survival status and overall
/// survival.
///
/// `indicators` holds one score per record, higher meaning higher risk. NaN
/// marks a missing value and drops that patient for that indicator only.
/// Patients with unknown vital status are skipped throughout.
pub fn indicator_comparison(
    records: &[ClinicalRecord],
    indicators: &[(String, Vec<f64>)],
    opts: &ComparisonOptions,
) -> Result<Vec<ComparisonRow>, MetricsError> {
    let known: Vec<usize> = (0..records.len()).filter(|&i| records[i].event != Event::Unknown).collect();
    if known.len() < records.len() {
        log::warn!("{} patients with unknown vital status skipped", records.len() - known.len());
    }
    let mut rows = Vec::with_capacity(indicators.len());
    for (name, values) in indicators {
        if values.len() != records.len() {
            return Err(MetricsError::LengthMismatch(format!(
                "indicator {name} has {} values for {} patients",
                values.len(),
                records.len()
            )));
        }
        let present: Vec<usize> = known.iter().copied().filter(|&i| !values[i].is_nan()).collect();
        let mut auc = Vec::with_capacity(HORIZONS.len());
        for &h in &HORIZONS {
            let mut scores = Vec::new();
            let mut labels = Vec::new();
            for &i in &present {
                let r = &records[i];
                if let Some(b) = horizon_label(r.os_months, r.event, h)?.as_binary() {
                    scores.push(values[i]);
                    labels.push(b == 1);
                }
            }
            auc.push(auc_ci(&scores, &labels, opts.resamples, opts.seed)?);
        }
        let mut risk = Vec::with_capacity(present.len());
        let mut samples: Vec<SurvivalSample> = Vec::with_capacity(present.len());
        for &i in &present {
            if let Some(s) = records[i].survival_sample(Vec::new())? {
                risk.push(values[i]);
                samples.push(s);
            }
        }
        let c = c_index(&risk, &samples)?;
        rows.push(ComparisonRow { indicator: name.clone(), auc: [auc[0], auc[1], auc[2]], c_index: c });
    }
    Ok(rows)
}

fn ci_cell(a: &AucResult) -> String {
    format!("{}-{}", a.ci_low, a.ci_high)
}

/// Writes rows in the table layout. The interval cell reads `low-high`.
pub fn write_comparison_csv<W: Write>(writer: W, rows: &[ComparisonRow]) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COMPARISON_HEADER)?;
    for r in rows {
        let mut rec = vec![r.indicator.clone()];
        for a in &r.auc {
            rec.push(a.auc.to_string());
            rec.push(ci_cell(a));
        }
        rec.push(r.c_index.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `patient_id,score` file. Empty or `NA` scores read as NaN.
pub fn read_scores_csv<R: Read>(reader: R) -> Result<Vec<(String, f64)>, MetricsError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["patient_id", "score"] {
        return Err(MetricsError::Invalid(format!(
            "expected header patient_id,score, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let raw = rec.get(1).unwrap_or("").trim();
        let score = if raw.is_empty() || raw == "NA" {
            f64::NAN
        } else {
            raw.parse().map_err(|_| MetricsError::Invalid(format!("row {}: bad score {raw:?}", k + 2)))?
        };
        out.push((rec.get(0).unwrap_or("").to_string(), score));
    }
    Ok(out)
}

pub fn write_scores_csv<W: Write>(writer: W, scores: &[(String, f64)]) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["patient_id", "score"])?;
    for (id, s) in scores {
        let cell = if s.is_nan() { "NA".to_string() } else { s.to_string() };
        w.write_record([id.as_str(), cell.as_str()])?;
    }
    w.flush()?;
    Ok(())
}
