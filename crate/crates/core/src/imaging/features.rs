//! `features.csv`: header `slide_id,patch_x,patch_y,f0,...,f{d-1}`, one patch
//! per row. Externally computed embeddings of any width enter the pipeline
//! through this file.

use std::io::{Read, Write};

use super::{FeatureVector, ImagingError};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub slide_id: String,
    pub patch_x: u32,
    pub patch_y: u32,
    pub features: FeatureVector,
}

pub fn read_features_csv<R: Read>(reader: R) -> Result<Vec<FeatureRow>, ImagingError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 4 || &headers[0] != "slide_id" || &headers[1] != "patch_x" || &headers[2] != "patch_y" {
        return Err(ImagingError::Features("header must start with slide_id,patch_x,patch_y,f0".into()));
    }
    let dim = headers.len() - 3;
    for (k, h) in headers.iter().skip(3).enumerate() {
        if h != format!("f{k}") {
            return Err(ImagingError::Features(format!("expected column f{k}, found `{h}`")));
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let coord = |k: usize| {
            rec[k]
                .parse::<u32>()
                .map_err(|_| ImagingError::Features(format!("row {row}: bad coordinate `{}`", &rec[k])))
        };
        let mut values = Vec::with_capacity(dim);
        for k in 0..dim {
            let v: f64 = rec[3 + k]
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| ImagingError::Features(format!("row {row}: bad value in f{k}")))?;
            values.push(v);
        }
        rows.push(FeatureRow {
            slide_id: rec[0].to_string(),
            patch_x: coord(1)?,
            patch_y: coord(2)?,
            features: FeatureVector(values),
        });
    }
    Ok(rows)
}

/// Writes rows with shortest round-trip decimal formatting.
pub fn write_features_csv<W: Write>(writer: W, rows: &[FeatureRow]) -> Result<(), ImagingError> {
    let dim = rows.first().map_or(0, |r| r.features.dim());
    if dim == 0 {
        return Err(ImagingError::Features("no feature rows to write".into()));
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["slide_id".to_string(), "patch_x".into(), "patch_y".into()];
    header.extend((0..dim).map(|k| format!("f{k}")));
    w.write_record(&header)?;
    for r in rows {
        if r.features.dim() != dim {
            return Err(ImagingError::Features(format!("slide {}: ragged feature width", r.slide_id)));
        }
        let mut rec = vec![r.slide_id.clone(), r.patch_x.to_string(), r.patch_y.to_string()];
        rec.extend(r.features.as_slice().iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
