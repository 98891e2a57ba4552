use std::collections::HashMap;
use std::path::{Path, PathBuf};

use super::{At, CliError, CliResult, Ctx};
use crate::clinical::{read_clinical, ClinicalRecord};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Source {
    Age,
    Stage,
    Grade,
    File { path: PathBuf, column: String },
}

/// A `NAME=SOURCE` variable argument.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct VarSpec {
    pub name: String,
    pub source: Source,
}

pub(crate) fn parse_var(arg: &str) -> CliResult<VarSpec> {
    let (name, src) = arg
        .split_once('=')
        .filter(|(n, s)| !n.is_empty() && !s.is_empty())
        .ok_or_else(|| CliError::Usage(format!("expected NAME=SOURCE, got `{arg}`")))?;
    let source = match src.strip_prefix("clinical:") {
        Some("age") => Source::Age,
        Some("stage") => Source::Stage,
        Some("grade") => Source::Grade,
        Some(other) => return Err(CliError::Usage(format!("unknown clinical field `{other}` (age, stage, grade)"))),
        None => match src.rsplit_once('#') {
            Some((p, c)) => Source::File { path: p.into(), column: c.to_string() },
            None => Source::File { path: src.into(), column: "score".to_string() },
        },
    };
    Ok(VarSpec { name: name.to_string(), source })
}

pub(crate) fn parse_vars(args: &[String]) -> CliResult<Vec<VarSpec>> {
    let specs: Vec<VarSpec> = args.iter().map(|a| parse_var(a)).collect::<CliResult<_>>()?;
    for (i, s) in specs.iter().enumerate() {
        if specs[..i].iter().any(|o| o.name == s.name) {
            return Err(CliError::Usage(format!("variable `{}` given twice", s.name)));
        }
    }
    Ok(specs)
}

pub(crate) fn load_clinical(ctx: &mut Ctx, path: &Path) -> CliResult<Vec<ClinicalRecord>> {
    let bytes = ctx.read(path)?;
    read_clinical(bytes.as_slice()).at(path)
}

fn parse_cell(raw: &str) -> Option<f64> {
    let raw = raw.trim();
    if raw.is_empty() || raw == "NA" {
        Some(f64::NAN)
    } else {
        raw.parse().ok()
    }
}

/// Reads `column` of a CSV keyed by `patient_id`. Missing cells read as NaN.
pub(crate) fn read_keyed_column(ctx: &mut Ctx, path: &Path, column: &str) -> CliResult<HashMap<String, f64>> {
    let bytes = ctx.read(path)?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let headers = rdr.headers().at(path)?.clone();
    let id_col = headers
        .iter()
        .position(|h| h == "patient_id")
        .ok_or_else(|| super::data_err(format!("{}: no patient_id column", path.display())))?;
    let val_col = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| super::data_err(format!("{}: no `{column}` column", path.display())))?;
    let mut out = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.at(path)?;
        let row = i + 2;
        let id = rec.get(id_col).unwrap_or("").to_string();
        let raw = rec.get(val_col).unwrap_or("");
        let v = parse_cell(raw).ok_or_else(|| {
            super::data_err(format!("{}: row {row}, field {column}: bad number `{raw}`", path.display()))
        })?;
        if out.insert(id.clone(), v).is_some() {
            return Err(super::data_err(format!("{}: row {row}: duplicate patient_id {id}", path.display())));
        }
    }
    Ok(out)
}

/// Values of `spec` for each record, NaN where missing.
pub(crate) fn load_var(ctx: &mut Ctx, spec: &VarSpec, records: &[ClinicalRecord]) -> CliResult<Vec<f64>> {
    Ok(match &spec.source {
        Source::Age => records.iter().map(|r| f64::from(r.age_years)).collect(),
        Source::Stage => records.iter().map(|r| f64::from(r.stage)).collect(),
        Source::Grade => records.iter().map(|r| r.grade.map_or(f64::NAN, f64::from)).collect(),
        Source::File { path, column } => {
            let map = read_keyed_column(ctx, path, column)?;
            let missing = records.iter().filter(|r| !map.contains_key(&r.patient_id)).count();
            if missing > 0 {
                log::warn!("{}: {missing} patients have no {column} value", path.display());
            }
            records.iter().map(|r| map.get(&r.patient_id).copied().unwrap_or(f64::NAN)).collect()
        }
    })
}

/// Reads a grouping file: `patient_id` plus a `group` column, or else the
/// second column. Rows keep file order.
pub(crate) fn read_groups(ctx: &mut Ctx, path: &Path) -> CliResult<Vec<(String, String)>> {
    let bytes = ctx.read(path)?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let headers = rdr.headers().at(path)?.clone();
    let id_col = headers
        .iter()
        .position(|h| h == "patient_id")
        .ok_or_else(|| super::data_err(format!("{}: no patient_id column", path.display())))?;
    let group_col = headers
        .iter()
        .position(|h| h == "group")
        .or_else(|| (0..headers.len()).find(|&c| c != id_col))
        .ok_or_else(|| super::data_err(format!("{}: no group column", path.display())))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.at(path)?;
        out.push((rec.get(id_col).unwrap_or("").to_string(), rec.get(group_col).unwrap_or("").to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_syntax() {
        assert_eq!(
            parse_var("Grade=clinical:grade").ok(),
            Some(VarSpec { name: "Grade".into(), source: Source::Grade })
        );
        assert_eq!(
            parse_var("CRN=out/scored.csv#total_points").ok().map(|v| v.source),
            Some(Source::File { path: "out/scored.csv".into(), column: "total_points".into() })
        );
        assert_eq!(
            parse_var("x=s.csv").ok().map(|v| v.source),
            Some(Source::File { path: "s.csv".into(), column: "score".into() })
        );
        assert!(matches!(parse_var("x"), Err(CliError::Usage(_))));
        assert!(matches!(parse_var("x=clinical:sex"), Err(CliError::Usage(_))));
        assert!(matches!(parse_vars(&["a=clinical:age".into(), "a=clinical:stage".into()]), Err(CliError::Usage(_))));
    }
}
