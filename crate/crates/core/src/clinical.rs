//! Clinical tables and the binary training labels derived from them.
//!
//! `clinical.csv` carries one patient per row with the header
//! `patient_id,cohort,age_years,sex,stage,grade,subtype,os_months,event`.
//! `NA` is the missing-value sentinel for `grade` and `event`.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::survival::SurvivalSample;

pub const HEADER: [&str; 9] =
    ["patient_id", "cohort", "age_years", "sex", "stage", "grade", "subtype", "os_months", "event"];

/// Default label horizon: five years of follow-up.
pub const FIVE_YEARS: f64 = 60.0;

#[derive(Debug, Error)]
pub enum ClinicalError {
    #[error("missing column `{0}` in clinical header")]
    MissingColumn(String),
    #[error("row {row}: bad value `{value}` for `{field}`")]
    BadEnumValue { row: usize, field: &'static str, value: String },
    #[error("row {row}: negative follow-up time {value}")]
    NegativeTime { row: usize, value: f64 },
    #[error("row {row}: expected {expected} fields, found {found}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("grade is unknown")]
    UnknownGrade,
    #[error("event status is unknown")]
    UnknownEvent,
    #[error("horizon must be positive, got {0}")]
    BadHorizon(f64),
    #[error("patient {0}: follow-up time must be positive for survival analysis")]
    NonPositiveTime(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sex {
    M,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subtype {
    CcRcc,
    PRcc,
    ChRcc,
    Oncocytoma,
    Normal,
}

impl Subtype {
    pub fn code(self) -> &'static str {
        match self {
            Subtype::CcRcc => "ccRCC",
            Subtype::PRcc => "pRCC",
            Subtype::ChRcc => "ChRCC",
            Subtype::Oncocytoma => "ONCO",
            Subtype::Normal => "NORMAL",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ccRCC" => Subtype::CcRcc,
            "pRCC" => Subtype::PRcc,
            "ChRCC" => Subtype::ChRcc,
            "ONCO" => Subtype::Oncocytoma,
            "NORMAL" => Subtype::Normal,
            _ => return None,
        })
    }

    /// Class index for the three-way subtyping head.
    pub fn subtype_class(self) -> Option<usize> {
        match self {
            Subtype::CcRcc => Some(0),
            Subtype::PRcc => Some(1),
            Subtype::ChRcc => Some(2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    Dead,
    Alive,
    Unknown,
}

impl Event {
    fn code(self) -> &'static str {
        match self {
            Event::Dead => "1",
            Event::Alive => "0",
            Event::Unknown => "NA",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClinicalRecord {
    pub patient_id: String,
    pub cohort: String,
    pub age_years: u32,
    pub sex: Sex,
    pub stage: u8,
    /// `None` when the grade is unknown.
    pub grade: Option<u8>,
    pub subtype: Subtype,
    pub os_months: f64,
    pub event: Event,
}

impl ClinicalRecord {
    /// Survival view of this record, or `None` when the event status is
    /// unknown.
    pub fn survival_sample(&self, covariates: Vec<f64>) -> Result<Option<SurvivalSample>, ClinicalError> {
        let event = match self.event {
            Event::Dead => true,
            Event::Alive => false,
            Event::Unknown => return Ok(None),
        };
        if self.os_months <= 0.0 {
            return Err(ClinicalError::NonPositiveTime(self.patient_id.clone()));
        }
        Ok(Some(SurvivalSample::new(self.os_months, event, covariates)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonLabel {
    Positive,
    Negative,
    Excluded,
}

impl HorizonLabel {
    pub fn as_binary(self) -> Option<u8> {
        match self {
            HorizonLabel::Positive => Some(1),
            HorizonLabel::Negative => Some(0),
            HorizonLabel::Excluded => None,
        }
    }
}

impl fmt::Display for HorizonLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HorizonLabel::Positive => "positive",
            HorizonLabel::Negative => "negative",
            HorizonLabel::Excluded => "excluded",
        })
    }
}

/// High nuclear grade means grade III or IV.
pub fn high_grade_label(grade: Option<u8>) -> Result<bool, ClinicalError> {
    match grade {
        Some(g) => Ok(g >= 3),
        None => Err(ClinicalError::UnknownGrade),
    }
}

/// Survival status at `horizon_months`.
///
/// A death at exactly the horizon is positive; a patient censored before the
/// horizon has no defined status and is excluded.
pub fn horizon_label(os_months: f64, event: Event, horizon_months: f64) -> Result<HorizonLabel, ClinicalError> {
    if !(horizon_months > 0.0) {
        return Err(ClinicalError::BadHorizon(horizon_months));
    }
    match event {
        Event::Unknown => Err(ClinicalError::UnknownEvent),
        Event::Dead if os_months <= horizon_months => Ok(HorizonLabel::Positive),
        _ if os_months >= horizon_months => Ok(HorizonLabel::Negative),
        _ => Ok(HorizonLabel::Excluded),
    }
}

pub fn parse_clinical_csv<P: AsRef<Path>>(path: P) -> Result<Vec<ClinicalRecord>, ClinicalError> {
    let file = std::fs::File::open(path)?;
    read_clinical(file)
}

pub fn read_clinical<R: Read>(reader: R) -> Result<Vec<ClinicalRecord>, ClinicalError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 9];
    for (slot, name) in idx.iter_mut().zip(HEADER) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| ClinicalError::MissingColumn(name.to_string()))?;
    }

    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        // Row numbers count the header as row 1.
        let row = i + 2;
        if rec.len() != headers.len() {
            return Err(ClinicalError::RowLength { row, expected: headers.len(), found: rec.len() });
        }
        let field = |k: usize| rec[idx[k]].trim();
        let bad = |name: &'static str, v: &str| ClinicalError::BadEnumValue { row, field: name, value: v.to_string() };

        let age_years = field(2).parse::<u32>().map_err(|_| bad("age_years", field(2)))?;
        let sex = match field(3) {
            "M" => Sex::M,
            "F" => Sex::F,
            v => return Err(bad("sex", v)),
        };
        let stage = match field(4).parse::<u8>() {
            Ok(s @ 1..=4) => s,
            _ => return Err(bad("stage", field(4))),
        };
        let grade = match field(5) {
            "NA" => None,
            v => match v.parse::<u8>() {
                Ok(g @ 1..=4) => Some(g),
                _ => return Err(bad("grade", v)),
            },
        };
        let subtype = Subtype::parse(field(6)).ok_or_else(|| bad("subtype", field(6)))?;
        let os_months =
            field(7).parse::<f64>().ok().filter(|t| t.is_finite()).ok_or_else(|| bad("os_months", field(7)))?;
        if os_months < 0.0 {
            return Err(ClinicalError::NegativeTime { row, value: os_months });
        }
        let event = match field(8) {
            "1" => Event::Dead,
            "0" => Event::Alive,
            "NA" => Event::Unknown,
            v => return Err(bad("event", v)),
        };
        out.push(ClinicalRecord {
            patient_id: field(0).to_string(),
            cohort: field(1).to_string(),
            age_years,
            sex,
            stage,
            grade,
            subtype,
            os_months,
            event,
        });
    }
    Ok(out)
}

pub fn write_clinical<W: Write>(writer: W, records: &[ClinicalRecord]) -> Result<(), ClinicalError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for r in records {
        let grade = r.grade.map_or_else(|| "NA".to_string(), |g| g.to_string());
        w.write_record([
            r.patient_id.as_str(),
            r.cohort.as_str(),
            &r.age_years.to_string(),
            match r.sex {
                Sex::M => "M",
                Sex::F => "F",
            },
            &r.stage.to_string(),
            &grade,
            r.subtype.code(),
            &r.os_months.to_string(),
            r.event.code(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
