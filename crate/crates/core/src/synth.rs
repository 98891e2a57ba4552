//! Seeded synthetic data: cohorts, slide rasters, and planted-signal bags.
//!
//! Real cohorts are private or far too large for a desk run, so tests and
//! the demo pipeline draw from these generators instead. Survival times are
//! exponential given a known linear predictor, so the ground truth is always
//! on hand.

use crate::clinical::{ClinicalRecord, Event, Sex, Subtype};
use crate::imaging::RasterImage;
use crate::mil::Bag;
use crate::rng::{self, Prng, Rng};

/// Baseline hazard per month (median survival 40 months at lp = 0).
const BASE_HAZARD: f64 = std::f64::consts::LN_2 / 40.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPatient {
    pub record: ClinicalRecord,
    /// Fraction of tissue showing the high-grade texture.
    pub grade_signal: f64,
    /// Latent prognostic factor in [0, 1] shown by the dark texture.
    pub os_signal: f64,
    /// True log relative hazard.
    pub true_lp: f64,
}

fn survival_draw(lp: f64, g: &mut Prng) -> (f64, Event) {
    let u: f64 = 1.0 - g.random::<f64>();
    let t = -u.ln() / (BASE_HAZARD * lp.exp());
    let censor = g.random_range(24.0..120.0);
    let (time, event) = if t <= censor { (t, Event::Dead) } else { (censor, Event::Alive) };
    // One decimal, as clinical follow-up is usually recorded.
    (((time * 10.0).round() / 10.0).max(0.1), event)
}

fn demographics(id: usize, cohort: &str, g: &mut Prng) -> ClinicalRecord {
    let subtype = match g.random_range(0..10) {
        0..=6 => Subtype::CcRcc,
        7 | 8 => Subtype::PRcc,
        _ => Subtype::ChRcc,
    };
    ClinicalRecord {
        patient_id: format!("P{id:04}"),
        cohort: cohort.to_string(),
        age_years: g.random_range(35..85),
        sex: if g.random::<bool>() { Sex::M } else { Sex::F },
        stage: g.random_range(1..=4),
        grade: Some(g.random_range(1..=4)),
        subtype,
        os_months: 0.0,
        event: Event::Alive,
    }
}

/// Cohort whose hazard depends on grade, stage, and a latent slide factor.
/// The first `n_train` patients are labelled cohort `TRAIN`, the rest `TEST`.
pub fn cohort(n: usize, n_train: usize, seed: u64) -> Vec<SyntheticPatient> {
    let mut g = rng::seeded(seed);
    (0..n)
        .map(|i| {
            let mut record = demographics(i + 1, if i < n_train { "TRAIN" } else { "TEST" }, &mut g);
            let grade = f64::from(record.grade.unwrap_or(2));
            let stage = f64::from(record.stage);
            let grade_signal = (0.1 + 0.25 * (grade - 1.0) + 0.05 * rng::normal(&mut g)).clamp(0.0, 1.0);
            let os_signal: f64 = g.random();
            let true_lp = 0.5 * (grade - 2.5) + 0.5 * (stage - 2.5) + 2.0 * (os_signal - 0.5);
            (record.os_months, record.event) = survival_draw(true_lp, &mut g);
            SyntheticPatient { record, grade_signal, os_signal, true_lp }
        })
        .collect()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// A cohort with two noisy probability-like risk scores, generated so that
/// the Cox model on (grade_risk, os_risk, grade, stage) is the true hazard.
#[derive(Debug, Clone)]
pub struct IndicatorCohort {
    pub records: Vec<ClinicalRecord>,
    pub grade_risk: Vec<f64>,
    pub os_risk: Vec<f64>,
}

pub fn indicator_cohort(n: usize, seed: u64) -> IndicatorCohort {
    let mut g = rng::seeded(seed);
    let mut out = IndicatorCohort { records: Vec::with_capacity(n), grade_risk: Vec::new(), os_risk: Vec::new() };
    for i in 0..n {
        let mut r = demographics(i + 1, "SYNTH", &mut g);
        let grade = f64::from(r.grade.unwrap_or(2));
        let stage = f64::from(r.stage);
        let gr = sigmoid(1.5 * (grade - 2.5) + rng::normal(&mut g));
        let or = sigmoid(3.0 * rng::normal(&mut g).tanh());
        let lp = 1.0 * (gr - 0.5) + 2.0 * (or - 0.5) + 0.3 * (grade - 2.5) + 0.4 * (stage - 2.5);
        (r.os_months, r.event) = survival_draw(lp, &mut g);
        out.records.push(r);
        out.grade_risk.push(gr);
        out.os_risk.push(or);
    }
    out
}

fn jitter(base: [u8; 3], spread: i32, g: &mut Prng) -> [u8; 3] {
    base.map(|c| (i32::from(c) + g.random_range(-spread..=spread)).clamp(0, 255) as u8)
}

/// H&E-like raster: an elliptical tissue section on a white background. Each
/// `cell`-sized block of tissue may show vertical purple striping (more
/// frequent at higher grade) and a dark hemorrhagic blot (more frequent with
/// the latent prognostic factor).
pub fn render_slide(p: &SyntheticPatient, size: u32, cell: u32, seed: u64) -> RasterImage {
    let mut g = rng::substream(
        seed,
        p.record.patient_id.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(u64::from(b))),
    );
    let mut img = RasterImage::filled(size, size, [246, 246, 246]).expect("positive size");
    let half = f64::from(size) / 2.0;
    let (rx, ry) = (half * g.random_range(0.75..0.92), half * g.random_range(0.65..0.85));
    let cells = size / cell;
    for cy in 0..cells {
        for cx in 0..cells {
            let striped = g.random::<f64>() < p.grade_signal;
            let blot = g.random::<f64>() < 0.6 * p.os_signal;
            let blot_r = f64::from(cell) * g.random_range(0.25..0.4);
            let (bx, by) = (g.random_range(0.3..0.7) * f64::from(cell), g.random_range(0.3..0.7) * f64::from(cell));
            for y in cy * cell..(cy + 1) * cell {
                for x in cx * cell..(cx + 1) * cell {
                    let (dx, dy) = ((f64::from(x) + 0.5 - half) / rx, (f64::from(y) + 0.5 - half) / ry);
                    if dx * dx + dy * dy > 1.0 {
                        let px = jitter([246, 246, 246], 4, &mut g);
                        img.set(x, y, px);
                        continue;
                    }
                    let (lx, ly) = (f64::from(x - cx * cell), f64::from(y - cy * cell));
                    let base = if blot && (lx - bx).hypot(ly - by) < blot_r {
                        [120, 35, 45]
                    } else if striped && (x / 2) % 2 == 0 {
                        [105, 55, 150]
                    } else {
                        [228, 160, 192]
                    };
                    let px = jitter(base, 10, &mut g);
                    img.set(x, y, px);
                }
            }
        }
    }
    img
}

/// Bags of `dim`-wide instance features for a planted-signal task, with a
/// per-instance flag marking the signal patches.
///
/// Background instances are uniform noise. Each positive bag carries between
/// one and a quarter of its instances with a fixed pattern added on eight of
/// the coordinates; negative bags carry none. Bag sizes are uniform in
/// `min_len..=max_len` and labels alternate.
pub fn signal_bags(count: usize, dim: usize, (min_len, max_len): (usize, usize), seed: u64) -> Vec<(Bag, Vec<bool>)> {
    let mut g = rng::seeded(seed);
    let pattern: Vec<usize> = {
        let mut idx: Vec<usize> = (0..dim).collect();
        rng::shuffle(&mut idx, &mut g);
        idx.truncate(8.min(dim));
        idx
    };
    (0..count)
        .map(|b| {
            let label = b % 2;
            let n = g.random_range(min_len..=max_len);
            let mut signal = vec![false; n];
            if label == 1 {
                let k = g.random_range(1..=(n / 4).max(1));
                let mut slots: Vec<usize> = (0..n).collect();
                rng::shuffle(&mut slots, &mut g);
                for &s in &slots[..k] {
                    signal[s] = true;
                }
            }
            let rows: Vec<Vec<f64>> = signal
                .iter()
                .map(|&sig| {
                    let mut r: Vec<f64> = (0..dim).map(|_| g.random::<f64>()).collect();
                    if sig {
                        for &j in &pattern {
                            r[j] += 1.0;
                        }
                    }
                    r
                })
                .collect();
            // Coordinates along one row keep the canonical order equal to the
            // generation order, so `signal` stays aligned with the bag rows.
            let coords = (0..n as u32).map(|k| (k * 32, 0)).collect();
            (Bag::new(format!("bag{b:04}"), rows, coords, label).expect("valid bag"), signal)
        })
        .collect()
}
