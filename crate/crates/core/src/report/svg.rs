use std::fmt::Write;

use super::ReportError;
use crate::metrics::RocCurve;
use crate::survival::{HazardRatioResult, KmCurve};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Coordinates are rounded to hundredths of a pixel before printing.
fn c(v: f64) -> f64 {
    let r = (v * 100.0).round() / 100.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    x_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        c(LEFT + x / self.x_max * (WIDTH - LEFT - RIGHT))
    }

    fn py(&self, y: f64) -> f64 {
        c(TOP + (1.0 - y) * (HEIGHT - TOP - BOTTOM))
    }
}

/// Step between axis ticks: 1, 2 or 5 times a power of ten, at most 8 ticks.
fn tick_step(max: f64) -> f64 {
    let raw = max / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag)
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
}

fn axes(out: &mut String, f: &Frame, x_ticks: &[(f64, String)], x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (f.px(0.0), f.px(f.x_max), f.py(0.0), f.py(1.0));
    let _ = writeln!(out, r#"<g stroke="black" fill="none"><path d="M{x0} {y1}V{y0}H{x1}"/></g>"#);
    let _ = writeln!(out, r#"<g font-size="11" text-anchor="middle">"#);
    for (v, label) in x_ticks {
        let x = f.px(*v);
        let _ = writeln!(out, r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{}" stroke="black"/>"#, c(y0 + 5.0));
        let _ = writeln!(out, r#"<text x="{x}" y="{}">{label}</text>"#, c(y0 + 18.0));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g font-size="11" text-anchor="end">"#);
    for k in 0..=5 {
        let v = k as f64 / 5.0;
        let y = f.py(v);
        let _ = writeln!(out, r#"<line x1="{}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>"#, c(x0 - 5.0));
        let _ = writeln!(out, r#"<text x="{}" y="{}">{v:.1}</text>"#, c(x0 - 8.0), c(y + 4.0));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        c((x0 + x1) / 2.0),
        c(HEIGHT - 12.0),
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        c((y0 + y1) / 2.0),
        escape(y_label)
    );
}

fn legend(out: &mut String, entries: &[String], x: f64, y_bottom: f64) {
    let n = entries.len() as f64;
    for (k, text) in entries.iter().enumerate() {
        let y = c(y_bottom - (n - k as f64) * 16.0);
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
            c(x + 20.0)
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, c(x + 26.0), c(y + 4.0), escape(text));
    }
}

/// Kaplan-Meier plot: one right-continuous staircase per group with censor
/// ticks, a legend, and an optional hazard-ratio annotation.
pub fn render_km_svg(curves: &[(String, KmCurve)], hr: Option<&HazardRatioResult>) -> Result<Vec<u8>, ReportError> {
    if curves.is_empty() || curves.iter().any(|(_, k)| k.n() == 0) {
        return Err(ReportError::EmptyCurve);
    }
    let last_time = |k: &KmCurve| {
        let e = k.event_times.last().copied().unwrap_or(0.0);
        let s = k.censor_times.last().copied().unwrap_or(0.0);
        e.max(s)
    };
    let t_end = curves.iter().map(|(_, k)| last_time(k)).fold(0.0, f64::max);
    let step = tick_step(if t_end > 0.0 { t_end } else { 1.0 });
    let x_max = (t_end / step).ceil().max(1.0) * step;
    let f = Frame { x_max };

    let mut out = String::new();
    header(&mut out);
    let ticks: Vec<(f64, String)> = (0..)
        .map(|k| k as f64 * step)
        .take_while(|&v| v <= x_max + step * 1e-9)
        .map(|v| (v, format!("{}", c(v))))
        .collect();
    axes(&mut out, &f, &ticks, "Time (months)", "Overall survival");
    for (k, (_, curve)) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = format!("M{} {}", f.px(0.0), f.py(1.0));
        for (&t, &s) in curve.event_times.iter().zip(&curve.surv) {
            let _ = write!(d, "H{}V{}", f.px(t), f.py(s));
        }
        let _ = write!(d, "H{}", f.px(last_time(curve)));
        let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#);
        let _ = write!(out, r#"<g stroke="{color}">"#);
        for &t in &curve.censor_times {
            let (x, y) = (f.px(t), f.py(curve.survival_at(t)));
            let _ = write!(out, r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#, c(y - 4.0), c(y + 4.0));
        }
        let _ = writeln!(out, "</g>");
    }
    let entries: Vec<String> = curves
        .iter()
        .map(|(name, k)| format!("{name} (n = {}, events = {})", k.n(), k.events.iter().sum::<usize>()))
        .collect();
    legend(&mut out, &entries, c(WIDTH - RIGHT - 240.0), c(TOP + 16.0 * entries.len() as f64 + 8.0));
    if let Some(h) = hr {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">HR {:.3} (95% CI {:.3}-{:.3}), p = {}</text>"#,
            c(LEFT + 12.0),
            c(HEIGHT - BOTTOM - 12.0),
            h.hr,
            h.ci_low,
            h.ci_high,
            format_p(h.p_value)
        );
    }
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}

fn format_p(p: f64) -> String {
    if p < 0.001 {
        "&lt; 0.001".to_string()
    } else {
        format!("{p:.3}")
    }
}

/// One ROC curve with its plot label and optional interval.
#[derive(Debug, Clone)]
pub struct RocSeries {
    pub name: String,
    pub curve: RocCurve,
    pub ci: Option<(f64, f64)>,
}

/// ROC plot on the unit square with the chance diagonal.
pub fn render_roc_svg(series: &[RocSeries]) -> Result<Vec<u8>, ReportError> {
    if series.is_empty() || series.iter().any(|s| s.curve.points.is_empty()) {
        return Err(ReportError::EmptyCurve);
    }
    let f = Frame { x_max: 1.0 };
    let mut out = String::new();
    header(&mut out);
    let ticks: Vec<(f64, String)> = (0..=5).map(|k| (k as f64 / 5.0, format!("{:.1}", k as f64 / 5.0))).collect();
    axes(&mut out, &f, &ticks, "1 - Specificity", "Sensitivity");
    let _ = writeln!(
        out,
        r##"<path d="M{} {}L{} {}" stroke="#888888" stroke-dasharray="4 4" fill="none"/>"##,
        f.px(0.0),
        f.py(0.0),
        f.px(1.0),
        f.py(1.0)
    );
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        for (i, p) in s.curve.points.iter().enumerate() {
            let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { "L" }, f.px(p.fpr), f.py(p.tpr));
        }
        let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#);
    }
    let entries: Vec<String> = series
        .iter()
        .map(|s| match s.ci {
            Some((lo, hi)) => format!("{} AUC {:.3} (95% CI {lo:.3}-{hi:.3})", s.name, s.curve.auc),
            None => format!("{} AUC {:.3}", s.name, s.curve.auc),
        })
        .collect();
    legend(&mut out, &entries, c(WIDTH - RIGHT - 280.0), c(HEIGHT - BOTTOM - 8.0));
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}
