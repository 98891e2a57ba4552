use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::args::*;
use super::sources::{load_clinical, load_var, parse_var, parse_vars, read_groups, read_keyed_column, Source, VarSpec};
use super::{data_err, At, CliError, CliResult, Ctx};
use crate::clinical::{high_grade_label, horizon_label, ClinicalRecord, Event, Subtype};
use crate::imaging::{
    bce_loss, detect_tissue, dice_loss, dice_score, patch_descriptor, read_features_csv, slide_positive, tile_image,
    tumor_area_fraction, write_features_csv, FeatureRow, Mask, Patch, RasterImage,
};
use crate::metrics::{auc_ci, indicator_comparison, roc_curve, write_comparison_csv, ComparisonOptions, RocCurve};
use crate::mil::{attention_heatmap, mil_forward, mil_train, Bag, Hyperparams, MilModel, Task};
use crate::nomogram::{build_nomogram, score_patient, write_scored_csv, Nomogram, VariableRange};
use crate::report::{render_km_svg, render_roc_svg, OutputDir, RocSeries};
use crate::survival::{
    anova_oneway, cox_fit, hazard_ratio_groups, km_estimate, logrank, CoxModel, HazardRatioResult, KmCurve,
    LogrankResult, SurvivalSample,
};

const INDEX_FILE: &str = "index.csv";

fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| data_err(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn csv_bytes<F>(f: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> CliResult<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn write(out: &mut OutputDir, name: &str, bytes: &[u8]) -> CliResult<()> {
    out.write(name, bytes).map_err(|e| data_err(format!("{}: {e}", out.path().join(name).display())))
}

pub(crate) fn tile(ctx: &mut Ctx, a: &TileArgs) -> CliResult<()> {
    let bytes = ctx.read(&a.input)?;
    let img = RasterImage::from_ppm_bytes(&bytes).at(&a.input)?;
    let mask = match &a.tissue_mask {
        Some(p) => {
            let b = ctx.read(p)?;
            Mask::from_pgm_bytes(&b).at(p)?
        }
        None => detect_tissue(&img, a.white_threshold),
    };
    let patches = tile_image(&img, &mask, a.patch_size, a.min_tissue).at(&a.input)?;
    let slide_id = match &a.slide_id {
        Some(s) => s.clone(),
        None => a.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "slide".into()),
    };
    let mut out = ctx.out_dir(&a.out.out)?;
    let mut index = csv::Writer::from_writer(Vec::new());
    index.write_record(["slide_id", "patch_x", "patch_y", "size", "tissue_fraction", "file"])?;
    let encoded: Vec<(String, Vec<u8>)> = patches
        .par_iter()
        .map(|p| Ok((format!("{}_{}.ppm", p.origin_x, p.origin_y), p.pixels.to_ppm_bytes()?)))
        .collect::<Result<_, crate::imaging::ImagingError>>()?;
    for (p, (name, bytes)) in patches.iter().zip(&encoded) {
        write(&mut out, name, bytes)?;
        index.write_record([
            slide_id.clone(),
            p.origin_x.to_string(),
            p.origin_y.to_string(),
            p.size.to_string(),
            p.tissue_fraction.to_string(),
            name.clone(),
        ])?;
    }
    let index = index.into_inner().map_err(|e| data_err(e.to_string()))?;
    write(&mut out, INDEX_FILE, &index)?;
    log::info!("{slide_id}: {} patches", patches.len());
    ctx.finish(out, a)
}

struct IndexRow {
    slide_id: String,
    x: u32,
    y: u32,
    size: u32,
    tissue_fraction: f64,
    file: String,
}

fn read_index(ctx: &mut Ctx, dir: &Path) -> CliResult<Vec<IndexRow>> {
    let path = dir.join(INDEX_FILE);
    let bytes = ctx.read(&path)?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.at(&path)?;
        let bad = |field: &str| data_err(format!("{}: row {}: bad {field}", path.display(), i + 2));
        if rec.len() != 6 {
            return Err(bad("row length"));
        }
        rows.push(IndexRow {
            slide_id: rec[0].to_string(),
            x: rec[1].parse().map_err(|_| bad("patch_x"))?,
            y: rec[2].parse().map_err(|_| bad("patch_y"))?,
            size: rec[3].parse().map_err(|_| bad("size"))?,
            tissue_fraction: rec[4].parse().map_err(|_| bad("tissue_fraction"))?,
            file: rec[5].to_string(),
        });
    }
    Ok(rows)
}

pub(crate) fn featurize(ctx: &mut Ctx, a: &FeaturizeArgs) -> CliResult<()> {
    let mut jobs = Vec::new();
    for dir in &a.patches {
        for row in read_index(ctx, dir)? {
            let path = dir.join(&row.file);
            let bytes = ctx.read(&path)?;
            jobs.push((row, path, bytes));
        }
    }
    let mut rows: Vec<FeatureRow> = jobs
        .par_iter()
        .map(|(row, path, bytes)| {
            let pixels = RasterImage::from_ppm_bytes(bytes).at(path)?;
            let patch = Patch {
                origin_x: row.x,
                origin_y: row.y,
                size: row.size,
                pixels,
                tissue_fraction: row.tissue_fraction,
            };
            let features = patch_descriptor(&patch, a.dim).at(path)?;
            Ok(FeatureRow { slide_id: row.slide_id.clone(), patch_x: row.x, patch_y: row.y, features })
        })
        .collect::<CliResult<_>>()?;
    rows.sort_by(|p, q| (&p.slide_id, p.patch_y, p.patch_x).cmp(&(&q.slide_id, q.patch_y, q.patch_x)));
    if rows.is_empty() {
        return Err(data_err("no patches to featurize"));
    }
    let mut out = ctx.out_dir(&a.out.out)?;
    let bytes = csv_bytes(|buf| Ok(write_features_csv(buf, &rows)?))?;
    write(&mut out, "features.csv", &bytes)?;
    ctx.finish(out, a)
}

fn parse_task(s: &str) -> CliResult<Task> {
    Task::parse(s)
        .ok_or_else(|| CliError::Usage(format!("unknown task `{s}` (diagnosis, subtype, grade-risk, os-risk)")))
}

fn task_label(task: Task, r: &ClinicalRecord, horizon: f64) -> CliResult<Option<usize>> {
    Ok(match task {
        Task::Diagnosis => Some(usize::from(r.subtype != Subtype::Normal)),
        Task::Subtype => r.subtype.subtype_class(),
        Task::GradeRisk => match r.grade {
            Some(_) => Some(usize::from(high_grade_label(r.grade)?)),
            None => None,
        },
        Task::OsRisk => match r.event {
            Event::Unknown => None,
            _ => horizon_label(r.os_months, r.event, horizon)?.as_binary().map(usize::from),
        },
    })
}

fn load_features(ctx: &mut Ctx, path: &Path) -> CliResult<Vec<FeatureRow>> {
    let bytes = ctx.read(path)?;
    read_features_csv(bytes.as_slice()).at(path)
}

pub(crate) fn train(ctx: &mut Ctx, a: &TrainArgs) -> CliResult<()> {
    let task = parse_task(&a.task)?;
    let rows = load_features(ctx, &a.features)?;
    let records = load_clinical(ctx, &a.clinical)?;
    let mut labels: HashMap<&str, usize> = HashMap::new();
    for r in &records {
        if let Some(l) = task_label(task, r, a.horizon)? {
            labels.insert(r.patient_id.as_str(), l);
        }
    }
    let bags = Bag::from_feature_rows(&rows, |id| labels.get(id).copied()).at(&a.features)?;
    log::info!("training {} on {} slides", task.as_str(), bags.len());
    let hp = Hyperparams {
        learning_rate: a.learning_rate,
        epochs: a.epochs,
        weight_decay: a.weight_decay,
        seed: ctx.seed(),
        attention_dim: a.attention_dim,
        hidden_dim: a.hidden_dim,
        n_classes: (task == Task::Subtype).then_some(3),
        ..Hyperparams::default()
    };
    let model = mil_train(&bags, task, &hp)?;
    let mut out = ctx.out_dir(&a.out.out)?;
    let mut text = model.to_json();
    text.push('\n');
    write(&mut out, "model.json", text.as_bytes())?;
    ctx.finish(out, a)
}

pub(crate) fn predict(ctx: &mut Ctx, a: &PredictArgs) -> CliResult<()> {
    let rows = load_features(ctx, &a.features)?;
    let text = String::from_utf8(ctx.read(&a.model)?).map_err(|e| data_err(format!("{}: {e}", a.model.display())))?;
    let model = MilModel::from_json(&text).at(&a.model)?;
    let bags = Bag::from_feature_rows(&rows, |_| Some(0)).at(&a.features)?;
    let positive = model.task.positive_class();
    let outputs = bags.par_iter().map(|b| mil_forward(b, &model)).collect::<Result<Vec<_>, _>>().at(&a.features)?;

    let mut out = ctx.out_dir(&a.out.out)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["patient_id", "score"])?;
    for (b, o) in bags.iter().zip(&outputs) {
        w.write_record([b.slide_id.clone(), o.probs[positive].to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| data_err(e.to_string()))?;
    write(&mut out, "scores.csv", &bytes)?;
    if let Some(cell) = a.heatmap_cell {
        for (b, o) in bags.iter().zip(&outputs) {
            let w = b.coords().iter().map(|c| c.0).max().unwrap_or(0) + cell;
            let h = b.coords().iter().map(|c| c.1).max().unwrap_or(0) + cell;
            let heat = attention_heatmap(b, o, cell, (w, h))?;
            write(&mut out, &format!("heatmaps/{}.pgm", b.slide_id), &heat.to_pgm_bytes()?)?;
        }
    }
    ctx.finish(out, a)
}

fn load_mask(ctx: &mut Ctx, p: &Path) -> CliResult<Mask> {
    let b = ctx.read(p)?;
    Mask::from_pgm_bytes(&b).at(p)
}

pub(crate) fn eval_seg(ctx: &mut Ctx, a: &EvalSegArgs) -> CliResult<()> {
    let pred = load_mask(ctx, &a.pred)?;
    let truth = load_mask(ctx, &a.truth)?;
    let mut report = BTreeMap::new();
    report.insert("dice", json!(dice_score(&pred, &truth).at(&a.pred)?));
    report.insert("dice_loss", json!(dice_loss(&pred, &truth).at(&a.pred)?));
    report.insert("bce", json!(bce_loss(pred.values(), truth.values()).at(&a.pred)?));
    if let Some(tp) = &a.tumor_pred {
        let tumor = load_mask(ctx, tp)?;
        let fraction = tumor_area_fraction(&tumor, &pred).at(tp)?;
        report.insert("tumor_fraction", json!(fraction));
        report.insert("threshold", json!(a.threshold));
        report.insert("slide_positive", json!(slide_positive(fraction, a.threshold)));
        if let Some(tt) = &a.tumor_truth {
            let tumor_truth = load_mask(ctx, tt)?;
            report.insert("tumor_dice", json!(dice_score(&tumor, &tumor_truth).at(tt)?));
            report.insert("tumor_dice_loss", json!(dice_loss(&tumor, &tumor_truth).at(tt)?));
            report.insert("tumor_bce", json!(bce_loss(tumor.values(), tumor_truth.values()).at(tt)?));
        }
    }
    let mut out = ctx.out_dir(&a.out.out)?;
    write(&mut out, "seg.json", &json_bytes(&report)?)?;
    ctx.finish(out, a)
}

pub(crate) fn survival(ctx: &mut Ctx, cmd: &SurvivalCommand) -> CliResult<()> {
    match cmd {
        SurvivalCommand::Km(a) => km(ctx, a),
        SurvivalCommand::Cox(a) => cox(ctx, a),
        SurvivalCommand::Anova(a) => anova(ctx, a),
    }
}

fn samples_of(r: &ClinicalRecord, covariates: Vec<f64>) -> CliResult<Option<SurvivalSample>> {
    Ok(r.survival_sample(covariates)?)
}

/// Survival samples split by group, groups in sort order.
fn grouped_samples(
    records: &[ClinicalRecord],
    groups: &[(String, String)],
) -> CliResult<BTreeMap<String, Vec<SurvivalSample>>> {
    let by_id: HashMap<&str, &ClinicalRecord> = records.iter().map(|r| (r.patient_id.as_str(), r)).collect();
    let mut out: BTreeMap<String, Vec<SurvivalSample>> = BTreeMap::new();
    let mut unmatched = 0;
    for (id, g) in groups {
        match by_id.get(id.as_str()) {
            Some(r) => {
                if let Some(s) = samples_of(r, Vec::new())? {
                    out.entry(g.clone()).or_default().push(s);
                }
            }
            None => unmatched += 1,
        }
    }
    if unmatched > 0 {
        log::warn!("{unmatched} grouped patients missing from the clinical file");
    }
    if out.is_empty() {
        return Err(data_err("no patients with known survival in any group"));
    }
    Ok(out)
}

fn effect_json(h: &HazardRatioResult, n: usize, events: usize) -> serde_json::Value {
    json!({"estimate": h.hr, "ci_low": h.ci_low, "ci_high": h.ci_high, "p": h.p_value, "n": n, "events": events})
}

struct KmSummary {
    curves: Vec<(String, KmCurve)>,
    logrank: Option<LogrankResult>,
    hr: Option<(HazardRatioResult, usize, usize)>,
}

fn km_summary(groups: &BTreeMap<String, Vec<SurvivalSample>>, reference: Option<&str>) -> CliResult<KmSummary> {
    let curves = groups.iter().map(|(g, s)| Ok((g.clone(), km_estimate(s)?))).collect::<CliResult<Vec<_>>>()?;
    if let Some(r) = reference {
        if !groups.contains_key(r) {
            return Err(data_err(format!("reference group `{r}` not present")));
        }
    }
    let (mut logrank_res, mut hr) = (None, None);
    if groups.len() == 2 {
        let names: Vec<&String> = groups.keys().collect();
        let ref_name = reference.unwrap_or(names[0]);
        let other = names.iter().find(|n| n.as_str() != ref_name).expect("two groups");
        let (a, b) = (&groups[*other], &groups[ref_name]);
        logrank_res = Some(logrank(a, b)?);
        let n = a.len() + b.len();
        let events = a.iter().chain(b).filter(|s| s.event).count();
        hr = match hazard_ratio_groups(a, b) {
            Ok(h) => Some((h, n, events)),
            Err(e) => {
                log::warn!("hazard ratio not estimable: {e}");
                None
            }
        };
    }
    Ok(KmSummary { curves, logrank: logrank_res, hr })
}

fn km(ctx: &mut Ctx, a: &KmArgs) -> CliResult<()> {
    let records = load_clinical(ctx, &a.clinical)?;
    let groups = read_groups(ctx, &a.group_by)?;
    let grouped = grouped_samples(&records, &groups)?;
    let s = km_summary(&grouped, a.reference.as_deref())?;
    let mut doc = serde_json::Map::new();
    doc.insert(
        "groups".into(),
        json!(s
            .curves
            .iter()
            .map(|(g, c)| json!({"name": g, "n": c.n(), "events": c.events.iter().sum::<usize>(), "curve": c}))
            .collect::<Vec<_>>()),
    );
    if let Some(l) = &s.logrank {
        doc.insert("logrank".into(), json!({"chi2": l.chi2, "p": l.p, "df": 1}));
    }
    if let Some((h, n, e)) = &s.hr {
        doc.insert("hazard_ratio".into(), effect_json(h, *n, *e));
    }
    let svg = render_km_svg(&s.curves, s.hr.as_ref().map(|h| &h.0))?;
    let mut out = ctx.out_dir(&a.out.out)?;
    write(&mut out, "km.json", &json_bytes(&doc)?)?;
    write(&mut out, &a.svg, &svg)?;
    ctx.finish(out, a)
}

/// Record indices, covariate rows, and survival samples of the complete cases.
type Design = (Vec<usize>, Vec<Vec<f64>>, Vec<SurvivalSample>);

/// Complete-case design: records with known survival and every variable present.
fn design(ctx: &mut Ctx, records: &[ClinicalRecord], specs: &[VarSpec]) -> CliResult<Design> {
    let columns: Vec<Vec<f64>> = specs.iter().map(|s| load_var(ctx, s, records)).collect::<CliResult<_>>()?;
    let (mut idx, mut rows, mut samples) = (Vec::new(), Vec::new(), Vec::new());
    for (i, r) in records.iter().enumerate() {
        let x: Vec<f64> = columns.iter().map(|c| c[i]).collect();
        if x.iter().any(|v| v.is_nan()) {
            continue;
        }
        if let Some(s) = samples_of(r, x.clone())? {
            idx.push(i);
            rows.push(x);
            samples.push(s);
        }
    }
    if samples.len() < records.len() {
        log::warn!("{} of {} patients dropped for missing data", records.len() - samples.len(), records.len());
    }
    Ok((idx, rows, samples))
}

fn cox_json(model: &CoxModel, names: &[String]) -> serde_json::Value {
    let coefs: Vec<serde_json::Value> = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let (b, se) = (model.beta[j], model.se(j));
            json!({
                "name": name,
                "beta": b,
                "se": se,
                "estimate": b.exp(),
                "ci_low": (b - 1.96 * se).exp(),
                "ci_high": (b + 1.96 * se).exp(),
                "p": model.wald_p(j),
            })
        })
        .collect();
    json!({
        "n": model.n,
        "events": model.events,
        "loglik": model.loglik,
        "loglik_null": model.loglik_null,
        "iterations": model.iterations,
        "coefficients": coefs,
    })
}

fn cox(ctx: &mut Ctx, a: &CoxArgs) -> CliResult<()> {
    let specs = parse_vars(&a.vars)?;
    let records = load_clinical(ctx, &a.clinical)?;
    let (_, _, samples) = design(ctx, &records, &specs)?;
    let model = cox_fit(&samples)?;
    let names: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    let mut out = ctx.out_dir(&a.out.out)?;
    write(&mut out, "cox.json", &json_bytes(&cox_json(&model, &names))?)?;
    ctx.finish(out, a)
}

fn anova(ctx: &mut Ctx, a: &AnovaArgs) -> CliResult<()> {
    let spec = parse_var(&a.var)?;
    let groups = read_groups(ctx, &a.group_by)?;
    let by_id: HashMap<String, f64> = match (&a.clinical, &spec.source) {
        (Some(p), _) => {
            let records = load_clinical(ctx, p)?;
            let values = load_var(ctx, &spec, &records)?;
            records.into_iter().map(|r| r.patient_id).zip(values).collect()
        }
        (None, Source::File { path, column }) => read_keyed_column(ctx, path, column)?,
        (None, _) => return Err(CliError::Usage("a clinical:* variable needs --clinical".into())),
    };
    let mut grouped: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (id, g) in &groups {
        if let Some(&v) = by_id.get(id.as_str()).filter(|v| !v.is_nan()) {
            grouped.entry(g.clone()).or_default().push(v);
        }
    }
    let names: Vec<String> = grouped.keys().cloned().collect();
    let data: Vec<Vec<f64>> = grouped.into_values().collect();
    let res = anova_oneway(&data)?;
    let summary: Vec<serde_json::Value> = names
        .iter()
        .zip(&data)
        .map(|(n, d)| json!({"name": n, "n": d.len(), "mean": d.iter().sum::<f64>() / d.len() as f64}))
        .collect();
    let doc = json!({
        "variable": spec.name,
        "f": res.f,
        "p": res.p,
        "df_between": res.df_between,
        "df_within": res.df_within,
        "zero_within_variance": res.zero_within_variance,
        "n": data.iter().map(Vec::len).sum::<usize>(),
        "groups": summary,
    });
    let mut out = ctx.out_dir(&a.out.out)?;
    write(&mut out, "anova.json", &json_bytes(&doc)?)?;
    ctx.finish(out, a)
}

pub(crate) fn nomogram(ctx: &mut Ctx, cmd: &NomogramCommand) -> CliResult<()> {
    match cmd {
        NomogramCommand::Build(a) => nomogram_build(ctx, a),
        NomogramCommand::Score(a) => nomogram_score(ctx, a),
    }
}

fn nomogram_build(ctx: &mut Ctx, a: &NomogramBuildArgs) -> CliResult<()> {
    let specs = parse_vars(&a.vars)?;
    let records = load_clinical(ctx, &a.clinical)?;
    let (idx, rows, samples) = design(ctx, &records, &specs)?;
    let model = cox_fit(&samples)?;
    let ranges: Vec<VariableRange> = specs
        .iter()
        .enumerate()
        .map(|(j, s)| VariableRange::observed(s.name.clone(), &rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .collect();
    let mut nom = build_nomogram(&model, &ranges)?;
    let (mut points, mut died) = (Vec::new(), Vec::new());
    for (&i, x) in idx.iter().zip(&rows) {
        let r = &records[i];
        if let Some(b) = horizon_label(r.os_months, r.event, a.horizon)?.as_binary() {
            points.push(nom.score(x)?);
            died.push(b == 1);
        }
    }
    let cutoff = nom.fit_cutoff(&points, &died)?;
    log::info!("nomogram cutoff {cutoff}");
    let names: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    let mut out = ctx.out_dir(&a.out.out)?;
    let mut text = nom.to_json();
    text.push('\n');
    write(&mut out, "nomogram.json", text.as_bytes())?;
    write(&mut out, "cox.json", &json_bytes(&cox_json(&model, &names))?)?;
    ctx.finish(out, a)
}

fn nomogram_score(ctx: &mut Ctx, a: &NomogramScoreArgs) -> CliResult<()> {
    let text =
        String::from_utf8(ctx.read(&a.nomogram)?).map_err(|e| data_err(format!("{}: {e}", a.nomogram.display())))?;
    let nom = Nomogram::from_json(&text).at(&a.nomogram)?;
    let specs = parse_vars(&a.vars)?;
    let records = load_clinical(ctx, &a.clinical)?;
    let mut columns = Vec::new();
    for v in &nom.variables {
        let spec = specs
            .iter()
            .find(|s| s.name == v.name)
            .ok_or_else(|| data_err(format!("missing covariate: {} (pass --var {}=SOURCE)", v.name, v.name)))?;
        columns.push(load_var(ctx, spec, &records)?);
    }
    let mut scored = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let x: Vec<f64> = columns.iter().map(|c| c[i]).collect();
        if x.iter().any(|v| v.is_nan()) {
            log::warn!("{}: missing covariate, not scored", r.patient_id);
            continue;
        }
        scored.push(score_patient(&nom, &r.patient_id, &x)?);
    }
    let mut out = ctx.out_dir(&a.out.out)?;
    let bytes = csv_bytes(|buf| Ok(write_scored_csv(buf, &scored)?))?;
    write(&mut out, "scored.csv", &bytes)?;
    ctx.finish(out, a)
}

fn load_indicators(ctx: &mut Ctx, vars: &[String], records: &[ClinicalRecord]) -> CliResult<Vec<(String, Vec<f64>)>> {
    parse_vars(vars)?.iter().map(|s| Ok((s.name.clone(), load_var(ctx, s, records)?))).collect()
}

pub(crate) fn compare(ctx: &mut Ctx, a: &CompareArgs) -> CliResult<()> {
    let records = load_clinical(ctx, &a.clinical)?;
    let indicators = load_indicators(ctx, &a.vars, &records)?;
    let opts = ComparisonOptions { resamples: a.resamples, seed: ctx.seed() };
    let rows = indicator_comparison(&records, &indicators, &opts)?;
    let mut out = ctx.out_dir(&a.out.out)?;
    let bytes = csv_bytes(|buf| Ok(write_comparison_csv(buf, &rows)?))?;
    write(&mut out, "comparison.csv", &bytes)?;
    write(&mut out, "comparison.json", &json_bytes(&rows)?)?;
    ctx.finish(out, a)
}

pub(crate) fn report(ctx: &mut Ctx, a: &ReportArgs) -> CliResult<()> {
    if a.roc.is_empty() && a.km_groups.is_none() {
        return Err(CliError::Usage("nothing to report: give --roc and/or --km-groups".into()));
    }
    let records = load_clinical(ctx, &a.clinical)?;
    let mut out = ctx.out_dir(&a.out.out)?;
    if !a.roc.is_empty() {
        let indicators = load_indicators(ctx, &a.roc, &records)?;
        let mut series = Vec::new();
        let mut points = csv::Writer::from_writer(Vec::new());
        points.write_record(["name", "threshold", "fpr", "tpr"])?;
        for (name, values) in &indicators {
            let (mut s, mut l) = (Vec::new(), Vec::new());
            for (r, &v) in records.iter().zip(values) {
                if v.is_nan() || r.event == Event::Unknown {
                    continue;
                }
                if let Some(b) = horizon_label(r.os_months, r.event, a.horizon)?.as_binary() {
                    s.push(v);
                    l.push(b == 1);
                }
            }
            let curve: RocCurve = roc_curve(&s, &l).map_err(|e| data_err(format!("{name}: {e}")))?;
            let ci = auc_ci(&s, &l, a.resamples, ctx.seed())?;
            for p in &curve.points {
                points.write_record([name.clone(), p.threshold.to_string(), p.fpr.to_string(), p.tpr.to_string()])?;
            }
            series.push(RocSeries { name: name.clone(), curve, ci: Some((ci.ci_low, ci.ci_high)) });
        }
        write(&mut out, "roc.svg", &render_roc_svg(&series)?)?;
        let bytes = points.into_inner().map_err(|e| data_err(e.to_string()))?;
        write(&mut out, "roc_points.csv", &bytes)?;
    }
    if let Some(g) = &a.km_groups {
        let groups = read_groups(ctx, g)?;
        let grouped = grouped_samples(&records, &groups)?;
        let s = km_summary(&grouped, a.reference.as_deref())?;
        write(&mut out, "km.svg", &render_km_svg(&s.curves, s.hr.as_ref().map(|h| &h.0))?)?;
    }
    ctx.finish(out, a)
}
