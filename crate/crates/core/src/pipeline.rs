//! The full desk-scale run on synthetic data, driven through the CLI.
//!
//! Layout under the run root, one manifest per directory:
//!
//! ```text
//! data/          clinical CSVs and slide rasters
//! tiles/<id>/    patches of each slide
//! features/      descriptors of every patch
//! models/<task>/ grade-risk and os-risk MIL models
//! predictions/<task>/  slide scores and attention heatmaps
//! nomogram/      combined nomogram and its Cox fit
//! scored/        points, group, and horizon survival per test patient
//! survival/km/   Kaplan-Meier by nomogram group
//! survival/anova/ OS risk across nomogram groups
//! compare/       indicator comparison table
//! report/        ROC and Kaplan-Meier figures
//! ```
//!
//! Models train on the `TRAIN` cohort; every statistic is computed on `TEST`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::clinical::{write_clinical, ClinicalRecord};
use crate::report::{sha256_hex, timestamp_now, OutputDir, RunManifest};
use crate::synth;

#[derive(Debug, Clone, Copy)]
pub struct PipelineConfig {
    pub patients: usize,
    pub train_patients: usize,
    pub slide_size: u32,
    pub patch_size: u32,
    pub epochs: usize,
    pub learning_rate: f64,
    pub resamples: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            patients: 160,
            train_patients: 80,
            slide_size: 192,
            patch_size: 32,
            epochs: 50,
            learning_rate: 1e-3,
            resamples: 2000,
        }
    }
}

fn clinical_bytes(records: &[ClinicalRecord]) -> Result<Vec<u8>, String> {
    let mut buf = Vec::new();
    write_clinical(&mut buf, records).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn write_data(root: &Path, cfg: &PipelineConfig, seed: u64) -> Result<Vec<String>, String> {
    let patients = synth::cohort(cfg.patients, cfg.train_patients, seed);
    let mut out = OutputDir::create(root.join("data")).map_err(|e| e.to_string())?;
    let all: Vec<ClinicalRecord> = patients.iter().map(|p| p.record.clone()).collect();
    let (train, test): (Vec<ClinicalRecord>, Vec<ClinicalRecord>) =
        all.iter().cloned().partition(|r| r.cohort == "TRAIN");
    for (name, recs) in [("clinical.csv", &all), ("clinical_train.csv", &train), ("clinical_test.csv", &test)] {
        out.write(name, &clinical_bytes(recs)?).map_err(|e| e.to_string())?;
    }
    let mut ids = Vec::new();
    for p in &patients {
        let img = synth::render_slide(p, cfg.slide_size, cfg.patch_size, seed);
        let bytes = img.to_ppm_bytes().map_err(|e| e.to_string())?;
        out.write(&format!("slides/{}.ppm", p.record.patient_id), &bytes).map_err(|e| e.to_string())?;
        ids.push(p.record.patient_id.clone());
    }
    let config = format!("{cfg:?}");
    let manifest = RunManifest {
        command_line: format!("synthetic cohort n={} train={} seed={seed}", cfg.patients, cfg.train_patients),
        config_digest: sha256_hex(config.as_bytes()),
        seed,
        inputs: BTreeMap::new(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: timestamp_now(),
        outputs: BTreeMap::new(),
    };
    out.finish(manifest).map_err(|e| e.to_string())?;
    Ok(ids)
}

fn step(root: &Path, seed: u64, args: &[&str]) -> Result<(), String> {
    let mut argv = vec!["rccpath".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--seed".into());
    argv.push(seed.to_string());
    match crate::cli::run(&argv, root) {
        0 => Ok(()),
        code => Err(format!("`{}` exited with {code}", argv.join(" "))),
    }
}

/// Generates the synthetic cohort under `root` and runs every stage.
pub fn run(root: &Path, seed: u64, cfg: &PipelineConfig) -> Result<(), String> {
    let ids = write_data(root, cfg, seed)?;
    let patch = cfg.patch_size.to_string();
    for id in &ids {
        let input = format!("data/slides/{id}.ppm");
        let out = format!("tiles/{id}");
        step(root, seed, &["tile", "--input", &input, "--patch-size", &patch, "--min-tissue", "0.5", "--out", &out])?;
    }
    let mut featurize = vec!["featurize".to_string(), "--patches".into()];
    featurize.extend(ids.iter().map(|id| format!("tiles/{id}")));
    featurize.extend(["--out".into(), "features".into()]);
    step(root, seed, &featurize.iter().map(String::as_str).collect::<Vec<_>>())?;

    let epochs = cfg.epochs.to_string();
    let lr = cfg.learning_rate.to_string();
    for task in ["grade-risk", "os-risk"] {
        let dir = task.replace('-', "_");
        let model_dir = format!("models/{dir}");
        step(
            root,
            seed,
            &[
                "train",
                "--features",
                "features/features.csv",
                "--clinical",
                "data/clinical_train.csv",
                "--task",
                task,
                "--epochs",
                &epochs,
                "--learning-rate",
                &lr,
                "--out",
                &model_dir,
            ],
        )?;
        let model = format!("{model_dir}/model.json");
        let pred_dir = format!("predictions/{dir}");
        step(
            root,
            seed,
            &[
                "predict",
                "--features",
                "features/features.csv",
                "--model",
                &model,
                "--heatmap-cell",
                &patch,
                "--out",
                &pred_dir,
            ],
        )?;
    }

    let test = "data/clinical_test.csv";
    let vars = [
        "--var",
        "grade_risk=predictions/grade_risk/scores.csv",
        "--var",
        "os_risk=predictions/os_risk/scores.csv",
        "--var",
        "grade=clinical:grade",
        "--var",
        "stage=clinical:stage",
    ];
    let with = |head: &[&'static str], tail: &[&'static str]| -> Vec<&'static str> {
        head.iter().chain(vars.iter()).chain(tail).copied().collect()
    };
    step(root, seed, &with(&["nomogram", "build", "--clinical", test], &["--out", "nomogram"]))?;
    step(
        root,
        seed,
        &with(&["nomogram", "score", "--nomogram", "nomogram/nomogram.json", "--clinical", test], &["--out", "scored"]),
    )?;
    step(
        root,
        seed,
        &[
            "survival",
            "km",
            "--clinical",
            test,
            "--group-by",
            "scored/scored.csv",
            "--reference",
            "favorable",
            "--out",
            "survival/km",
        ],
    )?;
    step(
        root,
        seed,
        &[
            "survival",
            "anova",
            "--clinical",
            test,
            "--var",
            "OS_risk=predictions/os_risk/scores.csv",
            "--group-by",
            "scored/scored.csv",
            "--out",
            "survival/anova",
        ],
    )?;
    let resamples = cfg.resamples.to_string();
    step(
        root,
        seed,
        &[
            "compare",
            "--clinical",
            test,
            "--var",
            "Grade=clinical:grade",
            "--var",
            "Stage=clinical:stage",
            "--var",
            "Grade_risk=predictions/grade_risk/scores.csv",
            "--var",
            "OS_risk=predictions/os_risk/scores.csv",
            "--var",
            "CRN=scored/scored.csv#total_points",
            "--resamples",
            &resamples,
            "--out",
            "compare",
        ],
    )?;
    step(
        root,
        seed,
        &[
            "report",
            "--clinical",
            test,
            "--roc",
            "OS_risk=predictions/os_risk/scores.csv",
            "--roc",
            "CRN=scored/scored.csv#total_points",
            "--resamples",
            &resamples,
            "--km-groups",
            "scored/scored.csv",
            "--reference",
            "favorable",
            "--out",
            "report",
        ],
    )?;
    Ok(())
}
