use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::imaging::{
    DEFAULT_MIN_TISSUE, DEFAULT_PATCH_SIZE, DEFAULT_WHITE_THRESHOLD, DESCRIPTOR_DIM, SLIDE_POSITIVE_FRACTION,
};

#[derive(Debug, Parser)]
#[command(name = "rccpath", version, about = "Slide-level MIL risk models and survival statistics for RCC pathology")]
pub struct Cli {
    /// Flat key=value file of option defaults; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every random step (falls back to RCC_SEED, then 7).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cut a slide raster into tissue patches.
    Tile(TileArgs),
    /// Compute patch descriptors from tile directories.
    Featurize(FeaturizeArgs),
    /// Train an attention-MIL model on slide bags.
    Train(TrainArgs),
    /// Score slides with a trained model.
    Predict(PredictArgs),
    /// Segmentation losses, Dice, and the tumor-area slide rule.
    EvalSeg(EvalSegArgs),
    /// Kaplan-Meier, Cox regression, and ANOVA.
    #[command(subcommand)]
    Survival(SurvivalCommand),
    /// Build or apply a points nomogram.
    #[command(subcommand)]
    Nomogram(NomogramCommand),
    /// Compare indicators by horizon AUC and C-index.
    Compare(CompareArgs),
    /// Render ROC and Kaplan-Meier figures.
    Report(ReportArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct OutArg {
    /// Output directory; receives the results and manifest.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TileArgs {
    /// Slide raster (binary PPM).
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the input file stem.
    #[arg(long)]
    pub slide_id: Option<String>,
    #[arg(long, default_value_t = DEFAULT_PATCH_SIZE)]
    pub patch_size: u32,
    #[arg(long, default_value_t = DEFAULT_MIN_TISSUE)]
    pub min_tissue: f64,
    #[arg(long, default_value_t = DEFAULT_WHITE_THRESHOLD)]
    pub white_threshold: u8,
    /// Tissue mask (binary PGM) to use instead of background detection.
    #[arg(long)]
    pub tissue_mask: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args, Serialize)]
pub struct FeaturizeArgs {
    /// Directories written by `tile`.
    #[arg(long, required = true, num_args = 1..)]
    pub patches: Vec<PathBuf>,
    #[arg(long, default_value_t = DESCRIPTOR_DIM)]
    pub dim: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: PathBuf,
    /// Labels come from the clinical row whose patient_id equals the slide id.
    #[arg(long)]
    pub clinical: PathBuf,
    /// diagnosis, subtype, grade-risk, or os-risk.
    #[arg(long)]
    pub task: String,
    /// Death horizon in months for os-risk labels.
    #[arg(long, default_value_t = 60.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub weight_decay: f64,
    #[arg(long, default_value_t = 32)]
    pub attention_dim: usize,
    #[arg(long, default_value_t = 32)]
    pub hidden_dim: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Also write attention heatmaps with cells of this many pixels.
    #[arg(long)]
    pub heatmap_cell: Option<u32>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalSegArgs {
    /// Predicted whole-tissue mask (PGM).
    #[arg(long)]
    pub pred: PathBuf,
    /// Reference whole-tissue mask (PGM).
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub tumor_pred: Option<PathBuf>,
    #[arg(long, requires = "tumor_pred")]
    pub tumor_truth: Option<PathBuf>,
    /// Tumor-area fraction a slide must exceed to be called positive.
    #[arg(long, default_value_t = SLIDE_POSITIVE_FRACTION)]
    pub threshold: f64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Subcommand)]
pub enum SurvivalCommand {
    /// Kaplan-Meier curves per group, log-rank test, and hazard ratio.
    Km(KmArgs),
    /// Cox proportional-hazards regression.
    Cox(CoxArgs),
    /// One-way ANOVA of a variable across groups.
    Anova(AnovaArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct KmArgs {
    #[arg(long)]
    pub clinical: PathBuf,
    /// CSV with patient_id and a `group` column (or two columns).
    #[arg(long)]
    pub group_by: PathBuf,
    /// Reference group of the hazard ratio; default the first in sort order.
    #[arg(long)]
    pub reference: Option<String>,
    /// SVG file name inside the output directory.
    #[arg(long, default_value = "km.svg")]
    pub svg: String,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args, Serialize)]
pub struct CoxArgs {
    #[arg(long)]
    pub clinical: PathBuf,
    /// Covariate as NAME=SOURCE; SOURCE is clinical:age|stage|grade or FILE[#COLUMN].
    #[arg(long = "var", required = true)]
    pub vars: Vec<String>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args, Serialize)]
pub struct AnovaArgs {
    #[arg(long)]
    pub clinical: Option<PathBuf>,
    /// Variable as NAME=SOURCE.
    #[arg(long = "var")]
    pub var: String,
    #[arg(long)]
    pub group_by: PathBuf,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Subcommand)]
pub enum NomogramCommand {
    /// Fit Cox on the variables, build the points scale, and set the cutoff.
    Build(NomogramBuildArgs),
    /// Score patients: total points, group, horizon survival.
    Score(NomogramScoreArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct NomogramBuildArgs {
    #[arg(long)]
    pub clinical: PathBuf,
    #[arg(long = "var", required = true)]
    pub vars: Vec<String>,
    /// Horizon in months of the death labels used for the cutoff.
    #[arg(long, default_value_t = 60.0)]
    pub horizon: f64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args, Serialize)]
pub struct NomogramScoreArgs {
    #[arg(long)]
    pub nomogram: PathBuf,
    #[arg(long)]
    pub clinical: PathBuf,
    #[arg(long = "var", required = true)]
    pub vars: Vec<String>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub clinical: PathBuf,
    /// Indicator as NAME=SOURCE, in table row order.
    #[arg(long = "var", required = true)]
    pub vars: Vec<String>,
    #[arg(long, default_value_t = 2000)]
    pub resamples: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub clinical: PathBuf,
    /// Score to draw as an ROC curve, NAME=SOURCE.
    #[arg(long = "roc")]
    pub roc: Vec<String>,
    /// Horizon in months of the ROC death labels.
    #[arg(long, default_value_t = 60.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 2000)]
    pub resamples: usize,
    /// Groups for a Kaplan-Meier figure.
    #[arg(long)]
    pub km_groups: Option<PathBuf>,
    #[arg(long)]
    pub reference: Option<String>,
    #[command(flatten)]
    pub out: OutArg,
}
