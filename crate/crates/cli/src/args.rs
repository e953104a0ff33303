//! Command-line grammar. Every tunable is an `Option` here; defaults and
//! config-file fallbacks are applied by the resolution layer so that
//! flags always win over the file and the file over built-ins.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "ctrlrob",
    about = "Measure and predict network controllability robustness under node-removal attacks",
    disable_version_flag = true
)]
pub struct Cli {
    /// Flat key=value config file; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate graphs as edge-list files (optionally with PNG images).
    Generate(GenerateArgs),
    /// Simulate node-removal attacks on graph files, writing curve CSV.
    Simulate(SimulateArgs),
    /// Build a full (image, curve) dataset with train/validation/test split.
    Dataset(DatasetArgs),
    /// Train the curve predictor on a dataset manifest.
    Train(TrainArgs),
    /// Predict curves for graph files with a trained model.
    Predict(PredictArgs),
    /// Evaluate a trained model on a dataset's test split.
    Evaluate(EvaluateArgs),
    /// Render curve overlays (true, predicted, error, spread) as SVG.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Topology: er | sf | qsn | sw
    #[arg(long)]
    pub topology: Option<String>,
    /// Node count N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Average out-degree <k>; the edge target is round(<k> * N).
    #[arg(long)]
    pub k: Option<f64>,
    /// Draw uniform (0,1] edge weights instead of weight 1.
    #[arg(long)]
    pub weighted: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// SF rank-weight exponent sigma in [0,1).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// SF rank-weight shift theta >= 0.
    #[arg(long)]
    pub theta: Option<f64>,
    /// QSN snapback spacing r_q >= 1.
    #[arg(long)]
    pub rq: Option<usize>,
    /// SW ring half-width K.
    #[arg(long)]
    pub sw_k: Option<usize>,
    /// How many graphs to emit.
    #[arg(long)]
    pub count: Option<usize>,
    /// Also write the adjacency image as a grayscale PNG.
    #[arg(long)]
    pub png: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Graph edge-list files to attack (repeatable).
    #[arg(long, num_args = 1.., required = true)]
    pub graph: Vec<PathBuf>,
    /// Attack strategy: ra | tba | tda
    #[arg(long)]
    pub strategy: Option<String>,
    /// Controllability kind: structural | state
    #[arg(long)]
    pub kind: Option<String>,
    /// Relative rank tolerance (state kind only).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DatasetArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated list, e.g. er,sf,qsn,sw
    #[arg(long)]
    pub topologies: Option<String>,
    /// Comma-separated average degrees, e.g. 4,8
    #[arg(long)]
    pub degrees: Option<String>,
    #[arg(long)]
    pub weighted: bool,
    /// Instances per (topology, degree) cell.
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub rq: Option<usize>,
    #[arg(long)]
    pub sw_k: Option<usize>,
    /// Worker threads (also CTRLROB_WORKERS).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Loss variant: l1 | l2
    #[arg(long)]
    pub loss: Option<String>,
    /// Samples per optimizer step (gradients averaged).
    #[arg(long)]
    pub batch: Option<usize>,
    /// Hidden dense width.
    #[arg(long)]
    pub fc2: Option<usize>,
    /// Number of convolution groups (a prefix of the full-scale stack).
    #[arg(long)]
    pub groups: Option<usize>,
    /// Seeds parameter init and the frozen embedding.
    #[arg(long)]
    pub model_seed: Option<u64>,
    /// Seeds the per-epoch sample order.
    #[arg(long)]
    pub shuffle_seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, num_args = 1.., required = true)]
    pub graph: Vec<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// True-curve CSV (one row per sample).
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Predicted-curve CSV to overlay.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Evaluation report CSV whose pooled er/st rows are overlaid.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Linear y axis instead of the default log scale.
    #[arg(long)]
    pub linear_y: bool,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
