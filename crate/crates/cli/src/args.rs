use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dogss_core::metric::{C2cMode, Eq3WeightMode, LambdaValidation};
use dogss_core::CloudFileFormat;
use serde::de::DeserializeOwned;

#[derive(Debug, Parser)]
#[command(
    name = "dogss",
    version,
    about = "Domain-gap measurement between real and synthetic labeled point clouds"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a synthetic cloud against a real one and write a gap report.
    Compare(CompareArgs),
    /// Simulate a labeled LiDAR scan of a classed OBJ mesh.
    Simulate(SimulateArgs),
    /// Add Gaussian range noise along each point's ray.
    Noise(NoiseArgs),
    /// Mix real and synthetic points at a fixed ratio.
    Mix(MixArgs),
    /// Split a cloud into named xy regions.
    Split(SplitArgs),
    /// Evaluate per-point predictions against a labeled cloud.
    EvalSeg(EvalSegArgs),
    /// Flatten gap or evaluation reports into CSV.
    Report(ReportArgs),
}

fn enum_value<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn triple(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| format!("expected x,y,z, got `{s}`"))
}

fn pair(s: &str) -> Result<[f64; 2], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| format!("expected min,max, got `{s}`"))
}

fn format(s: &str) -> Result<CloudFileFormat, String> {
    s.parse().map_err(|e: dogss_core::Error| e.to_string())
}

/// Metric parameters; each flag overrides the same key from `--config`.
#[derive(Debug, Args)]
pub struct MetricFlags {
    /// Run configuration JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub voxel_size_m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// directed-max, directed-mean or symmetric-max.
    #[arg(long, value_parser = enum_value::<C2cMode>)]
    pub c2c_mode: Option<C2cMode>,
    /// as-given or renormalized.
    #[arg(long, value_parser = enum_value::<Eq3WeightMode>)]
    pub eq3_weight_mode: Option<Eq3WeightMode>,
    /// strict or relaxed.
    #[arg(long, value_parser = enum_value::<LambdaValidation>)]
    pub lambda_validation: Option<LambdaValidation>,
    #[arg(long)]
    pub normal_scale_m: Option<f64>,
    #[arg(long)]
    pub projection_radius_m: Option<f64>,
    #[arg(long)]
    pub max_depth_m: Option<f64>,
    /// JSON object of class name (or id) to weight.
    #[arg(long)]
    pub class_weights: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub real: PathBuf,
    pub synthetic: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Translate the synthetic cloud by each distance (m) along --direction
    /// and write one report row per offset.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub offset: Option<Vec<f64>>,
    /// Offset direction; normalized. Defaults to (1,1,1).
    #[arg(long, value_parser = triple, allow_negative_numbers = true)]
    pub direction: Option<[f64; 3]>,
    #[command(flatten)]
    pub metric: MetricFlags,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// JSON array of {t, x, y, z, yaw}.
    #[arg(long)]
    pub trajectory: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Range noise added to the simulated returns, meters.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub channels: Option<u32>,
    /// min,max in degrees.
    #[arg(long, value_parser = pair, allow_negative_numbers = true)]
    pub vertical_fov_deg: Option<[f64; 2]>,
    #[arg(long)]
    pub rotation_rate_hz: Option<f64>,
    #[arg(long)]
    pub points_per_second: Option<f64>,
    #[arg(long)]
    pub max_range_m: Option<f64>,
    #[arg(long, value_parser = triple, allow_negative_numbers = true)]
    pub sensor_offset_m: Option<[f64; 3]>,
    /// xyzl, ply-ascii or ply; defaults from the output extension.
    #[arg(long, value_parser = format)]
    pub format: Option<CloudFileFormat>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Standard deviation, meters.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Ray origin for every point, when the input stores none.
    #[arg(long, value_parser = triple, allow_negative_numbers = true)]
    pub origin: Option<[f64; 3]>,
    #[arg(long, value_parser = format)]
    pub format: Option<CloudFileFormat>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MixArgs {
    pub real: PathBuf,
    pub synthetic: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Share of real points in [0, 1].
    #[arg(long)]
    pub real_fraction: Option<f64>,
    #[arg(long)]
    pub target_count: Option<usize>,
    #[arg(long, value_parser = format)]
    pub format: Option<CloudFileFormat>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    pub input: PathBuf,
    /// Split regions JSON ({"regions": [...]}); otherwise the config's `split`.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_parser = format)]
    pub format: Option<CloudFileFormat>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalSegArgs {
    pub ground_truth: PathBuf,
    /// One integer label per line, in ground-truth point order.
    pub predictions: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Synthetic share of the training data, recorded for `report`.
    #[arg(long)]
    pub synthetic_ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write (x, y) series as JSON.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}
