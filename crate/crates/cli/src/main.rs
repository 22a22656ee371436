//! `topoprune`: score transformer layers by the zigzag persistence of their
//! token point clouds and plan which layers to prune.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use topoprune::{Combine, OverlapMetric, Scenario};

use crate::config::Precision;

/// Usage problems found after argument parsing, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const THREADS_ENV: &str = "TOPOPRUNE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "topoprune",
    version,
    about = "Topology-guided layer pruning plans for transformers"
)]
#[command(after_help = "Set TOPOPRUNE_THREADS to cap the worker thread count.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic trace.
    Synth(SynthArgs),
    /// Score traces and write scores, plan, diagrams and images.
    Score(ScoreArgs),
    /// Re-plan from an existing scores document.
    Plan(PlanArgs),
    /// Agreement between two plans.
    Overlap(OverlapArgs),
    /// Zigzag persistence diagram of one trace as CSV.
    Diagram(DiagramArgs),
    /// Persistence images of one trace as CSV and PGM.
    Epi(EpiArgs),
    /// Summarize a trace file.
    Inspect(InspectArgs),
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: topoprune::TraceError| e.to_string())
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// cluster_merge, cluster_split, rotation_drift or redundant_plateau.
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 8)]
    pub layers: usize,
    #[arg(long, default_value_t = 64)]
    pub tokens: usize,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-layer noise (drift step for redundant_plateau).
    #[arg(long, default_value_t = 0.5)]
    pub noise: f64,
    /// First frozen layer of redundant_plateau.
    #[arg(long)]
    pub plateau_first: Option<usize>,
    /// Last frozen layer of redundant_plateau.
    #[arg(long)]
    pub plateau_last: Option<usize>,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TopologyArgs {
    /// Neighbours per token.
    #[arg(long, default_value_t = 15)]
    pub k: usize,
    /// Distance exponent of the consistency weights.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Kernel bandwidth as a fraction of the birth-to-death span.
    #[arg(long, default_value_t = 0.1)]
    pub sigma_scale: f64,
    /// Image cells per layer.
    #[arg(long, default_value_t = 8)]
    pub grid_res: usize,
    /// Highest homology dimension (0 or 1).
    #[arg(long, default_value_t = 1)]
    pub max_dim: usize,
    /// Floating-point precision of the geometric and scoring stages.
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    pub precision: Precision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Threshold,
    Sparsity,
}

#[derive(Debug, Clone, Args)]
pub struct PlanFlags {
    #[arg(long, value_enum, default_value_t = ModeArg::Sparsity)]
    pub mode: ModeArg,
    /// Threshold as a fraction of the best score (threshold mode).
    #[arg(long, default_value_t = 0.9)]
    pub epsilon: f64,
    /// Fraction of layers to prune (sparsity mode).
    #[arg(long, default_value_t = 0.25)]
    pub sparsity: f64,
    /// Allow pruning the first and last layer.
    #[arg(long)]
    pub no_protect_ends: bool,
    /// How per-dimension scores are folded: max or mean.
    #[arg(long, default_value_t = Combine::Max)]
    pub combine: Combine,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Trace files; one sample each.
    pub traces: Vec<PathBuf>,
    #[command(flatten)]
    pub topology: TopologyArgs,
    #[command(flatten)]
    pub plan: PlanFlags,
    /// Score a seeded random fraction of each trace's tokens.
    #[arg(long, default_value_t = 1.0)]
    pub token_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rerun from a config echo written by an earlier run; other flags are ignored.
    #[arg(long, conflicts_with = "traces")]
    pub config: Option<PathBuf>,
    #[arg(short, long = "out-dir", default_value = "topoprune-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// A scores.json written by `score`.
    pub scores: PathBuf,
    #[command(flatten)]
    pub plan: PlanFlags,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OverlapArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// jaccard or over-reference (the first plan is the reference).
    #[arg(long, default_value = "jaccard")]
    pub metric: OverlapMetric,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    pub trace: PathBuf,
    #[command(flatten)]
    pub topology: TopologyArgs,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EpiArgs {
    pub trace: PathBuf,
    #[command(flatten)]
    pub topology: TopologyArgs,
    #[arg(short, long = "out-dir", default_value = "topoprune-epi")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub trace: PathBuf,
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            UsageError(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| UsageError(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_threads()
        .map_err(anyhow::Error::from)
        .and_then(|()| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
