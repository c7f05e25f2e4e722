use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use vsl_core::stimgen::TaskKind;

#[derive(Debug, Parser)]
#[command(name = "vsl", version, about = "Visual-search set-size experiments: stimuli, observers, analysis, capacity fits")]
pub struct Cli {
    /// JSON experiment config; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate stimulus images and manifest.jsonl.
    Gen(GenArgs),
    /// Answer a manifest's test trials with a simulated observer.
    Simulate(SimulateArgs),
    /// Aggregate responses into cells.csv, dprime.csv and slopes.csv.
    Analyze(AnalyzeArgs),
    /// Fit the capacity model to cells.csv.
    Fit(FitArgs),
    /// Write report.svg and report.csv from analysis and fit outputs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub task: Option<TaskKind>,
    /// Difficulty level(s), e.g. `1` or `1,2,3`. Defaults to all levels.
    #[arg(long, value_delimiter = ',')]
    pub difficulty: Vec<u8>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for images and manifest.jsonl.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Single-item d′: one number for every level, or `1=3,2=2,3=1.2`.
    #[arg(long)]
    pub d1: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed decision criterion instead of the optimal one per set size.
    #[arg(long, allow_negative_numbers = true)]
    pub criterion: Option<f64>,
    /// Add the decision variable as a `score` column.
    #[arg(long)]
    pub with_score: bool,
    #[arg(long, default_value = "responses.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub responses: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub cells: PathBuf,
    /// Fit only this task's cells.
    #[arg(long)]
    pub task: Option<TaskKind>,
    #[arg(long, default_value = "fit.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub cells: PathBuf,
    #[arg(long)]
    pub dprime: PathBuf,
    #[arg(long)]
    pub fit: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}
