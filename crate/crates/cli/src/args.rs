use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dapd", version, about = "Asynchronous primal-dual supply-chain flow simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a problem file from a generator recipe.
    Generate(GenerateArgs),
    /// Run one algorithm and write a run directory.
    Run(RunArgs),
    /// Re-check a run directory against the convergence theory.
    Verify(VerifyArgs),
    /// Run several algorithms over a seed list and tabulate the results.
    Compare(CompareArgs),
    /// Run the cross product of a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    ThreeTier,
    Fig1,
    Quadratic,
    RandomQuadratic,
    SmallDag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Theory,
    #[value(name = "experiment-s10")]
    ExperimentS10,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator with its default sizes.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    pub kind: Option<GeneratorKind>,
    /// TOML generator recipe (`kind = "three_tier"`, sizes, ranges, seed).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Problem file to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Overwrite an existing file.
    #[arg(long)]
    pub force: bool,
}

/// Where the base config comes from, plus per-invocation overrides.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// TOML config layered over its preset.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Preset used when no config file is given.
    #[arg(long, value_enum, conflicts_with = "config")]
    pub preset: Option<PresetArg>,
    /// Override the number of ticks.
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Override the configured algorithm.
    #[arg(long)]
    pub algorithm: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run directory; defaults to `<output root>/<preset>-<algorithm>-s<seed>`.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "DAPD_OUTPUT_ROOT", default_value = "runs")]
    pub output_root: PathBuf,
    /// Replace an existing run directory.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Directory written by `dapd run`.
    pub run_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Comma-separated algorithms (at least two).
    #[arg(long, default_value = "dapdsco,sync_pd,admm,gradient_push")]
    pub algorithms: String,
    /// Seeds as `1-10` or `1,4,7`.
    #[arg(long, default_value = "1-10")]
    pub seeds: String,
    /// CSV file to write; printed to stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
    /// Worker threads (0 = available parallelism).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Grid axis `name=v1,v2,...`; repeatable. Names: loss, gamma, c_delta,
    /// tau, sigma, sigma_c, sigma_d, activation, alpha, beta.
    #[arg(long = "grid", required = true)]
    pub grid: Vec<String>,
    #[arg(long, default_value = "1-5")]
    pub seeds: String,
    /// Sweep directory; defaults to `<output root>/sweep`.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "DAPD_OUTPUT_ROOT", default_value = "runs")]
    pub output_root: PathBuf,
    /// Refuse grids with more cells than this.
    #[arg(long, default_value_t = 64)]
    pub max_cells: usize,
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}
