use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latent_evolve_core::EvolutionConfig;

use crate::error::{CliError, CliResult};
use crate::evaluator::EvaluatorSpec;

#[derive(Debug, Parser)]
#[command(
    name = "latent-evolve",
    version,
    about = "Evolve generator latents toward a target embedding"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one evolution and write its artifacts.
    Run(RunArgs),
    /// Run a (p_R, p_M) grid with repeated independent runs per cell.
    Sweep(SweepArgs),
    /// Summaries, diversity matrices and convergence curves over finished runs.
    Report(ReportArgs),
    /// Serve the worker protocol on stdin/stdout from a synthetic world.
    #[command(hide = true)]
    MockWorker(MockWorkerArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvaluatorKind {
    Synthetic,
    Worker,
}

#[derive(Clone, Debug, Args)]
pub struct EvaluatorArgs {
    #[arg(long, value_enum, default_value_t = EvaluatorKind::Synthetic)]
    pub evaluator: EvaluatorKind,
    /// Command line that starts the model worker (evaluator=worker only).
    #[arg(long)]
    pub worker_cmd: Option<String>,
    /// Target image passed to the worker (evaluator=worker only).
    #[arg(long)]
    pub target: Option<String>,
    /// Seed of the synthetic world (evaluator=synthetic only).
    #[arg(long, default_value_t = 0)]
    pub world_seed: u64,
    /// Proxy image size of the synthetic world; defaults to min(2·latent_dim, 256).
    #[arg(long)]
    pub proxy_dim: Option<usize>,
    /// Seconds a worker gets to exit after shutdown before it is killed.
    #[arg(long, default_value_t = 10.0)]
    pub grace_secs: f64,
}

impl EvaluatorArgs {
    pub fn spec(&self) -> CliResult<EvaluatorSpec> {
        match self.evaluator {
            EvaluatorKind::Synthetic => {
                if self.worker_cmd.is_some() || self.target.is_some() {
                    return Err(CliError::Config(
                        "--worker-cmd and --target require --evaluator worker".into(),
                    ));
                }
                Ok(EvaluatorSpec::Synthetic {
                    world_seed: self.world_seed,
                    proxy_dim: self.proxy_dim,
                })
            }
            EvaluatorKind::Worker => {
                let command = self.worker_cmd.clone().ok_or_else(|| {
                    CliError::Config("--evaluator worker requires --worker-cmd".into())
                })?;
                let target = self.target.clone().ok_or_else(|| {
                    CliError::Config("--evaluator worker requires --target".into())
                })?;
                if !self.grace_secs.is_finite() || self.grace_secs < 0.0 {
                    return Err(CliError::Config("--grace-secs must be non-negative".into()));
                }
                Ok(EvaluatorSpec::Worker {
                    command,
                    target,
                    grace: Duration::from_secs_f64(self.grace_secs),
                })
            }
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Flat JSON configuration; omitted keys take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub evaluator: EvaluatorArgs,
    /// Run seed; overrides master_seed from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

pub const DEFAULT_GRID: &str = "pR=0.6,0.75,0.9;pM=0.001,0.01,0.1";

#[derive(Clone, Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub evaluator: EvaluatorArgs,
    #[arg(long, default_value = DEFAULT_GRID)]
    pub grid: String,
    #[arg(long, default_value_t = 30)]
    pub repeats: usize,
    /// Master seed; overrides master_seed from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Runs executed in parallel.
    #[arg(long, env = "LATENT_EVOLVE_JOBS", default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Summary,
    Diversity,
    Curves,
}

#[derive(Clone, Debug, Args)]
pub struct ReportArgs {
    /// Run directories, or directories containing them (searched recursively).
    #[arg(long, num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub emit: Emit,
    /// Distance between two genuine images of the target; adds deception Δ
    /// to the summary.
    #[arg(long)]
    pub baseline: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct MockWorkerArgs {
    #[arg(long, default_value_t = 512)]
    pub latent_dim: usize,
    #[arg(long, default_value_t = 128)]
    pub embedding_dim: usize,
    #[arg(long)]
    pub proxy_dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub world_seed: u64,
    /// Ignore shutdown and sleep forever (tests forced termination).
    #[arg(long)]
    pub hang_on_shutdown: bool,
}

pub fn load_config(path: Option<&PathBuf>) -> CliResult<EvolutionConfig> {
    match path {
        None => Ok(EvolutionConfig::default()),
        Some(p) => EvolutionConfig::from_json_file(p)
            .map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
    }
}
