//! `qsea`: train, evaluate, ablate and inspect sparse quantum circuits.

mod ablate;
mod artifacts;
mod eval;
mod exit;
mod inspect;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "qsea", version, about = "Sparse topology exploration for noisy quantum circuits")]
struct Cli {
    /// Worker threads for simulation and for concurrent ablation cells.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    /// One JSON object per line.
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Train one configuration into a run directory.
    Train(TrainArgs),
    /// Re-evaluate a run's snapshot, optionally under a noise preset.
    Eval(EvalArgs),
    /// Sweep one configuration axis over several seeds.
    Ablate(AblateArgs),
    /// Report circuit statistics of a run or a template.
    Inspect(InspectArgs),
}

#[derive(Args)]
pub struct TrainArgs {
    /// Training configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Override the configuration's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run directory (default: runs/<config stem>-seed<seed>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Train under this noise preset or noise file.
    #[arg(long)]
    pub noise_preset: Option<String>,
    /// Replace an existing run directory.
    #[arg(long)]
    pub overwrite: bool,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Run directory written by `train`.
    #[arg(long)]
    pub run: PathBuf,
    /// Noise preset or noise file; omitted means noiseless.
    #[arg(long)]
    pub noise_preset: Option<String>,
    /// Trajectory seeds for the noise model (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub seed: Vec<u64>,
    /// Classification CSV to evaluate on instead of the run's held-out rows.
    #[arg(long, conflicts_with = "hamiltonian")]
    pub dataset: Option<PathBuf>,
    /// Hamiltonian file to evaluate instead of the run's.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    PruneCriterion,
    GrowCriterion,
    DeltaT,
    Sparsity,
}

#[derive(Args)]
pub struct AblateArgs {
    /// Base training configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Configuration field to sweep.
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Axis values in row order (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<String>,
    /// Seeds per cell.
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// First seed; cells use seed, seed+1, ...
    #[arg(long)]
    pub seed: Option<u64>,
    /// Train every cell under this noise preset or noise file.
    #[arg(long)]
    pub noise_preset: Option<String>,
    /// Output directory (default: ablate-<axis>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace an existing ablation summary.
    #[arg(long)]
    pub overwrite: bool,
}

#[derive(Args)]
pub struct InspectArgs {
    /// Run directory written by `train`.
    #[arg(long, conflicts_with = "template")]
    pub run: Option<PathBuf>,
    /// Template name, e.g. rxyz.
    #[arg(long, required_unless_present = "run")]
    pub template: Option<String>,
    /// Number of template blocks.
    #[arg(long, default_value_t = 8)]
    pub blocks: usize,
    /// Number of qubits.
    #[arg(long, default_value_t = 4)]
    pub qubits: usize,
    /// Random per-block sparsity for the template mask.
    #[arg(long)]
    pub sparsity: Option<f64>,
    /// Seed for the template mask.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(exit::RUNTIME);
        }
    }
    let result = match &cli.command {
        Command::Train(args) => train::run(args, cli.format),
        Command::Eval(args) => eval::run(args, cli.format),
        Command::Ablate(args) => ablate::run(args, cli.format),
        Command::Inspect(args) => inspect::run(args, cli.format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code(&e))
        }
    }
}
