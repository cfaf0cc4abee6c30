use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;

/// Experiments on capacities of odd Calderón-Zygmund kernels.
#[derive(Parser, Debug)]
#[command(name = "czcap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Scan random triples and tabulate (p1 + p2) / c^2 as CSV.
    ScanRatios(ScanArgs),
    /// Run the exact identity suite and write a JSON report.
    CheckIdentities(IdentityArgs),
    /// Curvature and permutation energies and the L2 residual of a measure.
    Energy(EnergyArgs),
    /// Solve one capacity program from a run descriptor.
    Capacity(CapacityArgs),
    /// Compare capacity estimators on one discretization as CSV.
    Compare(CompareArgs),
    /// Mass covered by non-Ahlfors balls of a measure.
    Ahlfors(AhlforsArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Uniform,
    Collinear,
    NearCollinear,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// Kernel powers; one CSV row per power.
    #[arg(long, num_args = 1.., default_values_t = [1u32])]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Uniform)]
    pub mode: Mode,
    /// Relative offset of the middle point in near-collinear mode.
    #[arg(long, default_value_t = 1e-6)]
    pub offset: f64,
    /// Lower corner and side of the sampling box.
    #[arg(long, num_args = 2, default_values_t = [-1.0, -1.0], allow_negative_numbers = true)]
    pub corner: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub side: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct IdentityArgs {
    #[arg(long, default_value_t = 50)]
    pub max_m: u32,
    #[arg(long, default_value_t = 20)]
    pub max_n: u32,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct EnergyArgs {
    /// A measure `{"points","weights"}`, a set descriptor, or a capacity
    /// run descriptor (its witness is used).
    #[arg(long)]
    pub input: PathBuf,
    /// Grid resolution for set descriptors other than clouds.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, num_args = 1.., default_values_t = [1u32, 2])]
    pub n: Vec<u32>,
    /// Truncation radius; half the smallest atom gap when absent.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Power iterations for the operator norm; zero skips it.
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct CapacityArgs {
    /// Run descriptor `{"set","h","kernels","bound","delta"}`.
    #[arg(long)]
    pub input: PathBuf,
    /// Include the witness measure in the output.
    #[arg(long)]
    pub witness: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    /// Set descriptor.
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Second power for the mixed estimator.
    #[arg(long)]
    pub m: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct AhlforsArgs {
    /// Same input kinds as `energy`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub h: Option<f64>,
    /// Density threshold; 100 times the median density when absent.
    #[arg(long = "M")]
    pub threshold: Option<f64>,
    /// Smallest admissible radius; half the smallest atom gap when absent.
    #[arg(long = "t")]
    pub min_radius: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] czcap::Error),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("czcap: {e}");
            match e {
                Failure::Usage(_) => ExitCode::from(2),
                Failure::Numeric(_) | Failure::Invariant(_) => ExitCode::from(3),
            }
        }
    }
}
