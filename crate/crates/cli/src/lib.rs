//! Command-line front end for the `minet` pipeline: generate or ingest
//! prices, score pairwise mutual information, filter a network, and report
//! its topology.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] minet::Error),

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 for rejected input or usage, 3 for a computation that failed.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.kind() {
                minet::ErrorKind::Input => 2,
                minet::ErrorKind::Compute => 3,
            },
            CliError::Config { .. } | CliError::Io { .. } | CliError::Usage(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "minet",
    version,
    about = "Mutual-information stock networks: generate, score, filter, analyze"
)]
pub struct Cli {
    /// TOML run configuration; explicit flags take precedence over it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic block-correlated price panel
    Gen(GenArgs),
    /// Compute the pairwise normalized mutual-information matrix
    Mi(MiArgs),
    /// Build a filtered network from an MI matrix
    Build(BuildArgs),
    /// Degree law, clustering, and clique reports for a built network
    Analyze(AnalyzeArgs),
    /// Network statistics across a parameter grid
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Comma-separated block sizes, e.g. 30,30,30
    #[arg(long)]
    pub blocks: Option<String>,

    /// Intra-block correlations: one value per block, or one for all
    #[arg(long)]
    pub intra: Option<String>,

    /// Correlation between series of different blocks
    #[arg(long)]
    pub inter: Option<f64>,

    /// Number of return observations (one more price date is written)
    #[arg(long)]
    pub obs: Option<usize>,

    /// RNG seed; identical seeds reproduce the panel byte for byte
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MiArgs {
    /// Price CSV to read
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Price CSV layout: wide or long
    #[arg(long)]
    pub layout: Option<String>,

    /// Drop tickers with missing observations instead of failing
    #[arg(long)]
    pub drop_incomplete: bool,

    /// Number of discretization bins
    #[arg(long)]
    pub bins: Option<usize>,

    /// Binning scheme: equal-frequency or equal-width
    #[arg(long)]
    pub scheme: Option<String>,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Precomputed MI matrix CSV (exclusive with --input)
    #[arg(long, value_name = "FILE")]
    pub mi: Option<PathBuf>,

    /// Price CSV to score first (exclusive with --mi)
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Price CSV layout: wide or long
    #[arg(long)]
    pub layout: Option<String>,

    /// Drop tickers with missing observations instead of failing
    #[arg(long)]
    pub drop_incomplete: bool,

    /// Number of discretization bins (with --input)
    #[arg(long)]
    pub bins: Option<usize>,

    /// Binning scheme (with --input): equal-frequency or equal-width
    #[arg(long)]
    pub scheme: Option<String>,

    /// Sector CSV (ticker,sector[,color]) for node colors
    #[arg(long, value_name = "FILE")]
    pub sectors: Option<PathBuf>,

    /// Filtration method: threshold, mlm, or cmlm
    #[arg(long)]
    pub method: Option<String>,

    /// Global threshold (required by the threshold method)
    #[arg(long)]
    pub eta: Option<f64>,

    /// Penalty weight for cmlm, in [0, 1)
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Penalty exponent for cmlm, at least 1
    #[arg(long)]
    pub q: Option<f64>,

    /// Edge rule: union or lower-index
    #[arg(long)]
    pub edge_rule: Option<String>,

    /// Segment families as weak,strong (normal, exponential, rayleigh,
    /// poisson[:scale]) or auto
    #[arg(long)]
    pub families: Option<String>,

    /// Smallest segment allowed on either side of a breakpoint
    #[arg(long)]
    pub min_segment: Option<usize>,

    /// Include per-node objective curves in breakpoints.json
    #[arg(long)]
    pub curves: bool,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Edge list CSV from `minet build`
    #[arg(long, value_name = "FILE")]
    pub edges: Option<PathBuf>,

    /// MI matrix CSV; supplies the roster and clique weights
    #[arg(long, value_name = "FILE")]
    pub mi: Option<PathBuf>,

    /// Sector CSV for clique composition
    #[arg(long, value_name = "FILE")]
    pub sectors: Option<PathBuf>,

    /// Smallest degree included in the power-law tail
    #[arg(long)]
    pub k_min: Option<usize>,

    /// Report average local clustering instead of global transitivity
    #[arg(long)]
    pub local_clustering: bool,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// MI matrix CSV
    #[arg(long, value_name = "FILE")]
    pub mi: Option<PathBuf>,

    /// Sweep method: threshold (grid of eta) or cmlm (grid of alpha)
    #[arg(long)]
    pub method: Option<String>,

    /// Grid as start:step:end or a comma-separated list
    #[arg(long)]
    pub grid: Option<String>,

    /// Penalty exponent for cmlm rows
    #[arg(long)]
    pub q: Option<f64>,

    /// Segment families as weak,strong or auto (cmlm rows)
    #[arg(long)]
    pub families: Option<String>,

    /// Smallest segment allowed on either side of a breakpoint
    #[arg(long)]
    pub min_segment: Option<usize>,

    /// Edge rule for cmlm rows: union or lower-index
    #[arg(long)]
    pub edge_rule: Option<String>,

    /// Smallest degree included in the power-law tail
    #[arg(long)]
    pub k_min: Option<usize>,

    /// Use average local clustering instead of global transitivity
    #[arg(long)]
    pub local_clustering: bool,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

pub fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Gen(args) => commands::gen(&args, &file),
        Command::Mi(args) => commands::mi(&args, &file),
        Command::Build(args) => commands::build(&args, &file),
        Command::Analyze(args) => commands::analyze(&args, &file),
        Command::Sweep(args) => commands::sweep(&args, &file),
    }
}
