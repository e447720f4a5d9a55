//! `resdist` — reproducible batch runs over citation edge lists: pairwise
//! resistance distances, sampled distance distributions, coupling measures,
//! topic rankings, clustering, and histograms.
//!
//! Exit codes: 0 success, 2 input error, 3 numeric/convergence error,
//! 4 disconnected-graph error.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use resdist::{Error as CoreError, Sweep, WeightingScheme};

mod commands;
mod manifest;

#[derive(Debug, Parser)]
#[command(
    name = "resdist",
    version,
    about = "Effective-resistance thematic distances for citation networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the full pairwise distance matrix over all papers
    Distances(DistancesArgs),
    /// Compute the resistance between two named nodes
    Pair(PairArgs),
    /// Estimate the distance distribution from a random sample of pairs
    Sample(SampleArgs),
    /// Rank papers by centrality-normalized median distance to a topic
    Rank(RankArgs),
    /// Emit bibliographic-coupling measures for paper pairs
    Couple(CoupleArgs),
    /// Agglomerative clustering of a distance matrix
    Cluster(ClusterArgs),
    /// Histogram of log distances
    Histogram(HistogramArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightingArg {
    /// Unit link weights
    Unit,
    /// Inverse geometric mean of the endpoint degrees (post-pruning)
    Geodeg,
}

impl From<WeightingArg> for WeightingScheme {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Unit => WeightingScheme::Unit,
            WeightingArg::Geodeg => WeightingScheme::GeometricMeanDegree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    /// Simultaneous update (certified monotone bounds)
    Jacobi,
    /// In-place update (usually fewer sweeps)
    GaussSeidel,
}

impl From<SweepArg> for Sweep {
    fn from(s: SweepArg) -> Self {
        match s {
            SweepArg::Jacobi => Sweep::Jacobi,
            SweepArg::GaussSeidel => Sweep::GaussSeidel,
        }
    }
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Edge-list file: one `citing<delim>cited` record per line, `#` comments
    #[arg(long)]
    input: PathBuf,
    /// Column delimiter: tab, comma, space, or a single character
    #[arg(long, default_value = "tab")]
    delimiter: String,
    /// Link weighting applied after singleton-source pruning
    #[arg(long, value_enum, default_value_t = WeightingArg::Geodeg)]
    weighting: WeightingArg,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Absolute bound-gap tolerance of the iterative solver
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Iteration budget per pair
    #[arg(long = "max-iter", default_value_t = 100_000)]
    max_iter: u32,
    #[arg(long, value_enum, default_value_t = SweepArg::Jacobi)]
    sweep: SweepArg,
    /// Worker threads for pairwise batches (0 = all hardware threads)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl SolverArgs {
    fn config(&self) -> Result<resdist::SolverConfig, CliError> {
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(CliError::Usage(format!(
                "--epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(CliError::Usage("--max-iter must be at least 1".into()));
        }
        Ok(resdist::SolverConfig {
            epsilon: self.epsilon,
            max_iterations: self.max_iter,
            sweep: self.sweep.into(),
        })
    }

    fn parallelism(&self) -> usize {
        if self.threads == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.threads
        }
    }
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DistancesArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Positive-pole node id
    node_a: String,
    /// Grounded-pole node id
    node_b: String,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutArgs,
    /// RNG seed for the pair shuffle
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Consecutive below-threshold standard-error checks before stopping
    #[arg(long, default_value_t = 10)]
    streak: u32,
}

#[derive(Debug, Args)]
struct RankArgs {
    /// Distance-matrix CSV produced by `distances`
    #[arg(long)]
    matrix: PathBuf,
    /// Topic file: CSV with header `paper_id,topic_label`
    #[arg(long)]
    topics: PathBuf,
    /// Topic label to rank against
    #[arg(long)]
    label: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct CoupleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Explicit pair (repeatable); all unordered paper pairs when omitted
    #[arg(long = "pair", num_args = 2, value_names = ["A", "B"], action = clap::ArgAction::Append)]
    pairs: Vec<String>,
    /// Append the one-sweep current columns (coarse upper-bound proxy, not a
    /// similarity measure in its own right)
    #[arg(long)]
    with_current: bool,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Distance-matrix CSV produced by `distances`
    #[arg(long)]
    matrix: PathBuf,
    /// Linkage: ward, average, single, or complete
    #[arg(long, default_value = "ward")]
    linkage: String,
    /// Number of flat clusters to cut
    #[arg(short = 'k', long = "clusters")]
    k: usize,
    /// Square the dissimilarities before clustering (Ward variant for plain
    /// Euclidean inputs)
    #[arg(long)]
    squared: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct HistogramArgs {
    /// Distance-matrix CSV produced by `distances`
    #[arg(long)]
    matrix: PathBuf,
    /// Number of equal-width bins over the log-distance range
    #[arg(long, default_value_t = 40)]
    bins: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Io(std::io::Error),
    Json(serde_json::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

impl CliError {
    /// 2 input error, 3 numeric/convergence error, 4 disconnected graph.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::Disconnected { .. })
            | CliError::Core(CoreError::DisconnectedPapers { .. }) => 4,
            CliError::Core(CoreError::Domain(_)) => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Distances(args) => commands::distances(args),
        Command::Pair(args) => commands::pair(args),
        Command::Sample(args) => commands::sample(args),
        Command::Rank(args) => commands::rank(args),
        Command::Couple(args) => commands::couple(args),
        Command::Cluster(args) => commands::cluster(args),
        Command::Histogram(args) => commands::histogram(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("resdist: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
