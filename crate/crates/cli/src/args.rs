use std::path::PathBuf;

use agpm_core::engine::{DEFAULT_CHECK_INTERVAL, DEFAULT_DELTA, DEFAULT_EPSILON, DEFAULT_MAX_SAMPLERS};
use agpm_core::experiments::Suite;
use agpm_core::pattern::DEFAULT_BETA;
use agpm_core::{Mode, Orientation, Terms};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "agpm",
    version,
    about = "Approximate subgraph pattern counting by neighbor sampling"
)]
pub struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the number of embeddings of a pattern.
    Count(CountArgs),
    /// Count embeddings exactly by enumeration (small graphs only).
    Exact(ExactArgs),
    /// Compute the per-vertex statistics sidecar for a graph.
    Preprocess(PreprocessArgs),
    /// Run a desk-scale experiment suite and print CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Edge list (one `u v` pair per line) or binary CSR cache.
    #[arg(short, long)]
    pub graph: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct PatternArgs {
    /// Builtin name (triangle, 4-clique, 5-house, ...), inline edges such as
    /// `0-1,1-2,2-0`, or a path to an edge-list file.
    #[arg(short, long)]
    pub pattern: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PreprocessMode {
    /// Exact coefficients up to 1e6 edges, sampled above.
    Auto,
    Exact,
    Sampled,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub pattern: PatternArgs,

    /// Target relative error.
    #[arg(short, long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Allowed failure probability.
    #[arg(short, long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    /// Certainty threshold for structure-informed steps.
    #[arg(long, default_value_t = DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(short, long, env = "AGIS_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value = "agis")]
    pub mode: Mode,
    #[arg(long, default_value = "auto")]
    pub orientation: Orientation,
    /// Weight terms: F1, F1+I1 or F1+I1+F2.
    #[arg(long, default_value = "F1+I1+F2", value_parser = parse_terms)]
    pub terms: Terms,
    /// Outputs per worker between convergence checks.
    #[arg(long, default_value_t = DEFAULT_CHECK_INTERVAL)]
    pub check_interval: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_SAMPLERS)]
    pub max_samplers: u64,
    #[arg(long)]
    pub max_seconds: Option<f64>,

    /// Print the full result as JSON.
    #[arg(long)]
    pub json: bool,
    /// Time set operations, weight computation and drawing separately.
    #[arg(long)]
    pub profile: bool,

    /// Statistics file; defaults to `<graph>.agispp`.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Compute statistics in memory instead of reading the sidecar.
    #[arg(long)]
    pub preprocess_inline: bool,
    /// Clustering mode for `--preprocess-inline`.
    #[arg(long, value_enum, default_value_t = PreprocessMode::Auto)]
    pub preprocess_mode: PreprocessMode,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub pattern: PatternArgs,
    /// Enumerate even when the graph exceeds the size guard.
    #[arg(long)]
    pub no_guard: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = PreprocessMode::Auto)]
    pub mode: PreprocessMode,
    /// Seed for sampled clustering coefficients.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overwrite an existing sidecar.
    #[arg(long)]
    pub force: bool,
    /// Output path; defaults to `<graph>.agispp`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(short, long, env = "AGIS_THREADS", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_suite)]
    pub suite: Suite,
    /// Graph to use instead of the suite's synthetic default.
    #[arg(short, long)]
    pub graph: Option<PathBuf>,
    /// Comma-separated patterns; defaults depend on the suite.
    #[arg(long, value_delimiter = ',')]
    pub patterns: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u64, 2, 3])]
    pub seeds: Vec<u64>,
    #[arg(short, long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(short, long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(short, long, env = "AGIS_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_SAMPLERS)]
    pub max_samplers: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_terms(s: &str) -> Result<Terms, String> {
    (0..3)
        .map(Terms::level)
        .find(|t| t.label().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown terms '{s}' (expected F1, F1+I1 or F1+I1+F2)"))
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: agpm_core::Error| e.to_string())
}
