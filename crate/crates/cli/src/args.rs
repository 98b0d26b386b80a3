use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "greedymatch", version, about = "Greedy matching for D2D resource sharing: generation, matching, oracles, bounds and analytics")]
pub struct Cli {
    /// Worker threads for sampling and the matching engine (0 = all cores).
    #[arg(long, global = true, env = "GREEDYMATCH_WORKERS", default_value_t = 0)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a weighted graph and write it as JSON or CSV.
    Generate(GenerateArgs),
    /// Run the greedy matching on a graph file.
    Match(MatchArgs),
    /// Compute an exact optimal matching.
    Optimal(OptimalArgs),
    /// Evaluate an upper bound on the optimal matching weight.
    Bound(BoundArgs),
    /// Evaluate closed-form and numerical formulas.
    Analyze(AnalyzeArgs),
    /// Run an experiment described by a TOML or JSON config file.
    Experiment(ExperimentArgs),
    /// Run a bundled figure configuration and write its curve data.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    Line,
    Grid2d,
    Gnp,
    Geometric,
    Caching,
}

#[derive(Debug, Args, Serialize)]
pub struct WeightArgs {
    /// Weight support values.
    #[arg(long = "v", num_args = 1.., default_values_t = [1.0, 2.0])]
    pub values: Vec<f64>,
    /// Probabilities of the support values; uniform when omitted.
    #[arg(long = "p", num_args = 1..)]
    pub probs: Option<Vec<f64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Node count (line, gnp, geometric).
    #[arg(long)]
    pub n: Option<usize>,
    /// Side length (grid2d).
    #[arg(long)]
    pub side: Option<usize>,
    /// Edge probability (gnp); `--d` sets it to d / (n - 1) instead.
    #[arg(long = "edge-prob")]
    pub edge_prob: Option<f64>,
    /// Mean degree (gnp).
    #[arg(long)]
    pub d: Option<f64>,
    /// Disk radius in metres (geometric).
    #[arg(long, default_value_t = 1000.0)]
    pub radius: f64,
    /// Sharing range in metres (geometric, caching).
    #[arg(long)]
    pub range: Option<f64>,
    /// Location CSV (caching); synthetic users when omitted.
    #[arg(long)]
    pub locations: Option<PathBuf>,
    /// Synthetic user count (caching).
    #[arg(long, default_value_t = 300)]
    pub users: usize,
    /// Use cache-derived weights with this library size.
    #[arg(long)]
    pub library: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub cache: usize,
    #[command(flatten)]
    pub weights: WeightArgs,
    /// Per-node quantities drawn uniformly from these values.
    #[arg(long, num_args = 1..)]
    pub quantities: Option<Vec<u32>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; `.csv` selects CSV, anything else JSON. Standard output when omitted.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieArg {
    Id,
    Left,
}

#[derive(Debug, Args, Serialize)]
pub struct MatchArgs {
    /// Graph file (JSON or CSV).
    #[arg(long)]
    pub input: PathBuf,
    /// Allocate up to each node's quantity instead of a matching.
    #[arg(long)]
    pub multiunit: bool,
    #[arg(long = "tie-rule", value_enum, default_value_t = TieArg::Id)]
    pub tie_rule: TieArg,
    /// Post-match failures with coefficients delta1 (distance) and delta2 (interference).
    #[arg(long, num_args = 2, value_names = ["DELTA1", "DELTA2"])]
    pub failures: Option<Vec<f64>>,
    /// Interference radius for failures; defaults to the longest edge in the graph.
    #[arg(long = "interference-radius")]
    pub interference_radius: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the per-round trace as CSV.
    #[arg(long)]
    #[serde(skip)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimalMethod {
    #[value(name = "path_dp", alias = "path-dp")]
    PathDp,
    #[value(name = "tree_dp", alias = "tree-dp")]
    TreeDp,
    Exhaustive,
    #[value(name = "multiunit_exhaustive", alias = "multiunit-exhaustive")]
    MultiunitExhaustive,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimalArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: OptimalMethod,
    /// Edge cap for the exhaustive search.
    #[arg(long = "max-edges")]
    pub max_edges: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Layered decomposition of a path.
    Decomposition,
    /// Half the summed heaviest incident weights.
    #[value(name = "neighbor-max", alias = "neighbor_max")]
    NeighborMax,
    /// Expectation of the neighbor-max bound at the graph's degrees.
    #[value(name = "neighbor-max-expected", alias = "neighbor_max_expected")]
    NeighborMaxExpected,
    /// Per-node descending fill of quantities.
    Multiunit,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub kind: BoundKind,
    #[arg(long)]
    pub input: PathBuf,
    /// Weight model for the expected bound; the graph's support, uniform, when omitted.
    #[arg(long = "v", num_args = 1..)]
    pub values: Option<Vec<f64>>,
    #[arg(long = "p", num_args = 1..)]
    pub probs: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(subcommand)]
    pub formula: Formula,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    /// Number of weight levels; with no `--v`, levels are 1, 2, ..., K.
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long = "v", num_args = 1..)]
    pub values: Option<Vec<f64>>,
    #[arg(long = "p", num_args = 1..)]
    pub probs: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// Asymptotic performance-ratio lower bound on lines.
    PrLinear(ModelArgs),
    /// Linear recurrence coefficients and slope for lines.
    Slope(ModelArgs),
    /// Grid recurrence, step-3 segment sum and ratio bound for weights {1, 1 + delta}.
    Grid {
        #[arg(long)]
        delta: f64,
    },
    /// Multi-unit line ratio bound for weights {1, 1 + delta} and quantities {1, 2}.
    Multiunit {
        #[arg(long)]
        delta: f64,
    },
    /// Proposal probabilities along a grid's first row for K uniform levels.
    Proposal {
        #[arg(long = "K", default_value_t = 2)]
        k: usize,
    },
    /// Proposal fixed point on the Poisson tree and the root's expected weight.
    TreeFixedPoint {
        #[arg(long)]
        d: f64,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
    /// Steady-state participant count of the dynamic market.
    SteadyState {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long = "T")]
        interval: u32,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    /// Config file (TOML, or JSON for a `.json` path).
    #[arg(long)]
    #[serde(skip)]
    pub config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the config's sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Full JSON report; standard output when omitted.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Curve data as CSV.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproduceArgs {
    /// One of fig7, fig8, fig9, fig10, fig11.
    pub figure: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Directory for `<figure>.csv` and `<figure>.json`.
    #[arg(long = "out-dir", default_value = ".")]
    #[serde(skip)]
    pub out_dir: PathBuf,
    /// Print the bundled config as TOML and exit.
    #[arg(long = "print-config")]
    #[serde(skip)]
    pub print_config: bool,
}
