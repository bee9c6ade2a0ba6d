use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use robust_sampling::game::StrategyKind;

#[derive(Parser, Debug)]
#[command(name = "robust-sampling", version, about = "Adversarially robust online sampling experiments")]
pub struct Cli {
    /// Flat JSON object of flag values, applied before the command-line flags
    /// (so flags given on the command line win).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Play the sampling game against an adversary strategy.
    #[command(args_override_self = true)]
    SumGame(SumGameArgs),
    /// Sparsify a hyperedge stream online.
    #[command(args_override_self = true)]
    Hypergraph(HypergraphArgs),
    /// Embed a row stream online.
    #[command(args_override_self = true)]
    Subspace(SubspaceArgs),
    /// Re-check the guarantees of a saved run.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Re-run the size audits of a saved run.
    Audit {
        #[command(subcommand)]
        target: AuditTarget,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by the experiment subcommands.
#[derive(Args, Debug)]
pub struct Common {
    /// Master seed; trial `i` uses splitmix64-derived seed `trial_seed(seed, i)`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Worker threads (0 = one per core). Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Ones,
    Geometric,
    MaxGreedy,
    RatioGreedy,
    ErrorChaser,
    AlwaysOne,
    /// Every strategy above except always-one.
    All,
}

impl StrategyArg {
    pub fn kinds(self) -> Vec<StrategyKind> {
        match self {
            StrategyArg::Ones => vec![StrategyKind::Ones],
            StrategyArg::Geometric => vec![StrategyKind::Geometric],
            StrategyArg::MaxGreedy => vec![StrategyKind::MaxGreedy],
            StrategyArg::RatioGreedy => vec![StrategyKind::RatioGreedy],
            StrategyArg::ErrorChaser => vec![StrategyKind::ErrorChaser],
            StrategyArg::AlwaysOne => vec![StrategyKind::AlwaysOne],
            StrategyArg::All => StrategyKind::ALL
                .into_iter()
                .filter(|k| *k != StrategyKind::AlwaysOne)
                .collect(),
        }
    }
}

#[derive(Args, Debug)]
pub struct SumGameArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Ones)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Bound on total sum over first item.
    #[arg(long = "cap", default_value_t = 1e6)]
    pub delta_cap: f64,
    /// Rounds per game.
    #[arg(long, default_value_t = 2000)]
    pub horizon: usize,
    /// Overrides the derived amplification parameter.
    #[arg(long)]
    pub amp: Option<f64>,
    /// Required win rate (default `1 - delta - 0.025`).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EdgeSource {
    Random,
    Reinsertion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CutFamilyArg {
    None,
    TwoCuts,
    AllCuts,
    KCuts,
}

#[derive(Args, Debug)]
pub struct HypergraphArgs {
    /// Number of vertices.
    #[arg(long)]
    pub n: usize,
    /// Edge-stream file (`-` for stdin). Without it a stream is generated.
    #[arg(long, value_name = "FILE")]
    pub stream: Option<PathBuf>,
    /// Length of a generated stream.
    #[arg(long, default_value_t = 200)]
    pub edges: usize,
    /// Generator of a stream when `--stream` is absent.
    #[arg(long, value_enum, default_value_t = EdgeSource::Random)]
    pub adversary: EdgeSource,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = robust_sampling::hypergraph::DEFAULT_K1)]
    pub k1: f64,
    #[arg(long, value_enum, default_value_t = CutFamilyArg::AllCuts)]
    pub verify: CutFamilyArg,
    /// Block counts for `--verify k-cuts`, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = robust_sampling::hypergraph::DEFAULT_C_SIZE)]
    pub c_size: f64,
    /// Largest tolerated fraction of trials with a cut violation.
    #[arg(long, default_value_t = 0.05)]
    pub max_violation_rate: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RowSource {
    Random,
    Resubmission,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Uniform,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpanArg {
    Exact,
    Tolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbeddingCheck {
    None,
    Pencil,
    Ridge,
    Net,
}

#[derive(Args, Debug)]
pub struct SubspaceArgs {
    /// Row dimension (taken from the file when `--stream` is given).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    /// Caller's bound on the online condition number.
    #[arg(long, default_value_t = 1e4)]
    pub kappa: f64,
    /// Entry bound B (default 100, or the largest entry of `--stream`).
    #[arg(long)]
    pub bound: Option<i64>,
    /// Rows of a generated stream, or the stream-length bound for a file.
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    /// Row-stream file (`-` for stdin). Without it a stream is generated.
    #[arg(long, value_name = "FILE")]
    pub stream: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RowSource::Random)]
    pub adversary: RowSource,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    pub dist: DistArg,
    #[arg(long, default_value_t = robust_sampling::subspace::DEFAULT_K1)]
    pub k1: f64,
    #[arg(long, value_enum, default_value_t = SpanArg::Exact)]
    pub span: SpanArg,
    /// Distortion check (default: pencil for p = 2, none otherwise).
    #[arg(long, value_enum)]
    pub verify: Option<EmbeddingCheck>,
    /// Grid spacing of `--verify net`.
    #[arg(long, default_value_t = 0.25)]
    pub net_resolution: f64,
    #[arg(long, default_value_t = robust_sampling::subspace::DEFAULT_C_AUDIT)]
    pub c_audit: f64,
    /// Smallest tolerated fraction of trials passing the distortion check.
    #[arg(long, default_value_t = 0.9)]
    pub min_pass_rate: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug)]
pub enum VerifyTarget {
    /// Cut check of every trial in a `hypergraph` report.
    #[command(args_override_self = true)]
    Cuts {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = CutFamilyArg::AllCuts)]
        family: CutFamilyArg,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        k: Vec<usize>,
        /// Tolerance to check against (default: the run's epsilon).
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distortion check of every trial in a `subspace` report.
    #[command(args_override_self = true)]
    Embedding {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = EmbeddingCheck::Pencil)]
        mode: EmbeddingCheck,
        #[arg(long, default_value_t = 0.25)]
        net_resolution: f64,
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum AuditTarget {
    /// Weight and size audits of a `hypergraph` report.
    #[command(args_override_self = true)]
    Hypergraph {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = robust_sampling::hypergraph::DEFAULT_C_SIZE)]
        c_size: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sensitivity-sum audit of a `subspace` report.
    #[command(args_override_self = true)]
    Subspace {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = robust_sampling::subspace::DEFAULT_C_AUDIT)]
        c_audit: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}
