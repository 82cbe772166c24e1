use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use drskit::datamix::{PoolPolicy, Regime, Sampling};
use drskit::metrics::Mode;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_RESTARTS: usize = 4;
pub const DEFAULT_EXACT_THRESHOLD: usize = 7;
pub const DEFAULT_BATCH_SIZE: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "drskit", version, about = "Validate, convert, score and mix DRS corpora")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<ReportFormat>,
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed for search restarts and batch shuffling [default: 0].
    #[arg(long, global = true, env = "DRSKIT_SEED")]
    pub seed: Option<u64>,
    /// Worker threads for corpus-level work; 1 runs sequentially [default: all cores].
    #[arg(long, global = true, env = "DRSKIT_JOBS")]
    pub jobs: Option<usize>,
    /// Exit with status 1 when any document is ill-formed.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Read clauses without checking relations against the arity registry.
    #[arg(long, global = true)]
    pub lenient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocFormat {
    /// Clause file blocks.
    Clause,
    /// SBN item blocks.
    Sbn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreMode {
    Clause,
    Graph,
}

impl From<ScoreMode> for Mode {
    fn from(m: ScoreMode) -> Mode {
        match m {
            ScoreMode::Clause => Mode::Clause,
            ScoreMode::Graph => Mode::Graph,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InFormat {
    Clause,
    Sbn,
    /// One linearized clause sequence per line.
    LinearClause,
    /// One linearized SBN sequence per line.
    LinearSbn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Clause,
    Sbn,
    /// Node and edge lists as JSON lines.
    Graph,
    /// One linearized sequence per line.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ItemOrder {
    /// Order in which concepts and constants first occur in the clauses.
    Appearance,
    /// Role edges point forward where possible.
    Topological,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report ill-formed documents and the IF rate.
    Validate {
        #[arg(long, value_enum)]
        mode: DocFormat,
        input: PathBuf,
    },
    /// Convert a corpus between representations.
    Convert {
        #[arg(long, value_enum)]
        from: InFormat,
        #[arg(long, value_enum)]
        to: OutFormat,
        /// Separator token for linearized sequences.
        #[arg(long, default_value = "<sep>")]
        separator: String,
        /// Item order when clauses become SBN.
        #[arg(long, value_enum, default_value = "appearance")]
        order: ItemOrder,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Score predictions against gold.
    Score(ScoreArgs),
    /// Stream training batches for a regime as JSON lines.
    Mix(MixArgs),
    /// Corpus statistics table for a manifest directory.
    Stats { manifest: PathBuf },
    /// LoRA parameter counts and a gradient check.
    LoraDemo(LoraArgs),
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, value_enum)]
    pub mode: ScoreMode,
    /// Prediction corpus.
    #[arg(required_unless_present = "grid", requires = "gold")]
    pub pred: Option<PathBuf>,
    /// Gold corpus, aligned with the predictions.
    pub gold: Option<PathBuf>,
    /// Score a `<lang>/<regime>` results directory and print the full grid.
    #[arg(long, value_name = "DIR", conflicts_with = "pred")]
    pub grid: Option<PathBuf>,
    /// Random restarts for hill climbing [default: 4].
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Largest variable count still searched exhaustively [default: 7].
    #[arg(long)]
    pub exact_threshold: Option<usize>,
    /// Score the readable part of ill-formed predictions.
    #[arg(long)]
    pub salvage: bool,
    /// Average F1 over documents instead of pooling counts.
    #[arg(long = "macro")]
    pub macro_average: bool,
    /// System name for the table row.
    #[arg(long, default_value = "system")]
    pub system: String,
    /// Language name for the table column.
    #[arg(long, default_value = "en")]
    pub language: String,
}

#[derive(Debug, Args)]
pub struct MixArgs {
    pub manifest: PathBuf,
    #[arg(long, value_parser = parse_regime)]
    pub regime: Regime,
    /// Target language; not needed for cross-lingual.
    #[arg(long)]
    pub language: Option<String>,
    /// Batch size [default: 8].
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Emit this many epochs per stage instead of the schedule's count.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long, value_enum, default_value = "shuffle")]
    pub sampling: SamplingArg,
    #[arg(long, value_enum, default_value = "train-and-silver")]
    pub pool_policy: PoolPolicyArg,
    /// Print the stage schedule only.
    #[arg(long)]
    pub schedule: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SamplingArg {
    Shuffle,
    WithReplacement,
}

impl From<SamplingArg> for Sampling {
    fn from(s: SamplingArg) -> Sampling {
        match s {
            SamplingArg::Shuffle => Sampling::Shuffle,
            SamplingArg::WithReplacement => Sampling::WithReplacement,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PoolPolicyArg {
    TrainAndSilver,
    SilverWhereNoTrain,
}

impl From<PoolPolicyArg> for PoolPolicy {
    fn from(p: PoolPolicyArg) -> PoolPolicy {
        match p {
            PoolPolicyArg::TrainAndSilver => PoolPolicy::TrainAndSilver,
            PoolPolicyArg::SilverWhereNoTrain => PoolPolicy::SilverWhereNoTrain,
        }
    }
}

#[derive(Debug, Args)]
pub struct LoraArgs {
    #[arg(short, default_value_t = 1024)]
    pub d: usize,
    #[arg(short, default_value_t = 1024)]
    pub k: usize,
    #[arg(short, default_value_t = 32)]
    pub r: usize,
    /// Random layers in the gradient check.
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
    /// Largest d and k in the gradient check.
    #[arg(long, default_value_t = 16)]
    pub max_dim: usize,
    /// Largest rank in the gradient check.
    #[arg(long, default_value_t = 4)]
    pub max_rank: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Transformer blocks in the toy model count.
    #[arg(long, default_value_t = 24)]
    pub blocks: usize,
    /// Attention projections carrying adapters.
    #[arg(long, value_delimiter = ',', default_value = "q,v")]
    pub targets: Vec<String>,
}

/// Settings readable from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub format: Option<ReportFormat>,
    pub restarts: Option<usize>,
    pub exact_threshold: Option<usize>,
    pub batch_size: Option<usize>,
    pub strict: Option<bool>,
    pub lenient: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Settings after merging defaults, config file, environment and flags.
#[derive(Debug, Clone, Serialize)]
pub struct Effective {
    pub seed: u64,
    pub jobs: Option<usize>,
    pub format: ReportFormat,
    pub restarts: usize,
    pub exact_threshold: usize,
    pub batch_size: usize,
    pub strict: bool,
    pub lenient: bool,
}

impl Effective {
    pub fn resolve(global: &Global, file: FileConfig) -> Effective {
        Effective {
            seed: global.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            jobs: global.jobs.or(file.jobs),
            format: global.format.or(file.format).unwrap_or(ReportFormat::Human),
            restarts: file.restarts.unwrap_or(DEFAULT_RESTARTS),
            exact_threshold: file.exact_threshold.unwrap_or(DEFAULT_EXACT_THRESHOLD),
            batch_size: file.batch_size.unwrap_or(DEFAULT_BATCH_SIZE),
            strict: global.strict || file.strict.unwrap_or(false),
            lenient: global.lenient || file.lenient.unwrap_or(false),
        }
    }
}
