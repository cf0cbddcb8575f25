//! `simplikit`: batch front end for corpus preparation, decoding,
//! evaluation and complexity reports.
//!
//! Every command writes into `--out-dir` together with a `manifest.json`
//! describing the run. Exit status: 0 ok, 1 usage, 2 data error,
//! 3 internal error; failures print one JSON object on stderr.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use simplikit::decoding::Algorithm;

use crate::error::CliError;

/// Environment variable naming the directory holding `model.json`.
pub const MODEL_DIR_ENV: &str = "SIMPLIKIT_MODEL_DIR";

#[derive(Debug, Parser)]
#[command(name = "simplikit", version, about = "Document-level text simplification toolkit")]
struct Cli {
    /// Worker threads for record-parallel commands.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-record and mean BLEU, METEOR and SARI of predictions.
    Eval(EvalArgs),
    /// Mean ± std complexity measures per group.
    Complexity(ComplexityArgs),
    /// Generate one prediction per record with a trained model.
    Decode(DecodeArgs),
    /// Document and word counts per provenance and split.
    Stats(StatsArgs),
    /// Train an n-gram language model on a corpus.
    Train(TrainArgs),
    /// Assign a seeded random test split.
    Split(SplitArgs),
    /// Create sources from targets through prompt templates.
    Synthesize(SynthesizeArgs),
    /// Mean and standard deviation of human ratings.
    Ratings(RatingsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitFilter {
    Train,
    Test,
    All,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Corpus-format file whose targets are model outputs.
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Row label in the score table.
    #[arg(long, default_value = "model")]
    pub label: String,
    #[arg(long, value_enum, default_value_t = SplitFilter::All)]
    pub split: SplitFilter,
    /// Also write per-record, per-n CSVs of BLEU precisions and SARI
    /// components, with their quartile summaries.
    #[arg(long)]
    pub distributions: bool,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// `provenance`, `split`, `template` or `none`.
    #[arg(long, default_value = "provenance")]
    pub group_by: String,
    /// Group label when grouping by `none`.
    #[arg(long, default_value = "corpus")]
    pub label: String,
    /// Which text of each record to profile: `target` or `source`.
    #[arg(long, default_value = "target")]
    pub field: String,
    /// Separable-verb lexicon file; the built-in one by default.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

/// Decoding flags carry the parameter-table names; a `--config` file
/// overrides any of them.
#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Model file; defaults to `$SIMPLIKIT_MODEL_DIR/model.json`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SplitFilter::All)]
    pub split: SplitFilter,
    #[arg(long, value_parser = parse_algorithm)]
    pub algorithm: Option<Algorithm>,
    #[arg(long = "no_ngram_repeat_size", alias = "no-ngram-repeat-size")]
    pub no_ngram_repeat_size: Option<usize>,
    #[arg(long = "max_length", alias = "max-length")]
    pub max_length: Option<usize>,
    #[arg(long = "num_beams", alias = "num-beams")]
    pub num_beams: Option<usize>,
    #[arg(long = "early_stopping", alias = "early-stopping")]
    pub early_stopping: Option<bool>,
    #[arg(long = "do_sample", alias = "do-sample")]
    pub do_sample: Option<bool>,
    #[arg(long = "top_p", alias = "top-p")]
    pub top_p: Option<f64>,
    #[arg(long = "top_k", alias = "top-k")]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long = "penalty_alpha", alias = "penalty-alpha")]
    pub penalty_alpha: Option<f64>,
    #[arg(long = "repeat_window", alias = "repeat-window")]
    pub repeat_window: Option<usize>,
    #[arg(long = "repeat_threshold", alias = "repeat-threshold")]
    pub repeat_threshold: Option<usize>,
    /// Record `i` samples with seed `seed + i`.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: simplikit::decoding::DecodeError| e.to_string())
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, default_value_t = 0.75)]
    pub discount: f64,
    #[arg(long, default_value_t = 1)]
    pub min_count: usize,
    #[arg(long, value_enum, default_value_t = SplitFilter::Train)]
    pub split: SplitFilter,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub test_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    /// Corpus whose targets are the simplifications.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Template file; the 15 built-in templates by default.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// The offline provider returns this prefix followed by the
    /// simplification.
    #[arg(long, default_value = "Alltagssprache: ")]
    pub stub_prefix: String,
    #[arg(long, default_value_t = 4)]
    pub max_in_flight: usize,
}

#[derive(Debug, Args)]
pub struct RatingsArgs {
    /// JSON Lines of `{"record_id": ..., "rating": 0..3}`.
    #[arg(long)]
    pub ratings: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Eval(args) => commands::eval::run(&args, cli.jobs),
        Command::Complexity(args) => commands::complexity::run(&args),
        Command::Decode(args) => commands::decode::run(&args, cli.jobs),
        Command::Stats(args) => commands::stats::run(&args),
        Command::Train(args) => commands::train::run(&args),
        Command::Split(args) => commands::split::run(&args),
        Command::Synthesize(args) => commands::synthesize::run(&args),
        Command::Ratings(args) => commands::ratings::run(&args),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
