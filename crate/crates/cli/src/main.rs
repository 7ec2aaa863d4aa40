use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use seedclass::corpus::RecordSchema;

mod commands;
mod output;

#[derive(Parser, Debug)]
#[command(
    name = "seedclass",
    version,
    about = "Classify papers into research areas from seed venues, text and citations"
)]
struct Cli {
    /// Worker threads; defaults to one per core. Never changes the output.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Index the seed papers and write a snapshot plus a build report.
    BuildIndex(BuildIndexArgs),
    /// Fit fusion weights on labeled papers and write a model.
    Train(TrainArgs),
    /// Classify every non-seed paper and write a TSV of predictions.
    Classify(ClassifyArgs),
    /// Two-fold cross-validation of the full model.
    Evaluate(EvalArgs),
    /// Cross-validate all seven feature subsets.
    Ablate(EvalArgs),
    /// Generate a synthetic benchmark corpus.
    BenchGen(BenchGenArgs),
}

#[derive(Args, Debug, Clone)]
struct CorpusArgs {
    /// Papers as JSON lines.
    #[arg(long)]
    papers: PathBuf,

    /// Record layout of the papers file.
    #[arg(long, default_value = "native", value_parser = parse_schema)]
    schema: RecordSchema,
}

fn parse_schema(s: &str) -> Result<RecordSchema, String> {
    s.parse().map_err(|e: seedclass::Error| e.to_string())
}

/// Index configuration. When given to a command that reads a snapshot, the
/// values must agree with the snapshot.
#[derive(Args, Debug, Clone, Default)]
struct IndexConfigArgs {
    #[arg(long)]
    b: Option<f64>,

    #[arg(long)]
    k1: Option<f64>,

    /// Keep stopwords when tokenizing.
    #[arg(long)]
    no_stopwords: bool,
}

#[derive(Args, Debug)]
struct BuildIndexArgs {
    #[command(flatten)]
    corpus: CorpusArgs,

    /// Venue-to-area map; defaults to the built-in 26-area map.
    #[arg(long)]
    venue_map: Option<PathBuf>,

    /// Snapshot path to write.
    #[arg(long)]
    index: PathBuf,

    /// Build report path; defaults to the snapshot path plus `.report.json`.
    #[arg(long)]
    out: Option<PathBuf>,

    #[command(flatten)]
    config: IndexConfigArgs,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,

    #[arg(long)]
    index: PathBuf,

    /// Gold labels as `paper_id<TAB>area_id` lines.
    #[arg(long)]
    labels: PathBuf,

    /// Model path to write.
    #[arg(long)]
    model: PathBuf,

    #[command(flatten)]
    config: IndexConfigArgs,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    corpus: CorpusArgs,

    #[arg(long)]
    index: PathBuf,

    #[arg(long)]
    model: PathBuf,

    /// Predictions TSV; a `.run.json` sidecar records the configuration.
    #[arg(long)]
    out: PathBuf,

    #[command(flatten)]
    config: IndexConfigArgs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,

    #[arg(long)]
    index: PathBuf,

    #[arg(long)]
    labels: PathBuf,

    /// Output directory for the JSON report and the text table.
    #[arg(long)]
    out: PathBuf,

    /// Seed for the fold split.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[command(flatten)]
    config: IndexConfigArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Preset {
    /// Every feature alone identifies the gold area.
    Separable,
    /// Text signal for half the areas, citation signal for the other half.
    Complementary,
    /// No signal at all.
    Noise,
}

#[derive(Args, Debug)]
struct BenchGenArgs {
    /// Output directory for papers.jsonl, areas.json and labels.tsv.
    #[arg(long)]
    out: PathBuf,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value = "complementary")]
    preset: Preset,

    #[arg(long, default_value_t = 26)]
    areas: usize,

    #[arg(long, default_value_t = 200)]
    seeds_per_area: usize,

    #[arg(long, default_value_t = 20)]
    tests_per_area: usize,

    /// Tokens per document; defaults to the preset's value.
    #[arg(long)]
    doc_len: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
