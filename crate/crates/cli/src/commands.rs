use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use seedclass::corpus::{read_labels_file, read_papers_file, write_labels, write_papers, Paper, VenueMap};
use seedclass::eval::{ablation_grid, cross_validate, format_table, generate_synthetic_benchmark, BenchmarkConfig};
use seedclass::features::FeatureMask;
use seedclass::fusion::{train_weights, Classifier, FusionModel, Outcome};
use seedclass::index::{Bm25Params, SeedIndex};
use seedclass::pipeline::Pipeline;
use seedclass::text::TokenizerConfig;

use crate::output::{sidecar, write_atomic, write_json};
use crate::{
    BenchGenArgs, BuildIndexArgs, ClassifyArgs, Cli, Command, CorpusArgs, EvalArgs, IndexConfigArgs, Preset, TrainArgs,
};

/// Papers classified per parallel batch; bounds the buffered output.
const CLASSIFY_CHUNK: usize = 4096;

/// The resolved configuration of a run, embedded in its outputs. The
/// thread count is left out on purpose: it never changes results.
#[derive(Serialize, Default)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    papers: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    venue_map: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    b: f64,
    k1: f64,
    stopwords: bool,
    config_fingerprint: String,
}

impl RunConfig {
    fn new(command: &'static str, corpus: &CorpusArgs, index: &SeedIndex) -> Self {
        RunConfig {
            command,
            papers: Some(show(&corpus.papers)),
            schema: Some(corpus.schema.to_string()),
            b: index.params().b,
            k1: index.params().k1,
            stopwords: index.tokenizer().stopwords,
            config_fingerprint: index.fingerprint(),
            ..Default::default()
        }
    }
}

fn show(path: &Path) -> String {
    path.display().to_string()
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        ensure!(n > 0, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker threads")?;
    }
    match cli.command {
        Command::BuildIndex(args) => build_index(args),
        Command::Train(args) => train(args),
        Command::Classify(args) => classify(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Ablate(args) => ablate(args),
        Command::BenchGen(args) => bench_gen(args),
    }
}

fn read_corpus(corpus: &CorpusArgs) -> Result<Vec<Paper>> {
    let report = read_papers_file(&corpus.papers, corpus.schema)?;
    for e in &report.errors {
        log::warn!("{}:{}: skipped: {}", corpus.papers.display(), e.line, e.message);
    }
    if report.dropped > 0 {
        log::warn!("{}: {} records without id or title dropped", corpus.papers.display(), report.dropped);
    }
    if report.duplicates > 0 {
        log::warn!("{}: {} duplicate ids ignored", corpus.papers.display(), report.duplicates);
    }
    Ok(report.papers)
}

fn resolve_params(config: &IndexConfigArgs) -> (Bm25Params, TokenizerConfig) {
    let default = Bm25Params::default();
    let params = Bm25Params { b: config.b.unwrap_or(default.b), k1: config.k1.unwrap_or(default.k1) };
    (params, TokenizerConfig { stopwords: !config.no_stopwords })
}

/// Loads a snapshot and rejects explicit settings that disagree with it.
fn load_index(path: &Path, config: &IndexConfigArgs) -> Result<SeedIndex> {
    let index = SeedIndex::load(path).with_context(|| format!("loading index {}", path.display()))?;
    let params = index.params();
    if let Some(b) = config.b.filter(|&b| b != params.b) {
        bail!("--b {b} does not match the index snapshot (b = {})", params.b);
    }
    if let Some(k1) = config.k1.filter(|&k1| k1 != params.k1) {
        bail!("--k1 {k1} does not match the index snapshot (k1 = {})", params.k1);
    }
    if config.no_stopwords && index.tokenizer().stopwords {
        bail!("--no-stopwords does not match the index snapshot, which was built with stopword removal");
    }
    Ok(index)
}

#[derive(Serialize)]
struct AreaSeeds {
    area: String,
    seeds: u32,
}

#[derive(Serialize)]
struct BuildReport {
    config: RunConfig,
    papers_read: usize,
    dropped: usize,
    duplicates: usize,
    malformed_lines: usize,
    seeds: usize,
    seeds_per_area: Vec<AreaSeeds>,
    vocabulary_size: usize,
    avg_doc_len: f64,
    citation_edges: usize,
    dangling_references: usize,
}

fn build_index(args: BuildIndexArgs) -> Result<()> {
    let ingest = read_papers_file(&args.corpus.papers, args.corpus.schema)?;
    for e in &ingest.errors {
        log::warn!("{}:{}: skipped: {}", args.corpus.papers.display(), e.line, e.message);
    }
    let venue_map = match &args.venue_map {
        Some(path) => VenueMap::load(path).with_context(|| format!("loading venue map {}", path.display()))?,
        None => VenueMap::default_map(),
    };
    let (params, tokenizer) = resolve_params(&args.config);
    let papers_read = ingest.papers.len();
    let pipeline = Pipeline::build(ingest.papers, &venue_map, params, tokenizer)?;
    let index = pipeline.index();

    let mut snapshot = Vec::new();
    index.write_snapshot(&mut snapshot)?;
    write_atomic(&args.index, &snapshot)?;

    let mut config = RunConfig::new("build-index", &args.corpus, index);
    config.venue_map = Some(args.venue_map.as_deref().map(show).unwrap_or_else(|| "built-in".to_string()));
    config.index = Some(show(&args.index));
    let report = BuildReport {
        config,
        papers_read,
        dropped: ingest.dropped,
        duplicates: ingest.duplicates,
        malformed_lines: ingest.errors.len(),
        seeds: index.corpus_size(),
        seeds_per_area: index
            .areas()
            .iter()
            .zip(index.area_sizes())
            .map(|(a, &seeds)| AreaSeeds { area: a.id.clone(), seeds })
            .collect(),
        vocabulary_size: index.vocabulary_size(),
        avg_doc_len: index.avg_doc_len(),
        citation_edges: pipeline.graph().edge_count(),
        dangling_references: pipeline.graph().dangling_references(),
    };
    let report_path = args.out.unwrap_or_else(|| sidecar(&args.index, ".report.json"));
    write_json(&report_path, &report)?;
    eprintln!(
        "indexed {} seeds across {} areas from {} papers",
        report.seeds,
        report.seeds_per_area.iter().filter(|a| a.seeds > 0).count(),
        papers_read
    );
    Ok(())
}

fn load_pipeline(corpus: &CorpusArgs, index: &Path, config: &IndexConfigArgs) -> Result<Pipeline> {
    let index = load_index(index, config)?;
    let papers = read_corpus(corpus)?;
    Ok(Pipeline::with_index(papers, index))
}

fn train(args: TrainArgs) -> Result<()> {
    let pipeline = load_pipeline(&args.corpus, &args.index, &args.config)?;
    let index = pipeline.index();
    let labels = read_labels_file(&args.labels, index.areas())?;
    let instances = pipeline.labeled_instances(&labels)?;
    let weights = train_weights(instances.iter().map(|i| (&i.features, i.gold)))?;
    if weights.rank_deficient {
        log::warn!("feature columns are linearly dependent; weights are the minimum-norm solution");
    }
    let model = weights.into_model(index.fingerprint(), index.areas().ids())?;
    write_atomic(&args.model, model.to_json()?.as_bytes())?;

    let mut config = RunConfig::new("train", &args.corpus, index);
    config.labels = Some(show(&args.labels));
    config.index = Some(show(&args.index));
    config.model = Some(show(&args.model));
    write_json(&sidecar(&args.model, ".run.json"), &config)?;

    println!(
        "beta = [{}, {}, {}] (sim', citingNum', citedNum'), trained on {} papers",
        model.beta[0], model.beta[1], model.beta[2], model.trained_on
    );
    Ok(())
}

fn classify(args: ClassifyArgs) -> Result<()> {
    let pipeline = load_pipeline(&args.corpus, &args.index, &args.config)?;
    let model = FusionModel::load(&args.model).with_context(|| format!("loading model {}", args.model.display()))?;
    let classifier = Classifier::new(pipeline.index(), pipeline.graph(), &model)?;
    let areas = pipeline.index().areas();

    let tmp = sidecar(&args.out, ".partial");
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file = std::fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "paper_id\tarea_id\tscore\ttie_broken")?;

    let queue: Vec<&Paper> = pipeline.non_seed_papers().collect();
    let mut unclassifiable = 0usize;
    for chunk in queue.chunks(CLASSIFY_CHUNK) {
        let results: Vec<_> = chunk.par_iter().map(|p| classifier.classify(p)).collect();
        for (paper, result) in chunk.iter().zip(results) {
            match result.outcome {
                Outcome::Classified { area, tie_broken } => {
                    writeln!(out, "{}\t{}\t{}\t{}", paper.id, areas[area].id, result.scores[area], tie_broken)?
                }
                Outcome::Unclassifiable => {
                    unclassifiable += 1;
                    writeln!(out, "{}\tUNCLASSIFIABLE\tNA\tfalse", paper.id)?
                }
            }
        }
    }
    out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    std::fs::rename(&tmp, &args.out).with_context(|| format!("moving {} into place", args.out.display()))?;

    let mut config = RunConfig::new("classify", &args.corpus, pipeline.index());
    config.index = Some(show(&args.index));
    config.model = Some(show(&args.model));
    write_json(&sidecar(&args.out, ".run.json"), &config)?;
    eprintln!("classified {} papers ({} unclassifiable)", queue.len(), unclassifiable);
    Ok(())
}

#[derive(Serialize)]
struct Report<'a, T> {
    config: RunConfig,
    #[serde(flatten)]
    result: &'a T,
}

fn eval_setup(
    args: &EvalArgs,
    command: &'static str,
) -> Result<(Pipeline, Vec<seedclass::eval::LabeledInstance>, RunConfig)> {
    let pipeline = load_pipeline(&args.corpus, &args.index, &args.config)?;
    let labels = read_labels_file(&args.labels, pipeline.index().areas())?;
    let instances = pipeline.labeled_instances(&labels)?;
    let mut config = RunConfig::new(command, &args.corpus, pipeline.index());
    config.labels = Some(show(&args.labels));
    config.index = Some(show(&args.index));
    config.seed = Some(args.seed);
    Ok((pipeline, instances, config))
}

fn evaluate(args: EvalArgs) -> Result<()> {
    let (pipeline, instances, config) = eval_setup(&args, "evaluate")?;
    let report = cross_validate(&instances, pipeline.index().areas(), args.seed, FeatureMask::ALL)?;
    let table = format_table(std::iter::once(&report));
    write_json(&args.out.join("evaluation.json"), &Report { config, result: &report })?;
    write_atomic(&args.out.join("evaluation.txt"), table.as_bytes())?;
    print!("{table}");
    Ok(())
}

fn ablate(args: EvalArgs) -> Result<()> {
    let (pipeline, instances, config) = eval_setup(&args, "ablate")?;
    let grid = ablation_grid(&instances, pipeline.index().areas(), args.seed)?;
    let table = grid.to_table();
    write_json(&args.out.join("ablation.json"), &Report { config, result: &grid })?;
    write_atomic(&args.out.join("ablation.txt"), table.as_bytes())?;
    print!("{table}");
    Ok(())
}

#[derive(Serialize)]
struct BenchRecord<'a> {
    seed: u64,
    config: &'a BenchmarkConfig,
}

fn bench_gen(args: BenchGenArgs) -> Result<()> {
    let mut config = match args.preset {
        Preset::Separable => BenchmarkConfig::separable(args.areas, args.seeds_per_area, args.tests_per_area),
        Preset::Complementary => BenchmarkConfig::complementary(args.areas, args.seeds_per_area, args.tests_per_area),
        Preset::Noise => BenchmarkConfig::noise(args.areas, args.seeds_per_area, args.tests_per_area),
    };
    if let Some(len) = args.doc_len {
        config.doc_len = len;
    }
    let bench = generate_synthetic_benchmark(&config, args.seed)?;

    let mut papers = Vec::new();
    write_papers(&bench.papers, &mut papers)?;
    let mut labels = Vec::new();
    write_labels(&bench.labels, bench.areas(), &mut labels)?;
    let out: &PathBuf = &args.out;
    write_atomic(&out.join("papers.jsonl"), &papers)?;
    write_atomic(&out.join("areas.json"), bench.venue_map.to_json()?.as_bytes())?;
    write_atomic(&out.join("labels.tsv"), &labels)?;
    write_json(&out.join("benchmark.json"), &BenchRecord { seed: args.seed, config: &config })?;
    eprintln!("wrote {} papers and {} labels to {}", bench.papers.len(), bench.labels.len(), out.display());
    Ok(())
}
