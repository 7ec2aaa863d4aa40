use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use seedclass::corpus::{read_labels_file, read_papers_file, RecordSchema, VenueMap};
use seedclass::fusion::{train_weights, Classifier, FusionModel};
use seedclass::index::Bm25Params;
use seedclass::pipeline::Pipeline;
use seedclass::text::TokenizerConfig;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/three_area").join(name)
}

fn seedclass(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seedclass")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = seedclass(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn build_fixture_index(dir: &Path) {
    ok(
        dir,
        &[
            "build-index",
            "--papers",
            p(&fixture("papers.jsonl")),
            "--venue-map",
            p(&fixture("areas.json")),
            "--index",
            "idx.bin",
        ],
    );
}

#[test]
fn build_report_lists_seeds_per_area() {
    let tmp = tempfile::tempdir().unwrap();
    build_fixture_index(tmp.path());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("idx.bin.report.json")).unwrap()).unwrap();
    assert_eq!(report["seeds"], 9);
    assert_eq!(report["papers_read"], 12);
    let per_area: Vec<u64> =
        report["seeds_per_area"].as_array().unwrap().iter().map(|a| a["seeds"].as_u64().unwrap()).collect();
    assert_eq!(per_area, vec![3, 3, 3]);
    assert_eq!(report["config"]["b"], 0.75);
    assert_eq!(report["config"]["stopwords"], true);
}

#[test]
fn rebuilding_gives_an_identical_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    build_fixture_index(tmp.path());
    let first = fs::read(tmp.path().join("idx.bin")).unwrap();
    build_fixture_index(tmp.path());
    assert_eq!(first, fs::read(tmp.path().join("idx.bin")).unwrap());
}

#[test]
fn empty_corpus_fails_with_empty_seed_set() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("empty.jsonl"), "").unwrap();
    let out = seedclass(tmp.path(), &["build-index", "--papers", "empty.jsonl", "--index", "idx.bin"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("empty seed set"));
    assert!(!tmp.path().join("idx.bin").exists());
}

#[test]
fn missing_input_file_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = seedclass(tmp.path(), &["build-index", "--papers", "nope.jsonl", "--index", "idx.bin"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("nope.jsonl"));
}

#[test]
fn train_matches_library_fit() {
    let tmp = tempfile::tempdir().unwrap();
    build_fixture_index(tmp.path());
    ok(
        tmp.path(),
        &[
            "train",
            "--papers",
            p(&fixture("papers.jsonl")),
            "--index",
            "idx.bin",
            "--labels",
            p(&fixture("labels.tsv")),
            "--model",
            "m.json",
        ],
    );
    let model = FusionModel::load(tmp.path().join("m.json")).unwrap();

    let map = VenueMap::load(fixture("areas.json")).unwrap();
    let papers = read_papers_file(fixture("papers.jsonl"), RecordSchema::Native).unwrap().papers;
    let pipeline = Pipeline::build(papers, &map, Bm25Params::default(), TokenizerConfig::default()).unwrap();
    let labels = read_labels_file(fixture("labels.tsv"), pipeline.index().areas()).unwrap();
    let inst = pipeline.labeled_instances(&labels).unwrap();
    let w = train_weights(inst.iter().map(|i| (&i.features, i.gold))).unwrap();
    assert_eq!(model.beta, w.beta);
    assert_eq!(model.trained_on, 3);
    assert_eq!(model.config_fingerprint, pipeline.index().fingerprint());
}

#[test]
fn train_rejects_unknown_paper_ids() {
    let tmp = tempfile::tempdir().unwrap();
    build_fixture_index(tmp.path());
    fs::write(tmp.path().join("labels.tsv"), "t1\tdatabases\nghost-1\tdatabases\nghost-2\tcryptography\n").unwrap();
    let out = seedclass(
        tmp.path(),
        &[
            "train",
            "--papers",
            p(&fixture("papers.jsonl")),
            "--index",
            "idx.bin",
            "--labels",
            "labels.tsv",
            "--model",
            "m.json",
        ],
    );
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("ghost-1") && err.contains("ghost-2"), "{err}");
    assert!(!tmp.path().join("m.json").exists());
}

#[test]
fn conflicting_index_settings_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    build_fixture_index(tmp.path());
    let (papers, labels) = (fixture("papers.jsonl"), fixture("labels.tsv"));
    for extra in [["--k1", "2.0"], ["--b", "0.3"]] {
        let mut args =
            vec!["train", "--papers", p(&papers), "--index", "idx.bin", "--labels", p(&labels), "--model", "m.json"];
        args.extend(extra);
        let out = seedclass(tmp.path(), &args);
        assert!(!out.status.success());
        assert!(stderr(&out).contains("does not match"));
    }
    let out = seedclass(
        tmp.path(),
        &[
            "train",
            "--papers",
            p(&papers),
            "--index",
            "idx.bin",
            "--labels",
            p(&labels),
            "--model",
            "m.json",
            "--no-stopwords",
        ],
    );
    assert!(!out.status.success());
}

#[test]
fn classify_rejects_model_from_other_configuration() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        tmp.path(),
        &[
            "build-index",
            "--papers",
            p(&fixture("papers.jsonl")),
            "--venue-map",
            p(&fixture("areas.json")),
            "--index",
            "idx.bin",
            "--b",
            "0.5",
        ],
    );
    let out = seedclass(
        tmp.path(),
        &[
            "classify",
            "--papers",
            p(&fixture("papers.jsonl")),
            "--index",
            "idx.bin",
            "--model",
            p(&fixture("model.json")),
            "--out",
            "pred.tsv",
        ],
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("fingerprint"));
    assert!(!tmp.path().join("pred.tsv").exists());
}

#[test]
fn classify_matches_library_and_marks_unclassifiable() {
    let tmp = tempfile::tempdir().unwrap();
    let mut papers = fs::read_to_string(fixture("papers.jsonl")).unwrap();
    papers.push_str("{\"id\":\"blank\",\"title\":\"zzz\",\"venue\":\"Nowhere\",\"year\":2020,\"references\":[]}\n");
    fs::write(tmp.path().join("papers.jsonl"), &papers).unwrap();
    ok(
        tmp.path(),
        &["build-index", "--papers", "papers.jsonl", "--venue-map", p(&fixture("areas.json")), "--index", "idx.bin"],
    );
    ok(
        tmp.path(),
        &[
            "classify",
            "--papers",
            "papers.jsonl",
            "--index",
            "idx.bin",
            "--model",
            p(&fixture("model.json")),
            "--out",
            "pred.tsv",
        ],
    );
    let tsv = fs::read_to_string(tmp.path().join("pred.tsv")).unwrap();
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines[0], "paper_id\tarea_id\tscore\ttie_broken");
    assert_eq!(lines.last().unwrap(), &"blank\tUNCLASSIFIABLE\tNA\tfalse");

    let map = VenueMap::load(fixture("areas.json")).unwrap();
    let corpus = read_papers_file(tmp.path().join("papers.jsonl"), RecordSchema::Native).unwrap().papers;
    let pipeline = Pipeline::build(corpus, &map, Bm25Params::default(), TokenizerConfig::default()).unwrap();
    let model = FusionModel::load(fixture("model.json")).unwrap();
    let classifier = Classifier::new(pipeline.index(), pipeline.graph(), &model).unwrap();
    let ids: Vec<&str> = pipeline.non_seed_papers().map(|p| p.id.as_str()).collect();
    assert_eq!(ids.len(), lines.len() - 1);
    for (line, paper) in lines[1..].iter().zip(pipeline.non_seed_papers()) {
        let r = classifier.classify(paper);
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols[0], paper.id);
        match r.predicted() {
            Some(a) => {
                assert_eq!(cols[1], pipeline.index().areas()[a].id);
                assert_eq!(cols[2].parse::<f64>().unwrap(), r.scores[a]);
            }
            None => assert_eq!(cols[1], "UNCLASSIFIABLE"),
        }
    }

    let run: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("pred.tsv.run.json")).unwrap()).unwrap();
    assert_eq!(run["command"], "classify");
    assert!(run.get("threads").is_none());
}

fn separable_bench(dir: &Path) {
    ok(
        dir,
        &[
            "bench-gen",
            "--out",
            "bench",
            "--preset",
            "separable",
            "--areas",
            "4",
            "--seeds-per-area",
            "10",
            "--tests-per-area",
            "6",
            "--seed",
            "3",
        ],
    );
    ok(
        dir,
        &["build-index", "--papers", "bench/papers.jsonl", "--venue-map", "bench/areas.json", "--index", "idx.bin"],
    );
}

#[test]
fn evaluate_on_separable_benchmark_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    separable_bench(tmp.path());
    let out = ok(
        tmp.path(),
        &[
            "evaluate",
            "--papers",
            "bench/papers.jsonl",
            "--index",
            "idx.bin",
            "--labels",
            "bench/labels.tsv",
            "--out",
            "eval",
            "--seed",
            "7",
        ],
    );
    let table = fs::read_to_string(tmp.path().join("eval/evaluation.txt")).unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), table);
    assert!(table.lines().nth(1).unwrap().contains("1.000"), "{table}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("eval/evaluation.json")).unwrap()).unwrap();
    assert_eq!(report["accuracy"], 1.0);
    assert_eq!(report["config"]["seed"], 7);
}

#[test]
fn ablate_writes_seven_rows_and_repeats_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    separable_bench(tmp.path());
    let args = [
        "ablate",
        "--papers",
        "bench/papers.jsonl",
        "--index",
        "idx.bin",
        "--labels",
        "bench/labels.tsv",
        "--out",
        "ab",
        "--seed",
        "7",
    ];
    ok(tmp.path(), &args);
    let first = fs::read(tmp.path().join("ab/ablation.json")).unwrap();
    let table = fs::read_to_string(tmp.path().join("ab/ablation.txt")).unwrap();
    assert_eq!(table.lines().count(), 8);
    assert!(table.lines().last().unwrap().starts_with("All three features"));
    ok(tmp.path(), &args);
    assert_eq!(first, fs::read(tmp.path().join("ab/ablation.json")).unwrap());
}

#[test]
fn evaluate_names_area_with_too_few_labels() {
    let tmp = tempfile::tempdir().unwrap();
    build_fixture_index(tmp.path());
    let out = seedclass(
        tmp.path(),
        &[
            "evaluate",
            "--papers",
            p(&fixture("papers.jsonl")),
            "--index",
            "idx.bin",
            "--labels",
            p(&fixture("labels.tsv")),
            "--out",
            "eval",
        ],
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("computer-vision"));
    assert!(!tmp.path().join("eval/evaluation.json").exists());
}

#[test]
fn bench_gen_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let args =
        ["bench-gen", "--out", "b", "--areas", "3", "--seeds-per-area", "5", "--tests-per-area", "2", "--seed", "1"];
    ok(tmp.path(), &args);
    let first = fs::read(tmp.path().join("b/papers.jsonl")).unwrap();
    ok(tmp.path(), &args);
    assert_eq!(first, fs::read(tmp.path().join("b/papers.jsonl")).unwrap());
    let labels = fs::read_to_string(tmp.path().join("b/labels.tsv")).unwrap();
    assert_eq!(labels.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn zero_threads_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = seedclass(tmp.path(), &["bench-gen", "--out", "b", "--threads", "0"]);
    assert!(!out.status.success());
}
