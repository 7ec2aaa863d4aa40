//! Metrics, cross-validation, ablations and synthetic benchmarks.

mod bench;
mod cv;
mod metrics;

pub use bench::{generate_synthetic_benchmark, Benchmark, BenchmarkConfig, SignalSplit};
pub use cv::{
    ablation_grid, cross_validate, format_table, stratified_folds, AblationReport, CrossValidationReport, FoldReport,
    LabeledInstance, FOLDS,
};
pub use metrics::{score_predictions, AreaMetrics, EvalReport};
