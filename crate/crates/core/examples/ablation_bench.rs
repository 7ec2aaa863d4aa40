//! Runs the ablation grid on synthetic benchmarks with complementary signal.
//!
//! cargo run --release -p seedclass --example ablation_bench -- [draws]

use seedclass::eval::{ablation_grid, generate_synthetic_benchmark, BenchmarkConfig};
use seedclass::prelude::*;

fn main() -> seedclass::Result<()> {
    let draws: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let config = BenchmarkConfig::complementary(26, 200, 20);
    for seed in 0..draws {
        let bench = generate_synthetic_benchmark(&config, seed)?;
        let pipeline =
            Pipeline::build(bench.papers, &bench.venue_map, Bm25Params::default(), TokenizerConfig::default())?;
        let instances = pipeline.labeled_instances(&bench.labels)?;
        let report = ablation_grid(&instances, bench.venue_map.areas(), seed)?;
        println!("draw {seed}\n{}", report.to_table());
        for row in &report.rows {
            println!("  {:<24} beta {:?}", row.mask.to_string(), row.folds[0].beta);
        }
    }
    Ok(())
}
