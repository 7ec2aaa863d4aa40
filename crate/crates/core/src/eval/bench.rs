//! Synthetic corpora with planted text and citation signal.
//!
//! Every area owns a private vocabulary; a shared noise vocabulary is mixed
//! into all documents. Seed papers are published in one venue per area.
//! Test papers draw a fraction of their tokens from their gold area's
//! vocabulary and cite / are cited by seeds of their gold area at
//! configurable rates; the remaining citations go to uniformly random areas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{AreaSet, Paper, VenueMap};
use crate::error::{Error, Result};

/// Which test papers carry which signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalSplit {
    /// Every test paper carries text and citation signal.
    Uniform,
    /// The first half of the areas carries only text signal, the second
    /// half only citation signal.
    Complementary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub n_areas: usize,
    pub seeds_per_area: usize,
    pub tests_per_area: usize,
    pub vocab_per_area: usize,
    pub noise_vocab: usize,
    /// Tokens per generated document.
    pub doc_len: usize,
    /// Fraction of a seed's tokens drawn from its area vocabulary.
    pub seed_purity: f64,
    /// Chance that an area-vocabulary draw for a seed lands in another
    /// area's vocabulary instead.
    pub vocab_overlap: f64,
    /// Fraction of a test paper's tokens drawn from its gold vocabulary.
    pub text_signal: f64,
    /// Seeds each test paper cites.
    pub refs_out: usize,
    /// Seeds citing each test paper.
    pub refs_in: usize,
    /// Chance that one outgoing citation targets the gold area.
    pub citing_rate: f64,
    /// Chance that one incoming citation comes from the gold area.
    pub cited_rate: f64,
    pub split: SignalSplit,
}

impl BenchmarkConfig {
    /// Disjoint vocabularies and citations that only touch the gold area.
    pub fn separable(n_areas: usize, seeds_per_area: usize, tests_per_area: usize) -> Self {
        BenchmarkConfig {
            n_areas,
            seeds_per_area,
            tests_per_area,
            vocab_per_area: 50,
            noise_vocab: 500,
            doc_len: 30,
            seed_purity: 1.0,
            vocab_overlap: 0.0,
            text_signal: 1.0,
            refs_out: 3,
            refs_in: 2,
            citing_rate: 1.0,
            cited_rate: 1.0,
            split: SignalSplit::Uniform,
        }
    }

    /// Text signal for half the areas, citation signal for the other half.
    pub fn complementary(n_areas: usize, seeds_per_area: usize, tests_per_area: usize) -> Self {
        BenchmarkConfig {
            n_areas,
            seeds_per_area,
            tests_per_area,
            vocab_per_area: 200,
            noise_vocab: 2000,
            doc_len: 100,
            seed_purity: 0.5,
            vocab_overlap: 0.1,
            text_signal: 0.3,
            refs_out: 6,
            refs_in: 4,
            citing_rate: 0.6,
            cited_rate: 0.6,
            split: SignalSplit::Complementary,
        }
    }

    /// No planted signal at all: noise text and uniformly random citations.
    pub fn noise(n_areas: usize, seeds_per_area: usize, tests_per_area: usize) -> Self {
        BenchmarkConfig {
            text_signal: 0.0,
            citing_rate: 0.0,
            cited_rate: 0.0,
            split: SignalSplit::Uniform,
            ..Self::complementary(n_areas, seeds_per_area, tests_per_area)
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidBenchmark(m.to_string()));
        if self.n_areas == 0 || self.seeds_per_area == 0 || self.tests_per_area == 0 {
            return fail("area, seed and test counts must be at least 1");
        }
        if self.vocab_per_area == 0 || self.noise_vocab == 0 || self.doc_len == 0 {
            return fail("vocabulary sizes and document length must be at least 1");
        }
        for (name, p) in [
            ("seed_purity", self.seed_purity),
            ("vocab_overlap", self.vocab_overlap),
            ("text_signal", self.text_signal),
            ("citing_rate", self.citing_rate),
            ("cited_rate", self.cited_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidBenchmark(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }

    /// Whether test papers of `area` carry text / citation signal.
    pub fn signal_for(&self, area: usize) -> (bool, bool) {
        match self.split {
            SignalSplit::Uniform => (true, true),
            SignalSplit::Complementary => {
                let text_half = area < self.n_areas / 2;
                (text_half, !text_half)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub venue_map: VenueMap,
    /// Seeds first (area by area), then test papers.
    pub papers: Vec<Paper>,
    pub labels: Vec<(String, usize)>,
}

impl Benchmark {
    pub fn areas(&self) -> &AreaSet {
        self.venue_map.areas()
    }
}

fn area_token(area: usize, word: usize) -> String {
    format!("a{area}w{word}")
}

fn noise_token(word: usize) -> String {
    format!("n{word}")
}

fn split_text(tokens: Vec<String>) -> (String, String) {
    let cut = tokens.len().min(8);
    (tokens[..cut].join(" "), tokens[cut..].join(" "))
}

fn push_unique(list: &mut Vec<String>, id: &str) {
    if !list.iter().any(|r| r == id) {
        list.push(id.to_string());
    }
}

/// Generates a benchmark; identical config and seed give identical output.
pub fn generate_synthetic_benchmark(config: &BenchmarkConfig, seed: u64) -> Result<Benchmark> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.n_areas;

    let width = n.to_string().len().max(2);
    let area_ids: Vec<String> = (0..n).map(|k| format!("area-{k:0width$}")).collect();
    let map_json = serde_json::json!({
        "areas": area_ids.iter().enumerate().map(|(k, id)| serde_json::json!({
            "id": id,
            "name": format!("Synthetic area {k}"),
            "venues": [format!("Venue {k}")],
        })).collect::<Vec<_>>()
    });
    let venue_map = VenueMap::from_json(&map_json.to_string())?;

    let mut papers = Vec::with_capacity(n * (config.seeds_per_area + config.tests_per_area));
    for area in 0..n {
        for i in 0..config.seeds_per_area {
            let tokens = (0..config.doc_len)
                .map(|_| {
                    if rng.random_bool(config.seed_purity) {
                        let src = if n > 1 && rng.random_bool(config.vocab_overlap) {
                            (area + rng.random_range(1..n)) % n
                        } else {
                            area
                        };
                        area_token(src, rng.random_range(0..config.vocab_per_area))
                    } else {
                        noise_token(rng.random_range(0..config.noise_vocab))
                    }
                })
                .collect();
            let (title, abstract_text) = split_text(tokens);
            papers.push(Paper {
                id: format!("seed-{area}-{i}"),
                title,
                abstract_text,
                venue: format!("Venue {area}"),
                year: 2000 + (i % 20) as i32,
                references: Vec::new(),
            });
        }
    }

    let seed_index = |area: usize, i: usize| area * config.seeds_per_area + i;
    let mut labels = Vec::with_capacity(n * config.tests_per_area);
    for area in 0..n {
        let (text_signal, citation_signal) = config.signal_for(area);
        let text_rate = if text_signal { config.text_signal } else { 0.0 };
        let (citing_rate, cited_rate) =
            if citation_signal { (config.citing_rate, config.cited_rate) } else { (0.0, 0.0) };

        for i in 0..config.tests_per_area {
            let id = format!("test-{area}-{i}");
            let tokens = (0..config.doc_len)
                .map(|_| {
                    if rng.random_bool(text_rate) {
                        area_token(area, rng.random_range(0..config.vocab_per_area))
                    } else {
                        noise_token(rng.random_range(0..config.noise_vocab))
                    }
                })
                .collect();
            let (title, abstract_text) = split_text(tokens);

            let pick_seed = |rng: &mut ChaCha8Rng, rate: f64| {
                let target = if rng.random_bool(rate) { area } else { rng.random_range(0..n) };
                seed_index(target, rng.random_range(0..config.seeds_per_area))
            };
            let mut references = Vec::new();
            for _ in 0..config.refs_out {
                let s = pick_seed(&mut rng, citing_rate);
                push_unique(&mut references, &papers[s].id);
            }
            for _ in 0..config.refs_in {
                let s = pick_seed(&mut rng, cited_rate);
                push_unique(&mut papers[s].references, &id);
            }

            papers.push(Paper {
                id: id.clone(),
                title,
                abstract_text,
                venue: "Synthetic Workshop".to_string(),
                year: 2020,
                references,
            });
            labels.push((id, area));
        }
    }

    Ok(Benchmark { venue_map, papers, labels })
}
