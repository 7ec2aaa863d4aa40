//! Per-area feature vectors: mean content similarity, citations into each
//! area's seeds, and citations from each area's seeds, each normalized to
//! sum to one across areas.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{AreaSet, CitationGraph, Paper, SeedLookup};
use crate::error::{Error, Result};
use crate::index::SeedIndex;

/// The three fused features, in weight order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Feature {
    Sim,
    Citing,
    Cited,
}

impl Feature {
    pub const ALL: [Feature; 3] = [Feature::Sim, Feature::Citing, Feature::Cited];

    pub fn position(self) -> usize {
        match self {
            Feature::Sim => 0,
            Feature::Citing => 1,
            Feature::Cited => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Feature::Sim => "sim'",
            Feature::Citing => "citingNum'",
            Feature::Cited => "citedNum'",
        }
    }
}

/// Non-empty subset of the three features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureMask {
    pub sim: bool,
    pub citing: bool,
    pub cited: bool,
}

impl FeatureMask {
    pub const ALL: FeatureMask = FeatureMask { sim: true, citing: true, cited: true };

    pub fn new(sim: bool, citing: bool, cited: bool) -> Result<Self> {
        let mask = FeatureMask { sim, citing, cited };
        if mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(mask)
    }

    pub fn is_empty(&self) -> bool {
        !(self.sim || self.citing || self.cited)
    }

    pub fn contains(&self, feature: Feature) -> bool {
        match feature {
            Feature::Sim => self.sim,
            Feature::Citing => self.citing,
            Feature::Cited => self.cited,
        }
    }

    /// The seven non-empty masks: the three singles, the three pairs, then
    /// all three.
    pub fn ablation_rows() -> [FeatureMask; 7] {
        let m = |sim, citing, cited| FeatureMask { sim, citing, cited };
        [
            m(false, true, false),
            m(false, false, true),
            m(true, false, false),
            m(false, true, true),
            m(true, true, false),
            m(true, false, true),
            m(true, true, true),
        ]
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == FeatureMask::ALL {
            return f.write_str("All three features");
        }
        // citing, cited, sim: the order used in the ablation table labels
        let parts: Vec<&str> = [Feature::Citing, Feature::Cited, Feature::Sim]
            .into_iter()
            .filter(|&x| self.contains(x))
            .map(Feature::label)
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Divides each entry by the total. An all-zero input returns all zeros and
/// `true` for the degenerate flag.
pub fn normalize(raw: &[f64]) -> Result<(Vec<f64>, bool)> {
    if let Some((area, &value)) = raw.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::NegativeFeature { area, value });
    }
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        Ok((raw.iter().map(|v| v / total).collect(), false))
    } else {
        Ok((vec![0.0; raw.len()], true))
    }
}

/// Raw and normalized per-area features for one paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaFeatureVector {
    pub sim_raw: Vec<f64>,
    pub citing_raw: Vec<u32>,
    pub cited_raw: Vec<u32>,
    pub sim_norm: Vec<f64>,
    pub citing_norm: Vec<f64>,
    pub cited_norm: Vec<f64>,
    /// Set per feature (sim, citing, cited) when its raw vector is all zero.
    pub degenerate: [bool; 3],
}

impl AreaFeatureVector {
    pub fn from_raw(sim_raw: Vec<f64>, citing_raw: Vec<u32>, cited_raw: Vec<u32>) -> Result<Self> {
        let n = sim_raw.len();
        for len in [citing_raw.len(), cited_raw.len()] {
            if len != n {
                return Err(Error::AreaCountMismatch { expected: n, actual: len });
            }
        }
        let (sim_norm, d_sim) = normalize(&sim_raw)?;
        let (citing_norm, d_citing) = normalize(&citing_raw.iter().map(|&c| c as f64).collect::<Vec<_>>())?;
        let (cited_norm, d_cited) = normalize(&cited_raw.iter().map(|&c| c as f64).collect::<Vec<_>>())?;
        Ok(AreaFeatureVector {
            sim_raw,
            citing_raw,
            cited_raw,
            sim_norm,
            citing_norm,
            cited_norm,
            degenerate: [d_sim, d_citing, d_cited],
        })
    }

    /// Builds a vector directly from normalized arrays; raw arrays are left
    /// empty. Used for synthetic training data.
    pub fn from_normalized(sim_norm: Vec<f64>, citing_norm: Vec<f64>, cited_norm: Vec<f64>) -> Result<Self> {
        let n = sim_norm.len();
        for len in [citing_norm.len(), cited_norm.len()] {
            if len != n {
                return Err(Error::AreaCountMismatch { expected: n, actual: len });
            }
        }
        let flag = |v: &[f64]| v.iter().all(|&x| x == 0.0);
        let degenerate = [flag(&sim_norm), flag(&citing_norm), flag(&cited_norm)];
        Ok(AreaFeatureVector {
            sim_raw: Vec::new(),
            citing_raw: Vec::new(),
            cited_raw: Vec::new(),
            sim_norm,
            citing_norm,
            cited_norm,
            degenerate,
        })
    }

    pub fn area_count(&self) -> usize {
        self.sim_norm.len()
    }

    pub fn normalized(&self, feature: Feature) -> &[f64] {
        match feature {
            Feature::Sim => &self.sim_norm,
            Feature::Citing => &self.citing_norm,
            Feature::Cited => &self.cited_norm,
        }
    }

    pub fn is_degenerate(&self, feature: Feature) -> bool {
        self.degenerate[feature.position()]
    }

    /// The design row `(sim', citing', cited')` for one area.
    pub fn row(&self, area: usize) -> [f64; 3] {
        [self.sim_norm[area], self.citing_norm[area], self.cited_norm[area]]
    }

    /// Zeroes the features outside `mask` and flags them degenerate.
    pub fn masked(&self, mask: FeatureMask) -> Self {
        let mut out = self.clone();
        for feature in Feature::ALL {
            if !mask.contains(feature) {
                let norm = match feature {
                    Feature::Sim => &mut out.sim_norm,
                    Feature::Citing => &mut out.citing_norm,
                    Feature::Cited => &mut out.cited_norm,
                };
                norm.iter_mut().for_each(|v| *v = 0.0);
                out.degenerate[feature.position()] = true;
            }
        }
        out
    }
}

/// Mean BM25 similarity between `paper` and each area's seeds.
pub fn area_similarity(paper: &Paper, index: &SeedIndex) -> Vec<f64> {
    index.area_similarity_text(&paper.text())
}

/// Counts, per area, the seeds that `paper_id` cites and the seeds that
/// cite it. Non-seed neighbors are ignored.
pub fn citation_counts(
    paper_id: &str,
    graph: &CitationGraph,
    seeds: &impl SeedLookup,
    n_areas: usize,
) -> (Vec<u32>, Vec<u32>) {
    let mut citing = vec![0u32; n_areas];
    let mut cited = vec![0u32; n_areas];
    for target in graph.outgoing(paper_id) {
        if let Some(area) = seeds.seed_area(target) {
            citing[area] += 1;
        }
    }
    for source in graph.incoming(paper_id) {
        if let Some(area) = seeds.seed_area(source) {
            cited[area] += 1;
        }
    }
    (citing, cited)
}

/// Computes feature vectors against a fixed index and citation graph.
#[derive(Clone, Copy)]
pub struct FeatureExtractor<'a> {
    index: &'a SeedIndex,
    graph: &'a CitationGraph,
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(index: &'a SeedIndex, graph: &'a CitationGraph) -> Self {
        Self { index, graph }
    }

    pub fn index(&self) -> &'a SeedIndex {
        self.index
    }

    pub fn extract(&self, paper: &Paper) -> AreaFeatureVector {
        let sim = area_similarity(paper, self.index);
        let (citing, cited) = citation_counts(&paper.id, self.graph, self.index, self.index.area_count());
        AreaFeatureVector::from_raw(sim, citing, cited).expect("BM25 similarities are finite and nonnegative")
    }
}

/// Writes one CSV row per (paper, area):
/// `paper_id,area_id,sim_norm,citing_norm,cited_norm,gold`.
pub fn write_feature_dump<'a, W, I>(rows: I, areas: &AreaSet, out: W) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a AreaFeatureVector, usize)>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["paper_id", "area_id", "sim_norm", "citing_norm", "cited_norm", "gold"])?;
    for (id, features, gold) in rows {
        for area in areas.iter() {
            let k = area.index;
            w.write_record([
                id.to_string(),
                area.id.clone(),
                features.sim_norm[k].to_string(),
                features.citing_norm[k].to_string(),
                features.cited_norm[k].to_string(),
                u8::from(k == gold).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
