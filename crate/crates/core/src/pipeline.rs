//! Glue that holds a loaded corpus together with its index and graph.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::corpus::{build_seed_set, CitationGraph, Paper, SeedLookup, VenueMap};
use crate::error::{Error, Result};
use crate::eval::LabeledInstance;
use crate::features::FeatureExtractor;
use crate::index::{Bm25Params, SeedIndex};
use crate::text::TokenizerConfig;

/// A corpus, the seed index built over it, and its citation graph.
pub struct Pipeline {
    papers: Vec<Paper>,
    by_id: HashMap<String, usize>,
    index: SeedIndex,
    graph: CitationGraph,
}

impl Pipeline {
    /// Assigns seeds from `venue_map`, indexes them and builds the graph.
    pub fn build(
        papers: Vec<Paper>,
        venue_map: &VenueMap,
        params: Bm25Params,
        tokenizer: TokenizerConfig,
    ) -> Result<Self> {
        let seeds = build_seed_set(&papers, venue_map)?;
        let index = SeedIndex::build(&papers, &seeds, venue_map.areas(), params, tokenizer)?;
        Ok(Self::with_index(papers, index))
    }

    /// Uses a prebuilt index; seed membership comes from the index.
    pub fn with_index(papers: Vec<Paper>, index: SeedIndex) -> Self {
        let graph = CitationGraph::build(&papers);
        let mut by_id = HashMap::with_capacity(papers.len());
        for (i, p) in papers.iter().enumerate() {
            by_id.entry(p.id.clone()).or_insert(i);
        }
        Pipeline { papers, by_id, index, graph }
    }

    pub fn papers(&self) -> &[Paper] {
        &self.papers
    }

    pub fn paper(&self, id: &str) -> Option<&Paper> {
        self.by_id.get(id).map(|&i| &self.papers[i])
    }

    pub fn index(&self) -> &SeedIndex {
        &self.index
    }

    pub fn graph(&self) -> &CitationGraph {
        &self.graph
    }

    pub fn extractor(&self) -> FeatureExtractor<'_> {
        FeatureExtractor::new(&self.index, &self.graph)
    }

    pub fn is_seed(&self, id: &str) -> bool {
        self.index.seed_area(id).is_some()
    }

    /// Papers not in the seed set, in corpus order.
    pub fn non_seed_papers(&self) -> impl Iterator<Item = &Paper> {
        self.papers.iter().filter(|p| !self.is_seed(&p.id))
    }

    /// Extracts features for labeled papers, in label order. Every labeled
    /// id must be present in the corpus.
    pub fn labeled_instances(&self, labels: &[(String, usize)]) -> Result<Vec<LabeledInstance>> {
        let missing: Vec<String> =
            labels.iter().filter(|(id, _)| self.paper(id).is_none()).map(|(id, _)| id.clone()).collect();
        if !missing.is_empty() {
            return Err(Error::UnknownPapers(missing));
        }
        let extractor = self.extractor();
        Ok(labels
            .par_iter()
            .map(|(id, gold)| {
                let paper = self.paper(id).expect("checked above");
                LabeledInstance { id: id.clone(), gold: *gold, features: extractor.extract(paper) }
            })
            .collect())
    }
}
