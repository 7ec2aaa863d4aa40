//! Immutable BM25 inverted index over the seed papers.
//!
//! Per query term `t` and seed document `s` the contribution is
//!
//! ```text
//! idf(t) * f(t,s) * (k1 + 1) / (f(t,s) + k1 * (1 - b + b * |s| / avgdl))
//! idf(t) = ln(1 + (N - df(t) + 0.5) / (df(t) + 0.5))
//! ```
//!
//! The query is treated as a set of terms: a term repeated in the query
//! contributes once.

mod snapshot;

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{AreaSet, Paper, SeedLookup};
use crate::error::{Error, Result};
use crate::text::{tokenize, TokenizerConfig};

pub use snapshot::{SNAPSHOT_MAGIC, SNAPSHOT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub b: f64,
    pub k1: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { b: 0.75, k1: 1.2 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::InvalidParams(format!("b must lie in [0, 1], got {}", self.b)));
        }
        if !(self.k1.is_finite() && self.k1 >= 0.0) {
            return Err(Error::InvalidParams(format!("k1 must be finite and nonnegative, got {}", self.k1)));
        }
        Ok(())
    }
}

/// Inverse document frequency of a term seen in `doc_freq` of `corpus_size`
/// documents. Strictly positive for `doc_freq` in `0..=corpus_size`.
pub fn idf_value(corpus_size: usize, doc_freq: usize) -> f64 {
    let n = corpus_size as f64;
    let df = doc_freq as f64;
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

/// Hash of everything that changes feature values: BM25 parameters,
/// tokenizer settings and the ordered area list.
pub fn config_fingerprint(params: Bm25Params, tokenizer: TokenizerConfig, areas: &AreaSet) -> String {
    let mut h = Sha256::new();
    h.update(format!("b={:016x};k1={:016x};", params.b.to_bits(), params.k1.to_bits()));
    h.update(format!("stopwords={};", tokenizer.stopwords));
    for area in areas.iter() {
        h.update(area.id.as_bytes());
        h.update(b"\x1f");
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// Inverted index over seed papers with per-area membership.
#[derive(Debug, Clone)]
pub struct SeedIndex {
    params: Bm25Params,
    tokenizer: TokenizerConfig,
    areas: AreaSet,
    doc_ids: Vec<String>,
    doc_pos: HashMap<String, u32>,
    doc_len: Vec<u32>,
    area_of: Vec<u32>,
    area_sizes: Vec<u32>,
    terms: HashMap<String, u32>,
    /// Term strings in id order, which is lexicographic order.
    term_text: Vec<String>,
    postings: Vec<Vec<Posting>>,
    avg_doc_len: f64,
    /// `k1 * (1 - b + b * |s| / avgdl)` per document.
    length_norm: Vec<f64>,
}

impl SeedIndex {
    /// Indexes every paper in `papers` that `seeds` assigns to an area;
    /// other papers are skipped. Indexed text is title plus abstract.
    pub fn build(
        papers: &[Paper],
        seeds: &impl SeedLookup,
        areas: &AreaSet,
        params: Bm25Params,
        tokenizer: TokenizerConfig,
    ) -> Result<Self> {
        params.validate()?;
        let seed_docs: Vec<(&Paper, usize)> =
            papers.iter().filter_map(|p| seeds.seed_area(&p.id).map(|a| (p, a))).collect();
        if seed_docs.is_empty() {
            return Err(Error::EmptySeedSet);
        }
        if let Some(&(p, a)) = seed_docs.iter().find(|(_, a)| *a >= areas.len()) {
            return Err(Error::UnknownArea(format!("area index {a} for seed `{}`", p.id)));
        }

        // Tokenize in parallel; merge in document order so the result does
        // not depend on scheduling.
        let counted: Vec<(u32, Vec<(String, u32)>)> = seed_docs
            .par_iter()
            .map(|(paper, _)| {
                let tokens = tokenize(&paper.text(), tokenizer);
                let mut tf: HashMap<&str, u32> = HashMap::new();
                for t in &tokens {
                    *tf.entry(t.as_str()).or_insert(0) += 1;
                }
                let tf = tf.into_iter().map(|(t, c)| (t.to_string(), c)).collect();
                (tokens.len() as u32, tf)
            })
            .collect();

        let mut doc_ids = Vec::with_capacity(seed_docs.len());
        let mut doc_pos = HashMap::with_capacity(seed_docs.len());
        let mut doc_len = Vec::with_capacity(seed_docs.len());
        let mut area_of = Vec::with_capacity(seed_docs.len());
        let mut by_term: HashMap<String, Vec<Posting>> = HashMap::new();
        for ((paper, area), (len, tf)) in seed_docs.iter().zip(counted) {
            if doc_pos.contains_key(&paper.id) {
                continue;
            }
            let doc = doc_ids.len() as u32;
            doc_pos.insert(paper.id.clone(), doc);
            doc_ids.push(paper.id.clone());
            doc_len.push(len);
            area_of.push(*area as u32);
            for (term, count) in tf {
                by_term.entry(term).or_default().push(Posting { doc, tf: count });
            }
        }

        let mut term_list: Vec<(String, Vec<Posting>)> = by_term.into_iter().collect();
        term_list.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let (term_text, postings): (Vec<String>, Vec<Vec<Posting>>) = term_list.into_iter().unzip();

        Ok(Self::assemble(params, tokenizer, areas.clone(), doc_ids, doc_pos, doc_len, area_of, term_text, postings))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        params: Bm25Params,
        tokenizer: TokenizerConfig,
        areas: AreaSet,
        doc_ids: Vec<String>,
        doc_pos: HashMap<String, u32>,
        doc_len: Vec<u32>,
        area_of: Vec<u32>,
        term_text: Vec<String>,
        postings: Vec<Vec<Posting>>,
    ) -> Self {
        let mut area_sizes = vec![0u32; areas.len()];
        for &a in &area_of {
            area_sizes[a as usize] += 1;
        }
        let total: u64 = doc_len.iter().map(|&l| l as u64).sum();
        let avg_doc_len = total as f64 / doc_len.len() as f64;
        let length_norm = doc_len
            .iter()
            .map(|&len| {
                let ratio = if avg_doc_len > 0.0 { len as f64 / avg_doc_len } else { 1.0 };
                params.k1 * (1.0 - params.b + params.b * ratio)
            })
            .collect();
        let terms = term_text.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        SeedIndex {
            params,
            tokenizer,
            areas,
            doc_ids,
            doc_pos,
            doc_len,
            area_of,
            area_sizes,
            terms,
            term_text,
            postings,
            avg_doc_len,
            length_norm,
        }
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn tokenizer(&self) -> TokenizerConfig {
        self.tokenizer
    }

    pub fn areas(&self) -> &AreaSet {
        &self.areas
    }

    pub fn area_count(&self) -> usize {
        self.areas.len()
    }

    pub fn fingerprint(&self) -> String {
        config_fingerprint(self.params, self.tokenizer, &self.areas)
    }

    /// |C|, the number of seed documents.
    pub fn corpus_size(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.avg_doc_len
    }

    pub fn vocabulary_size(&self) -> usize {
        self.term_text.len()
    }

    pub fn doc_id(&self, doc: usize) -> &str {
        &self.doc_ids[doc]
    }

    pub fn doc_position(&self, id: &str) -> Option<usize> {
        self.doc_pos.get(id).map(|&d| d as usize)
    }

    pub fn doc_len(&self, doc: usize) -> u32 {
        self.doc_len[doc]
    }

    pub fn doc_area(&self, doc: usize) -> usize {
        self.area_of[doc] as usize
    }

    /// |C(a_k)| per area.
    pub fn area_sizes(&self) -> &[u32] {
        &self.area_sizes
    }

    /// Number of seed documents containing `term`; 0 for unseen terms.
    pub fn doc_freq(&self, term: &str) -> usize {
        self.terms.get(term).map_or(0, |&t| self.postings[t as usize].len())
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.terms.get(term).map_or(&[], |&t| &self.postings[t as usize])
    }

    /// Terms in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.term_text.iter().map(String::as_str)
    }

    pub fn idf(&self, term: &str) -> f64 {
        idf_value(self.corpus_size(), self.doc_freq(term))
    }

    /// Unique query term ids in lexicographic order. Terms absent from the
    /// index are omitted; they would contribute zero to every document.
    fn query_terms(&self, text: &str) -> Vec<u32> {
        let unique: BTreeSet<String> = tokenize(text, self.tokenizer).into_iter().collect();
        unique.iter().filter_map(|t| self.terms.get(t).copied()).collect()
    }

    fn for_each_contribution(&self, text: &str, mut f: impl FnMut(u32, f64)) {
        let k1p1 = self.params.k1 + 1.0;
        let n = self.corpus_size();
        for term in self.query_terms(text) {
            let list = &self.postings[term as usize];
            let idf = idf_value(n, list.len());
            for p in list {
                let tf = p.tf as f64;
                f(p.doc, idf * tf * k1p1 / (tf + self.length_norm[p.doc as usize]));
            }
        }
    }

    /// BM25 similarity of every seed document sharing at least one term with
    /// the query text, as `(doc position, score)` in ascending doc order.
    pub fn bm25_scores_text(&self, text: &str) -> Vec<(usize, f64)> {
        let mut dense = vec![0.0; self.corpus_size()];
        let mut touched = vec![false; self.corpus_size()];
        self.for_each_contribution(text, |doc, c| {
            dense[doc as usize] += c;
            touched[doc as usize] = true;
        });
        dense.into_iter().enumerate().filter(|(d, _)| touched[*d]).collect()
    }

    pub fn bm25_scores(&self, query: &Paper) -> Vec<(usize, f64)> {
        self.bm25_scores_text(&query.text())
    }

    /// Mean BM25 similarity between the query and the seeds of each area.
    /// Seeds without a shared term count as zero; empty areas yield zero.
    pub fn area_similarity_text(&self, text: &str) -> Vec<f64> {
        let mut sums = vec![0.0; self.area_count()];
        self.for_each_contribution(text, |doc, c| {
            sums[self.area_of[doc as usize] as usize] += c;
        });
        for (sum, &size) in sums.iter_mut().zip(&self.area_sizes) {
            *sum = if size == 0 { 0.0 } else { *sum / size as f64 };
        }
        sums
    }
}

impl SeedLookup for SeedIndex {
    fn seed_area(&self, paper_id: &str) -> Option<usize> {
        self.doc_pos.get(paper_id).map(|&d| self.area_of[d as usize] as usize)
    }
}
