//! Brute-force reference implementations used as test oracles. None of
//! these touch the inverted index or the library's solvers.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use seedclass::corpus::{AreaSet, Paper};

pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;

/// Whitespace-separated tokens; corpora in the tests are already clean.
pub fn words(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

pub fn paper(id: &str, text: &str, venue: &str, refs: &[&str]) -> Paper {
    Paper {
        id: id.to_string(),
        title: text.to_string(),
        abstract_text: String::new(),
        venue: venue.to_string(),
        year: 2000,
        references: refs.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn areas(n: usize) -> AreaSet {
    AreaSet::new((0..n).map(|i| (format!("area{i}"), format!("Area {i}")))).unwrap()
}

/// Full-scan BM25 of `query` against every document, straight from the
/// formula: no postings, no precomputed statistics.
pub fn brute_force_bm25(docs: &[Vec<&str>], query: &[&str], k1: f64, b: f64) -> Vec<f64> {
    let n = docs.len() as f64;
    let avgdl = docs.iter().map(|d| d.len()).sum::<usize>() as f64 / n;
    let unique: HashSet<&str> = query.iter().copied().collect();
    docs.iter()
        .map(|doc| {
            let mut score = 0.0;
            for term in &unique {
                let f = doc.iter().filter(|t| *t == term).count() as f64;
                if f == 0.0 {
                    continue;
                }
                let df = docs.iter().filter(|d| d.contains(term)).count() as f64;
                let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                score += idf * f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * doc.len() as f64 / avgdl));
            }
            score
        })
        .collect()
}

/// Per-area mean of brute-force pairwise similarities.
pub fn brute_force_area_similarity(docs: &[Vec<&str>], doc_area: &[usize], n_areas: usize, query: &[&str]) -> Vec<f64> {
    let scores = brute_force_bm25(docs, query, K1, B);
    let mut sums = vec![0.0; n_areas];
    let mut sizes = vec![0usize; n_areas];
    for (s, &a) in scores.iter().zip(doc_area) {
        sums[a] += s;
        sizes[a] += 1;
    }
    sums.iter().zip(&sizes).map(|(s, &n)| if n == 0 { 0.0 } else { s / n as f64 }).collect()
}

/// Inverts an edge list by scanning every (source, reference) pair.
pub fn brute_force_incoming(papers: &[Paper]) -> HashMap<String, Vec<String>> {
    let ids: HashSet<&str> = papers.iter().map(|p| p.id.as_str()).collect();
    let mut incoming: HashMap<String, Vec<String>> = papers.iter().map(|p| (p.id.clone(), Vec::new())).collect();
    for target in papers {
        for source in papers {
            if source.id != target.id
                && ids.contains(target.id.as_str())
                && source.references.iter().any(|r| r == &target.id)
            {
                incoming.get_mut(&target.id).unwrap().push(source.id.clone());
            }
        }
    }
    incoming
}

/// Double loop over all edges.
pub fn brute_force_citation_counts(
    papers: &[Paper],
    seeds: &HashMap<String, usize>,
    n_areas: usize,
    p: &str,
) -> (Vec<u32>, Vec<u32>) {
    let mut citing = vec![0; n_areas];
    let mut cited = vec![0; n_areas];
    let ids: HashSet<&str> = papers.iter().map(|x| x.id.as_str()).collect();
    for source in papers {
        let refs: HashSet<&str> = source.references.iter().map(String::as_str).collect();
        for target in refs {
            if target == source.id || !ids.contains(target) {
                continue;
            }
            if source.id == p {
                if let Some(&a) = seeds.get(target) {
                    citing[a] += 1;
                }
            }
            if target == p {
                if let Some(&a) = seeds.get(&source.id) {
                    cited[a] += 1;
                }
            }
        }
    }
    (citing, cited)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Least squares via the normal equations, solved with Cramer's rule.
pub fn cramer_least_squares(rows: &[([f64; 3], f64)]) -> [f64; 3] {
    let mut g = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for (x, y) in rows {
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] += x[i] * x[j];
            }
            r[i] += x[i] * y;
        }
    }
    let d = det3(g);
    let mut beta = [0.0; 3];
    for (k, slot) in beta.iter_mut().enumerate() {
        let mut m = g;
        for i in 0..3 {
            m[i][k] = r[i];
        }
        *slot = det3(m) / d;
    }
    beta
}

pub fn squared_error(rows: &[([f64; 3], f64)], beta: [f64; 3]) -> f64 {
    rows.iter()
        .map(|(x, y)| {
            let p = x[0] * beta[0] + x[1] * beta[1] + x[2] * beta[2];
            (p - y) * (p - y)
        })
        .sum()
}

pub fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale == 0.0 || (a - b).abs() <= tol * scale
}
