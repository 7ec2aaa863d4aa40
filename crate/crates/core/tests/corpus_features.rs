mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use seedclass::corpus::{build_seed_set, ingest_papers, write_papers, CitationGraph, Paper, RecordSchema, VenueMap};
use seedclass::features::{citation_counts, normalize, AreaFeatureVector};

use common::*;

/// Random corpus of up to 20 papers with references among themselves and a
/// few dangling ones.
fn graph_corpus() -> impl Strategy<Value = Vec<Paper>> {
    (2usize..=20).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(0..n + 3, 0..8), n).prop_map(move |refs| {
            refs.into_iter()
                .enumerate()
                .map(|(i, r)| {
                    let refs: Vec<String> = r.into_iter().map(|j| format!("p{j}")).collect();
                    let refs: Vec<&str> = refs.iter().map(String::as_str).collect();
                    paper(&format!("p{i}"), "t", "", &refs)
                })
                .collect()
        })
    })
}

fn text_strategy() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 ,.\\-éü]{0,40}"
}

proptest! {
    #[test]
    fn incoming_matches_brute_force_inversion(papers in graph_corpus()) {
        let g = CitationGraph::build(&papers);
        let expected = brute_force_incoming(&papers);
        for p in &papers {
            let mut got: Vec<&str> = g.incoming(&p.id).collect();
            got.sort();
            let mut want: Vec<&str> = expected[&p.id].iter().map(String::as_str).collect();
            want.sort();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn edge_count_is_conserved(papers in graph_corpus()) {
        let g = CitationGraph::build(&papers);
        let out: usize = papers.iter().map(|p| g.outgoing(&p.id).count()).sum();
        let inc: usize = papers.iter().map(|p| g.incoming(&p.id).count()).sum();
        prop_assert_eq!(out, inc);
        prop_assert_eq!(out, g.edge_count());
    }

    #[test]
    fn citation_counts_match_edge_scan(papers in graph_corpus(), assign in prop::collection::vec(prop::option::of(0usize..4), 20)) {
        let seeds: HashMap<String, usize> = papers
            .iter()
            .zip(&assign)
            .filter_map(|(p, a)| a.map(|a| (p.id.clone(), a)))
            .collect();
        let g = CitationGraph::build(&papers);
        for p in &papers {
            let got = citation_counts(&p.id, &g, &seeds, 4);
            let want = brute_force_citation_counts(&papers, &seeds, 4, &p.id);
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn ingest_roundtrips_native_records(
        records in prop::collection::vec((text_strategy(), text_strategy(), text_strategy(), -3000i32..3000, prop::collection::vec("[a-z]{1,4}", 0..5)), 0..10)
    ) {
        let papers: Vec<Paper> = records
            .into_iter()
            .enumerate()
            .filter(|(_, (title, ..))| !title.trim().is_empty())
            .map(|(i, (title, abstract_text, venue, year, refs))| {
                let id = format!("id{i}");
                let mut seen = std::collections::HashSet::new();
                let references = refs.into_iter().filter(|r| r != &id && seen.insert(r.clone())).collect();
                Paper { id, title, abstract_text, venue, year, references }
            })
            .collect();
        let mut buf = Vec::new();
        write_papers(&papers, &mut buf).unwrap();
        let back = ingest_papers(buf.as_slice(), RecordSchema::Native).unwrap();
        prop_assert!(back.errors.is_empty());
        prop_assert_eq!(back.papers, papers);
    }

    #[test]
    fn normalized_vectors_sum_to_one_or_are_flagged(raw in prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1e6], 1..30)) {
        let (v, degenerate) = normalize(&raw).unwrap();
        prop_assert!(v.iter().all(|&x| x >= 0.0));
        if degenerate {
            prop_assert!(v.iter().all(|&x| x == 0.0));
        } else {
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn normalize_is_scale_invariant(raw in prop::collection::vec(0.0f64..1e3, 1..30), c in 1e-3f64..1e3) {
        let (a, da) = normalize(&raw).unwrap();
        let scaled: Vec<f64> = raw.iter().map(|x| x * c).collect();
        let (b, db) = normalize(&scaled).unwrap();
        prop_assert_eq!(da, db);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn normalize_is_permutation_equivariant(raw in prop::collection::vec(0.0f64..1e3, 1..30).prop_shuffle().prop_flat_map(|v| {
        let n = v.len();
        (Just(v), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })) {
        let (raw, perm) = raw;
        let (a, _) = normalize(&raw).unwrap();
        let permuted: Vec<f64> = perm.iter().map(|&i| raw[i]).collect();
        let (b, _) = normalize(&permuted).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((b[k] - a[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn seed_assignment_is_a_function(venues in prop::collection::vec(prop_oneof![Just("CVPR"), Just("cvpr "), Just("SIGMOD"), Just("Nowhere"), Just("  Very  Large Data Bases")], 1..30)) {
        let map = VenueMap::default_map();
        let papers: Vec<Paper> = venues.iter().enumerate().map(|(i, v)| paper(&format!("p{i}"), "t", v, &[])).collect();
        let seeds = build_seed_set(&papers, &map).unwrap();
        for p in &papers {
            use seedclass::corpus::SeedLookup;
            prop_assert_eq!(seeds.seed_area(&p.id), map.lookup(&p.venue));
        }
        prop_assert_eq!(seeds.counts().iter().sum::<usize>(), seeds.len());
    }
}

#[test]
fn feature_vector_invariants_hold_for_mixed_inputs() {
    let f = AreaFeatureVector::from_raw(vec![0.0, 2.0, 6.0], vec![0, 0, 0], vec![1, 1, 2]).unwrap();
    assert_eq!(f.sim_norm, vec![0.0, 0.25, 0.75]);
    assert_eq!(f.citing_norm, vec![0.0; 3]);
    assert_eq!(f.cited_norm, vec![0.25, 0.25, 0.5]);
    assert_eq!(f.degenerate, [false, true, false]);
}

#[test]
fn five_paper_graph_against_inversion_oracle() {
    let papers = vec![
        paper("a", "t", "", &["b", "c", "zz"]),
        paper("b", "t", "", &["c"]),
        paper("c", "t", "", &["a", "a"]),
        paper("d", "t", "", &["a", "b", "c", "e"]),
        paper("e", "t", "", &[]),
    ];
    let g = CitationGraph::build(&papers);
    let expected = brute_force_incoming(&papers);
    for p in &papers {
        let got: Vec<&str> = g.incoming(&p.id).collect();
        assert_eq!(got, expected[&p.id].iter().map(String::as_str).collect::<Vec<_>>());
    }
    assert_eq!(g.dangling_references(), 1);
}
