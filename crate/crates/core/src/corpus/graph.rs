use std::collections::{HashMap, HashSet};

use super::Paper;

/// Citation graph restricted to papers present in the corpus, stored in
/// both directions.
#[derive(Debug, Clone, Default)]
pub struct CitationGraph {
    ids: Vec<String>,
    position: HashMap<String, u32>,
    outgoing: Vec<Vec<u32>>,
    incoming: Vec<Vec<u32>>,
    dangling: usize,
}

impl CitationGraph {
    /// Builds both adjacency directions. References to ids outside the
    /// corpus are dropped and counted; duplicate edges are collapsed.
    pub fn build(papers: &[Paper]) -> Self {
        let mut ids = Vec::with_capacity(papers.len());
        let mut position = HashMap::with_capacity(papers.len());
        for paper in papers {
            if !position.contains_key(&paper.id) {
                position.insert(paper.id.clone(), ids.len() as u32);
                ids.push(paper.id.clone());
            }
        }

        let mut outgoing = vec![Vec::new(); ids.len()];
        let mut dangling = 0;
        let mut seen = HashSet::new();
        for paper in papers {
            let from = position[&paper.id];
            if !outgoing[from as usize].is_empty() {
                // a later duplicate record of an id already wired up
                continue;
            }
            seen.clear();
            let mut edges = Vec::new();
            for r in &paper.references {
                match position.get(r) {
                    Some(&to) if to != from => {
                        if seen.insert(to) {
                            edges.push(to);
                        }
                    }
                    Some(_) => {}
                    None => dangling += 1,
                }
            }
            outgoing[from as usize] = edges;
        }

        let mut incoming = vec![Vec::new(); ids.len()];
        for (from, edges) in outgoing.iter().enumerate() {
            for &to in edges {
                incoming[to as usize].push(from as u32);
            }
        }

        CitationGraph { ids, position, outgoing, incoming, dangling }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.position.contains_key(id)
    }

    /// References that pointed outside the corpus.
    pub fn dangling_references(&self) -> usize {
        self.dangling
    }

    pub fn edge_count(&self) -> usize {
        self.outgoing.iter().map(Vec::len).sum()
    }

    /// Papers cited by `id`, in reference order. Empty for unknown ids.
    pub fn outgoing(&self, id: &str) -> impl Iterator<Item = &str> + '_ {
        self.neighbors(&self.outgoing, id)
    }

    /// Papers citing `id`, in corpus order. Empty for unknown ids.
    pub fn incoming(&self, id: &str) -> impl Iterator<Item = &str> + '_ {
        self.neighbors(&self.incoming, id)
    }

    fn neighbors<'a>(&'a self, adj: &'a [Vec<u32>], id: &str) -> impl Iterator<Item = &'a str> + 'a {
        let list: &[u32] = match self.position.get(id) {
            Some(&p) => &adj[p as usize],
            None => &[],
        };
        list.iter().map(move |&i| self.ids[i as usize].as_str())
    }
}
