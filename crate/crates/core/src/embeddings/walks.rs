//! Random-walk corpora restricted to nodes of interest, for an external
//! skip-gram trainer.

use std::collections::BTreeSet;
use std::hash::Hasher;
use std::io::{self, Write};

use fnv::{FnvHashMap, FnvHasher};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ingest::{Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    /// Node hops per walk; a walk has at most `2 * depth + 1` tokens.
    pub depth: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 500,
            depth: 4,
            seed: 0,
        }
    }
}

/// Directed graph over IRI and blank-node terms; adjacency lists are sorted so
/// that a walk depends only on the triples, not on their order.
#[derive(Debug, Default)]
pub struct WalkGraph {
    nodes: Vec<String>,
    node_ids: FnvHashMap<String, u32>,
    edges: Vec<String>,
    edge_ids: FnvHashMap<String, u32>,
    out: Vec<Vec<(u32, u32)>>,
    skipped_literals: usize,
}

fn term_token(t: &Term) -> Option<String> {
    match t {
        Term::Iri(i) => Some(i.clone()),
        Term::Blank(b) => Some(format!("_:{b}")),
        Term::Literal(_) => None,
    }
}

fn intern(names: &mut Vec<String>, ids: &mut FnvHashMap<String, u32>, s: String) -> u32 {
    if let Some(&id) = ids.get(&s) {
        return id;
    }
    let id = u32::try_from(names.len()).expect("more than u32::MAX graph terms");
    names.push(s.clone());
    ids.insert(s, id);
    id
}

impl WalkGraph {
    pub fn from_triples<I: IntoIterator<Item = Triple>>(triples: I) -> Self {
        let mut g = WalkGraph::default();
        for t in triples {
            g.add(&t);
        }
        g.finish();
        g
    }

    fn add(&mut self, t: &Triple) {
        let (Some(s), Some(o)) = (term_token(&t.subject), term_token(&t.object)) else {
            self.skipped_literals += 1;
            return;
        };
        let s = intern(&mut self.nodes, &mut self.node_ids, s);
        let o = intern(&mut self.nodes, &mut self.node_ids, o);
        let p = intern(&mut self.edges, &mut self.edge_ids, t.predicate.clone());
        if self.out.len() < self.nodes.len() {
            self.out.resize_with(self.nodes.len(), Vec::new);
        }
        self.out[s as usize].push((p, o));
    }

    fn finish(&mut self) {
        self.out.resize_with(self.nodes.len(), Vec::new);
        let (nodes, edges) = (&self.nodes, &self.edges);
        for adj in &mut self.out {
            adj.sort_by(|a, b| (&edges[a.0 as usize], &nodes[a.1 as usize]).cmp(&(&edges[b.0 as usize], &nodes[b.1 as usize])));
            adj.dedup();
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, node: &str) -> bool {
        self.node_ids.contains_key(node)
    }

    pub fn skipped_literals(&self) -> usize {
        self.skipped_literals
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WalkStats {
    pub nodes_walked: usize,
    pub walks: usize,
    /// Nodes of interest that are not in the graph.
    pub absent_nodes: usize,
    /// Nodes of interest without outgoing edges.
    pub sink_nodes: usize,
}

fn node_seed(seed: u64, node: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(node.as_bytes());
    seed ^ h.finish()
}

/// Walks from one node: `walks_per_node` token sequences alternating
/// node, edge, node, ... Revisits are allowed; duplicates are kept. Empty if
/// the node is absent or has no outgoing edges.
pub fn walks_from(graph: &WalkGraph, node: &str, cfg: &WalkConfig) -> Vec<Vec<String>> {
    let Some(&start) = graph.node_ids.get(node) else {
        return Vec::new();
    };
    if graph.out[start as usize].is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(node_seed(cfg.seed, node));
    let mut walks = Vec::with_capacity(cfg.walks_per_node);
    for _ in 0..cfg.walks_per_node {
        let mut walk = Vec::with_capacity(2 * cfg.depth + 1);
        walk.push(graph.nodes[start as usize].clone());
        let mut cur = start as usize;
        for _ in 0..cfg.depth {
            let adj = &graph.out[cur];
            if adj.is_empty() {
                break;
            }
            let (e, n) = adj[rng.random_range(0..adj.len())];
            walk.push(graph.edges[e as usize].clone());
            walk.push(graph.nodes[n as usize].clone());
            cur = n as usize;
        }
        walks.push(walk);
    }
    walks
}

const BATCH: usize = 256;

/// Writes one walk per line, tokens separated by a space. Nodes are
/// processed in sorted order, so the corpus is identical for a given seed
/// whatever the thread count.
pub fn generate_walks<W: Write>(
    graph: &WalkGraph,
    nodes_of_interest: &BTreeSet<String>,
    cfg: &WalkConfig,
    out: &mut W,
) -> io::Result<WalkStats> {
    let mut stats = WalkStats::default();
    let nodes: Vec<&String> = nodes_of_interest.iter().collect();
    for batch in nodes.chunks(BATCH) {
        let rendered: Vec<(bool, bool, String)> = batch
            .par_iter()
            .map(|n| {
                let present = graph.contains(n);
                let walks = walks_from(graph, n, cfg);
                let mut text = String::new();
                for w in &walks {
                    text.push_str(&w.join(" "));
                    text.push('\n');
                }
                (present, !walks.is_empty(), text)
            })
            .collect();
        for (present, walked, text) in rendered {
            if !present {
                stats.absent_nodes += 1;
            } else if !walked {
                stats.sink_nodes += 1;
            } else {
                stats.nodes_walked += 1;
                stats.walks += cfg.walks_per_node;
            }
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(stats)
}
