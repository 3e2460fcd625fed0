use std::collections::BTreeSet;

use bkmatch_core::embeddings::{generate_walks, walks_from, WalkConfig, WalkGraph};
use bkmatch_core::ingest::{Term, Triple};

/// 20 nodes; n16..n19 have no outgoing edges. Three predicates.
fn graph() -> WalkGraph {
    let mut triples = Vec::new();
    for i in 0..16 {
        for (p, j) in [("p", (i * 3 + 1) % 20), ("q", (i + 7) % 20), ("r", (i + 1) % 20)] {
            if (i + j) % 5 != 0 {
                triples.push(Triple {
                    subject: Term::Iri(format!("http://g/n{i}")),
                    predicate: format!("http://g/{p}"),
                    object: Term::Iri(format!("http://g/n{j}")),
                });
            }
        }
    }
    WalkGraph::from_triples(triples)
}

fn nodes() -> BTreeSet<String> {
    (0..20).map(|i| format!("http://g/n{i}")).collect()
}

fn corpus(threads: usize, seed: u64) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let g = graph();
    let cfg = WalkConfig { seed, ..WalkConfig::default() };
    let mut out = Vec::new();
    pool.install(|| generate_walks(&g, &nodes(), &cfg, &mut out)).unwrap();
    out
}

#[test]
fn defaults() {
    let cfg = WalkConfig::default();
    assert_eq!((cfg.walks_per_node, cfg.depth), (500, 4));
}

#[test]
fn walk_shape_and_counts() {
    let g = graph();
    let cfg = WalkConfig::default();
    let node_set = nodes();
    let edges: BTreeSet<String> = ["p", "q", "r"].iter().map(|p| format!("http://g/{p}")).collect();
    for n in &node_set {
        let walks = walks_from(&g, n, &cfg);
        assert!(walks.len() <= 500);
        for w in &walks {
            assert!(w.len() <= 2 * cfg.depth + 1 && w.len() % 2 == 1);
            assert_eq!(&w[0], n);
            for (k, tok) in w.iter().enumerate() {
                if k % 2 == 0 {
                    assert!(node_set.contains(tok), "{tok} at node position");
                } else {
                    assert!(edges.contains(tok), "{tok} at edge position");
                }
            }
        }
    }
    let text = String::from_utf8(corpus(2, 11)).unwrap();
    for n in &node_set {
        let starts = text.lines().filter(|l| l.split(' ').next() == Some(n.as_str())).count();
        assert!(starts == 500 || starts == 0, "{n}: {starts}");
    }
}

#[test]
fn corpus_is_seed_stable_across_thread_counts() {
    let a = corpus(1, 42);
    assert_eq!(a, corpus(4, 42));
    assert_eq!(a, corpus(1, 42));
    assert_ne!(a, corpus(1, 43));
}
