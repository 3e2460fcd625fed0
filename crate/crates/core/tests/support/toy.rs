//! Random toy packs, ontologies and vector stores for property tests.

#![allow(dead_code)]

use bkmatch_core::embeddings::EmbeddingStore;
use bkmatch_core::model::{Entity, Ontology};
use bkmatch_core::store::{BackgroundPack, PackBuilder};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const WORDS: [&str; 12] = [
    "paper", "author", "review", "chair", "session", "event", "person", "talk", "topic", "track", "dinner", "banquet",
];

fn concept(i: usize) -> String {
    format!("http://kg/C{i}")
}

/// Surface forms are single words and a few two-word phrases; concepts,
/// synonym and hypernym edges are drawn at random.
pub fn random_pack<R: Rng>(rng: &mut R, name: &str) -> BackgroundPack {
    let n_concepts = rng.random_range(4..10);
    let mut b = PackBuilder::new(name).mutual_hypernymy_synonymy(rng.random_bool(0.5));
    for w in WORDS {
        if rng.random_bool(0.8) {
            for _ in 0..rng.random_range(1..=2) {
                b = b.label(w, &concept(rng.random_range(0..n_concepts)));
            }
        }
    }
    for _ in 0..3 {
        let phrase = format!("{} {}", WORDS.choose(rng).unwrap(), WORDS.choose(rng).unwrap());
        b = b.label(&phrase, &concept(rng.random_range(0..n_concepts)));
    }
    for _ in 0..rng.random_range(0..6) {
        b = b.synonym(&concept(rng.random_range(0..n_concepts)), &concept(rng.random_range(0..n_concepts)));
    }
    for _ in 0..rng.random_range(0..8) {
        b = b.hypernym(&concept(rng.random_range(0..n_concepts)), &concept(rng.random_range(0..n_concepts)));
    }
    b.build()
}

fn random_label<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(1..=3);
    let mut parts: Vec<&str> = (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect();
    if rng.random_bool(0.1) {
        parts.push("zzz");
    }
    parts.join(" ")
}

pub fn random_ontology<R: Rng>(rng: &mut R, id: &str) -> Ontology {
    let n = rng.random_range(0..8);
    let entities = (0..n)
        .map(|i| {
            let labels: Vec<String> = (0..rng.random_range(1..=2)).map(|_| random_label(rng)).collect();
            Entity::new(format!("http://{id}#e{i}"), labels).unwrap()
        })
        .collect();
    Ontology::new(id, entities).unwrap()
}

/// Vectors for a random subset of the pack's concepts.
pub fn random_store<R: Rng>(rng: &mut R, pack: &BackgroundPack) -> EmbeddingStore {
    let dim = 4;
    let mut vectors = Vec::new();
    for name in pack.concept_names() {
        if rng.random_bool(0.8) {
            vectors.push((name.to_string(), (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()));
        }
    }
    EmbeddingStore::from_vectors(dim, vectors)
}
