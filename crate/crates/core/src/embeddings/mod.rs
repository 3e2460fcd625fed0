//! Concept vectors, the cosine predicate, and walk corpus generation.

mod vectors;
mod walks;

pub use vectors::{
    cosine, embedding_match, embedding_score, load_vectors, read_vectors, EmbeddingError, EmbeddingStore,
};
pub use walks::{generate_walks, walks_from, WalkConfig, WalkGraph, WalkStats};
