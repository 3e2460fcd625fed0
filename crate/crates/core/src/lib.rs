//! Schema matching with pluggable background knowledge.
//!
//! Labels of two ontologies are linked into background packs, an exchangeable
//! strategy decides which pairs are candidates, and Hungarian extraction turns
//! the candidates into a one-to-one alignment. The [`eval`] module scores
//! alignments and tests whether two of them differ significantly.

pub mod model;
pub mod store;
pub mod ingest;
pub mod embeddings;
pub mod matcher;
pub mod eval;
