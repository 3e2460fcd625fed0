//! Readers and writers for ontologies, knowledge-graph dumps and alignments.

mod alignment;
mod extract;
mod ntriples;
mod xml;

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::model::ModelError;

pub use alignment::{
    parse_alignment, read_alignment, write_alignment, write_alignment_to, AlignmentFormat, ReadReport,
};
pub use extract::{
    build_pack, extract_ontology, is_english, local_name, read_label_tsv, BuildStats, BuiltinProfile,
    ExtractStats, PredicateProfile, RDFS_LABEL, RDF_TYPE,
};
pub use ntriples::{
    parse_line, read_all, Literal, NTriplesError, ParseMode, SyntaxError, Term, Triple, TripleStream,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("{location}: {message}")]
    Format { location: String, message: String },
    #[error("{location}: unsupported relation `{relation}`")]
    UnknownRelation { location: String, relation: String },
    #[error(transparent)]
    NTriples(#[from] NTriplesError),
    #[error(transparent)]
    Model(ModelError),
}

impl IngestError {
    /// Prefixes locations with the file they refer to.
    pub fn in_file(self, path: &Path) -> Self {
        let p = path.display();
        match self {
            IngestError::Format { location, message } => IngestError::Format {
                location: format!("{p}: {location}"),
                message,
            },
            IngestError::UnknownRelation { location, relation } => IngestError::UnknownRelation {
                location: format!("{p}: {location}"),
                relation,
            },
            other => other,
        }
    }
}
