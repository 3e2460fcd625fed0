//! Background knowledge packs and the linker.

mod link;
mod pack;
mod text;

pub use link::{
    coverage_holds, labels_related, link, link_traced, links_related, LinkResult, LinkTier,
    LinkTrace, LinkedSpan,
};
pub use pack::{
    BackgroundPack, ConceptId, PackBuilder, PackData, PackError, RelationMode, HYPERNYMY_FILE,
    LABELS_FILE, META_FILE, SYNONYMY_FILE,
};
pub use text::{normalize, LabelAnalyzer};
