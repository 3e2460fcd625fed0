use std::path::PathBuf;

use bkmatch_core::ingest::{build_pack, BuiltinProfile};

use crate::error::CliError;
use crate::inputs::{parse_mode, TripleFiles};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// N-Triples dump to read; repeat for several files.
    #[arg(long = "input", value_name = "FILE", required = true)]
    inputs: Vec<PathBuf>,
    /// Predicate profile: wordnet-style, wikidata-style, dbpedia-style or
    /// webisalod-style.
    #[arg(long, value_name = "NAME")]
    profile: BuiltinProfile,
    /// Pack name recorded in the metadata; defaults to the output directory name.
    #[arg(long)]
    name: Option<String>,
    /// Output pack directory; created if missing.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Skip malformed lines instead of failing on the first one.
    #[arg(long)]
    lenient: bool,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let name = match a.name {
        Some(n) => n,
        None => a
            .out
            .file_name()
            .and_then(|s| s.to_str())
            .map(str::to_string)
            .ok_or_else(|| CliError::Config("cannot derive a pack name; pass --name".into()))?,
    };
    let mut files = TripleFiles::new(&a.inputs, parse_mode(a.lenient))?;
    let (data, stats) = build_pack(&name, files.by_ref(), &a.profile.profile());
    let skipped = files.finish()?;
    data.write_dir(&a.out)?;
    eprintln!(
        "pack {name}: {} triples, {} labels, {} synonymy edges, {} hypernymy edges",
        stats.triples,
        data.labels.len(),
        data.synonymy.len(),
        data.hypernymy.len()
    );
    eprintln!(
        "skipped: {skipped} malformed lines, {} blank nodes, {} literal relation objects, {} non-English labels",
        stats.blank_nodes_skipped, stats.literal_relation_objects_skipped, stats.non_english_labels_dropped
    );
    Ok(())
}
