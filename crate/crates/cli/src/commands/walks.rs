use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use bkmatch_core::embeddings::{generate_walks, WalkConfig, WalkGraph};
use bkmatch_core::model::DEFAULT_STOPWORDS;
use bkmatch_core::store::{link, BackgroundPack, LabelAnalyzer};

use crate::error::{require_exists, CliError};
use crate::inputs::{load_ontology, output, parse_mode, OntologyFormat, TripleFiles};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// N-Triples graph to walk; repeat for several files.
    #[arg(long = "graph", value_name = "FILE", required = true)]
    graphs: Vec<PathBuf>,
    /// File listing nodes of interest, one IRI per line.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["ontology", "pack"])]
    nodes: Option<PathBuf>,
    /// Ontology whose labels, linked against --pack, give the nodes of interest.
    #[arg(long, value_name = "FILE", requires = "pack")]
    ontology: Option<PathBuf>,
    /// Ontology format; inferred from the extension when absent.
    #[arg(long, value_enum)]
    format: Option<OntologyFormat>,
    /// Pack used to link the ontology labels.
    #[arg(long, value_name = "DIR", requires = "ontology")]
    pack: Option<PathBuf>,
    /// Walks started from each node of interest.
    #[arg(long, default_value_t = WalkConfig::default().walks_per_node)]
    walks_per_node: usize,
    /// Hops per walk.
    #[arg(long, default_value_t = WalkConfig::default().depth)]
    depth: usize,
    /// Random seed; the corpus is identical for a given seed and graph.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Skip malformed lines instead of failing.
    #[arg(long)]
    lenient: bool,
}

fn nodes_of_interest(a: &Args) -> Result<BTreeSet<String>, CliError> {
    if let Some(p) = &a.nodes {
        require_exists(p, "node list")?;
        let text = fs::read_to_string(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
        return Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect());
    }
    match (&a.ontology, &a.pack) {
        (Some(o), Some(p)) => {
            require_exists(p, "pack directory")?;
            let pack = BackgroundPack::load(p)?;
            let onto = load_ontology(o, a.format, parse_mode(a.lenient))?;
            let analyzer = LabelAnalyzer::new(DEFAULT_STOPWORDS.iter().map(|s| s.to_string()));
            let mut nodes = BTreeSet::new();
            for e in onto.entities() {
                for l in e.labels() {
                    if let Some(r) = link(l, &pack, &analyzer) {
                        for ids in r.concepts() {
                            nodes.extend(ids.iter().map(|&c| pack.concept_name(c).to_string()));
                        }
                    }
                }
            }
            Ok(nodes)
        }
        _ => Err(CliError::Config("pass --nodes, or --ontology with --pack".into())),
    }
}

pub fn run(a: Args) -> Result<(), CliError> {
    if a.walks_per_node == 0 || a.depth == 0 {
        return Err(CliError::Config("--walks-per-node and --depth must be positive".into()));
    }
    let nodes = nodes_of_interest(&a)?;
    let mut files = TripleFiles::new(&a.graphs, parse_mode(a.lenient))?;
    let graph = WalkGraph::from_triples(files.by_ref());
    files.finish()?;
    let cfg = WalkConfig {
        walks_per_node: a.walks_per_node,
        depth: a.depth,
        seed: a.seed,
    };
    let mut w = output(a.output.as_deref())?;
    let stats = generate_walks(&graph, &nodes, &cfg, &mut w)?;
    w.flush()?;
    eprintln!(
        "{} walks from {} node(s); {} absent, {} without outgoing edges",
        stats.walks, stats.nodes_walked, stats.absent_nodes, stats.sink_nodes
    );
    Ok(())
}
