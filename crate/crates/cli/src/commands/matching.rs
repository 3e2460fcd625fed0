use std::env;
use std::io::Write;
use std::path::{Path, PathBuf};

use bkmatch_core::embeddings::{load_vectors, EmbeddingStore};
use bkmatch_core::ingest::{write_alignment_to, AlignmentFormat};
use bkmatch_core::matcher::run_match;
use bkmatch_core::model::{BaseStrategy, MatcherConfig, Strategy};
use bkmatch_core::store::BackgroundPack;

use crate::config::RunFile;
use crate::error::{require_exists, CliError};
use crate::inputs::{alignment_format, load_ontology, output, parse_mode, OntologyFormat};

pub const PACK_DIR_VAR: &str = "BKMATCH_PACK_DIR";

const SECTION: &str = "match";
const KEYS: &[&str] = &[
    "source",
    "target",
    "format",
    "packs",
    "vectors",
    "strategy",
    "threshold",
    "output",
    "output_format",
    "lenient",
    "seed",
];

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Run file of `key = value` lines (section `[match]`); flags override it.
    /// Keys: source, target, format, packs, vectors, strategy, threshold,
    /// output, output_format, lenient, seed.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Source ontology.
    #[arg(long, value_name = "FILE")]
    source: Option<PathBuf>,
    /// Target ontology.
    #[arg(long, value_name = "FILE")]
    target: Option<PathBuf>,
    /// Ontology format; inferred from the extension (.nt, .tsv) when absent.
    #[arg(long, value_enum)]
    format: Option<OntologyFormat>,
    /// Background pack directory; repeat for combination strategies.
    /// Relative paths that do not exist are looked up under $BKMATCH_PACK_DIR.
    #[arg(long = "pack", value_name = "DIR")]
    packs: Vec<PathBuf>,
    /// Word2vec text vectors, one file per pack in pack order (embedding strategies).
    #[arg(long = "vectors", value_name = "FILE")]
    vectors: Vec<PathBuf>,
    /// syn, syn-hyp, embedding, or combination-<base>.
    #[arg(long)]
    strategy: Option<Strategy>,
    /// Cosine threshold of the embedding strategy; pairs need a score above it.
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    /// Alignment output file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// tsv or align-xml; inferred from --output, else tsv.
    #[arg(long, value_name = "FORMAT")]
    output_format: Option<AlignmentFormat>,
    /// Skip malformed ontology lines instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Recorded in the summary for provenance; matching draws no random numbers.
    #[arg(long)]
    seed: Option<u64>,
}

/// Fully resolved run settings.
#[derive(Debug)]
struct RunConfig {
    source: PathBuf,
    target: PathBuf,
    format: Option<OntologyFormat>,
    packs: Vec<PathBuf>,
    vectors: Vec<PathBuf>,
    matcher: MatcherConfig,
    output: Option<PathBuf>,
    output_format: AlignmentFormat,
    lenient: bool,
    seed: u64,
}

fn resolve_pack(p: PathBuf) -> PathBuf {
    if p.is_relative() && !p.exists() {
        if let Some(root) = env::var_os(PACK_DIR_VAR) {
            return Path::new(&root).join(p);
        }
    }
    p
}

fn resolve(a: Args) -> Result<RunConfig, CliError> {
    let rf = match &a.config {
        Some(p) => {
            let rf = RunFile::load(p)?;
            rf.check_keys(SECTION, KEYS)?;
            rf
        }
        None => RunFile::default(),
    };
    let required = |flag: Option<PathBuf>, key: &str| {
        flag.or_else(|| rf.path(SECTION, key))
            .ok_or_else(|| CliError::Config(format!("missing --{key}")))
    };
    let source = required(a.source, "source")?;
    let target = required(a.target, "target")?;
    let format = match a.format {
        Some(f) => Some(f),
        None => match rf.get(SECTION, "format") {
            Some(v) => Some(
                <OntologyFormat as clap::ValueEnum>::from_str(v, true)
                    .map_err(|e| CliError::Config(format!("config key `format`: {e}")))?,
            ),
            None => None,
        },
    };
    let packs = if a.packs.is_empty() { rf.paths(SECTION, "packs") } else { a.packs };
    let packs: Vec<PathBuf> = packs.into_iter().map(resolve_pack).collect();
    let vectors = if a.vectors.is_empty() { rf.paths(SECTION, "vectors") } else { a.vectors };

    let mut matcher = MatcherConfig::default();
    if let Some(s) = a.strategy.or(rf.parsed(SECTION, "strategy")?) {
        matcher.strategy = s;
    }
    if let Some(t) = a.threshold.or(rf.parsed(SECTION, "threshold")?) {
        matcher.embedding_threshold = t;
    }
    matcher.validate()?;

    let output = a.output.or_else(|| rf.path(SECTION, "output"));
    let output_format = match a.output_format.or(rf.parsed(SECTION, "output_format")?) {
        Some(f) => f,
        None => match &output {
            Some(p) => alignment_format(p, None).unwrap_or(AlignmentFormat::Tsv),
            None => AlignmentFormat::Tsv,
        },
    };
    let lenient = a.lenient || rf.parsed::<bool>(SECTION, "lenient")?.unwrap_or(false);
    let seed = a.seed.or(rf.parsed(SECTION, "seed")?).unwrap_or(0);

    require_exists(&source, "source ontology")?;
    require_exists(&target, "target ontology")?;
    for p in &packs {
        require_exists(p, "pack directory")?;
    }
    for v in &vectors {
        require_exists(v, "vector file")?;
    }
    Ok(RunConfig {
        source,
        target,
        format,
        packs,
        vectors,
        matcher,
        output,
        output_format,
        lenient,
        seed,
    })
}

pub fn run(a: Args) -> Result<(), CliError> {
    let cfg = resolve(a)?;
    let packs = cfg
        .packs
        .iter()
        .map(|p| BackgroundPack::load(p))
        .collect::<Result<Vec<_>, _>>()?;
    let stores: Vec<EmbeddingStore> = if cfg.matcher.strategy.base() == BaseStrategy::Embedding {
        cfg.vectors.iter().map(|p| load_vectors(p)).collect::<Result<_, _>>()?
    } else if cfg.vectors.is_empty() {
        Vec::new()
    } else {
        return Err(CliError::Config(format!(
            "--vectors given but strategy {} does not use embeddings",
            cfg.matcher.strategy
        )));
    };
    bkmatch_core::matcher::check_resources(&cfg.matcher, &packs, &stores)?;

    let mode = parse_mode(cfg.lenient);
    let o1 = load_ontology(&cfg.source, cfg.format, mode)?;
    let o2 = load_ontology(&cfg.target, cfg.format, mode)?;
    let out = run_match(&o1, &o2, &packs, &stores, &cfg.matcher)?;

    let mut w = output(cfg.output.as_deref())?;
    write_alignment_to(&out.alignment, &mut w, cfg.output_format)?;
    w.flush()?;

    let s = out.stats;
    eprintln!(
        "strategy {} over {} pack(s), seed {}: {} x {} entities",
        cfg.matcher.strategy,
        packs.len(),
        cfg.seed,
        o1.len(),
        o2.len()
    );
    eprintln!(
        "string matches {} (kept {}), pairs scanned {}",
        s.string_matches, s.string_matches_kept, s.pairs_scanned
    );
    eprintln!(
        "links: full-label {}, longest-token {}, token {}, unlinked {}",
        s.full_label_links, s.longest_token_links, s.token_links, s.unlinked_labels
    );
    eprintln!("candidates {}, extracted {}", s.candidates, s.extracted);
    Ok(())
}
