//! Loading of ontologies, triples, alignments and run manifests.

use std::collections::{BTreeMap, VecDeque};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use bkmatch_core::ingest::{
    extract_ontology, read_alignment, read_label_tsv, AlignmentFormat, ParseMode, PredicateProfile, Triple,
    TripleStream,
};
use bkmatch_core::model::{Alignment, Ontology};
use clap::ValueEnum;

use crate::error::{require_exists, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OntologyFormat {
    /// N-Triples; labels from rdfs:label.
    Ntriples,
    /// Tab-separated `iri<TAB>label` lines.
    Labels,
}

impl OntologyFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "nt" => Some(OntologyFormat::Ntriples),
            "tsv" | "txt" => Some(OntologyFormat::Labels),
            _ => None,
        }
    }
}

pub fn parse_mode(lenient: bool) -> ParseMode {
    if lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))
}

/// Concatenated triples of several files. A strict-mode syntax error or an
/// I/O failure ends the iteration and is kept in `error`.
pub struct TripleFiles {
    paths: VecDeque<PathBuf>,
    current: Option<(PathBuf, TripleStream<BufReader<File>>)>,
    mode: ParseMode,
    pub error: Option<CliError>,
    pub skipped: usize,
}

impl TripleFiles {
    pub fn new(paths: &[PathBuf], mode: ParseMode) -> Result<Self, CliError> {
        for p in paths {
            require_exists(p, "input")?;
        }
        Ok(TripleFiles {
            paths: paths.iter().cloned().collect(),
            current: None,
            mode,
            error: None,
            skipped: 0,
        })
    }

    pub fn finish(self) -> Result<usize, CliError> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.skipped),
        }
    }
}

impl Iterator for TripleFiles {
    type Item = Triple;

    fn next(&mut self) -> Option<Triple> {
        loop {
            if self.error.is_some() {
                return None;
            }
            if let Some((path, stream)) = &mut self.current {
                match stream.next() {
                    Some(Ok(t)) => return Some(t),
                    Some(Err(e)) => {
                        self.error = Some(CliError::Data(format!("{}: {e}", path.display())));
                        return None;
                    }
                    None => {
                        self.skipped += stream.skipped();
                        self.current = None;
                    }
                }
            }
            let path = self.paths.pop_front()?;
            match open(&path) {
                Ok(f) => self.current = Some((path, TripleStream::new(BufReader::new(f), self.mode))),
                Err(e) => {
                    self.error = Some(e);
                    return None;
                }
            }
        }
    }
}

pub fn load_ontology(path: &Path, format: Option<OntologyFormat>, mode: ParseMode) -> Result<Ontology, CliError> {
    require_exists(path, "ontology")?;
    let format = format.or_else(|| OntologyFormat::from_path(path)).ok_or_else(|| {
        CliError::Config(format!("cannot infer the format of {}; pass --format", path.display()))
    })?;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("ontology");
    match format {
        OntologyFormat::Labels => read_label_tsv(id, open(path)?).map_err(|e| CliError::Data(e.in_file(path).to_string())),
        OntologyFormat::Ntriples => {
            let mut files = TripleFiles::new(&[path.to_path_buf()], mode)?;
            let result = extract_ontology(id, files.by_ref(), &PredicateProfile::rdfs_label());
            let skipped = files.finish()?;
            if skipped > 0 {
                eprintln!("{}: skipped {skipped} malformed lines", path.display());
            }
            Ok(result.map_err(|e| CliError::Data(e.in_file(path).to_string()))?.0)
        }
    }
}

pub fn alignment_format(path: &Path, explicit: Option<AlignmentFormat>) -> Result<AlignmentFormat, CliError> {
    explicit.or_else(|| AlignmentFormat::from_path(path)).ok_or_else(|| {
        CliError::Config(format!("cannot infer the alignment format of {}", path.display()))
    })
}

pub fn load_alignment(path: &Path, mode: ParseMode) -> Result<Alignment, CliError> {
    require_exists(path, "alignment")?;
    let (a, report) = read_alignment(path, alignment_format(path, None)?, mode)?;
    if report.skipped > 0 {
        eprintln!("{}: skipped {} cells", path.display(), report.skipped);
    }
    Ok(a)
}

/// Buffered writer to a file, or to standard output when no path is given.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::write_failed(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// A CSV manifest with a header row. Paths in path columns resolve against
/// the manifest's directory.
pub struct Manifest {
    pub rows: Vec<BTreeMap<String, String>>,
    base: PathBuf,
}

impl Manifest {
    pub fn load(path: &Path, required: &[&str]) -> Result<Self, CliError> {
        require_exists(path, "manifest")?;
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(open(path)?);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        for col in required {
            if !header.iter().any(|h| h == col) {
                return Err(CliError::Config(format!("manifest {} lacks column `{col}`", path.display())));
            }
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            rows.push(header.iter().cloned().zip(rec.iter().map(str::to_string)).collect());
        }
        Ok(Manifest {
            rows,
            base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn path(&self, row: &BTreeMap<String, String>, col: &str) -> PathBuf {
        self.base.join(&row[col])
    }
}

/// Alignments and references grouped by run, with test cases in the order of
/// first appearance. Every run must cover every test case, and a test case
/// must name the same reference in every row.
pub struct RunTable {
    pub testcases: Vec<String>,
    pub refs: Vec<Alignment>,
    pub runs: BTreeMap<String, BTreeMap<String, Alignment>>,
    pub run_order: Vec<String>,
}

impl RunTable {
    pub fn load(m: &Manifest, run_key: impl Fn(&BTreeMap<String, String>) -> String, mode: ParseMode) -> Result<Self, CliError> {
        let mut testcases: Vec<String> = Vec::new();
        let mut ref_paths: BTreeMap<String, PathBuf> = BTreeMap::new();
        let mut runs: BTreeMap<String, BTreeMap<String, Alignment>> = BTreeMap::new();
        let mut run_order = Vec::new();
        for row in &m.rows {
            let tc = row["testcase"].clone();
            let rp = m.path(row, "reference");
            match ref_paths.get(&tc) {
                Some(prev) if *prev != rp => {
                    return Err(CliError::Data(format!(
                        "test case `{tc}` names two references: {} and {}",
                        prev.display(),
                        rp.display()
                    )))
                }
                Some(_) => {}
                None => {
                    testcases.push(tc.clone());
                    ref_paths.insert(tc.clone(), rp);
                }
            }
            let key = run_key(row);
            if !runs.contains_key(&key) {
                run_order.push(key.clone());
            }
            let a = load_alignment(&m.path(row, "alignment"), mode)?;
            if runs.entry(key.clone()).or_default().insert(tc.clone(), a).is_some() {
                return Err(CliError::Data(format!("run `{key}` lists test case `{tc}` twice")));
            }
        }
        let refs = testcases
            .iter()
            .map(|tc| load_alignment(&ref_paths[tc], mode))
            .collect::<Result<_, _>>()?;
        Ok(RunTable {
            testcases,
            refs,
            runs,
            run_order,
        })
    }

    /// The run's alignments in test-case order.
    pub fn ordered(&self, key: &str) -> Result<Vec<Alignment>, CliError> {
        let run = &self.runs[key];
        self.testcases
            .iter()
            .map(|tc| {
                run.get(tc)
                    .cloned()
                    .ok_or_else(|| CliError::Data(format!("run `{key}` has no alignment for test case `{tc}`")))
            })
            .collect()
    }
}
