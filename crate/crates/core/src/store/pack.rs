//! One background source: surface-form index plus synonymy and hypernymy edges.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use fnv::{FnvHashMap, FnvHashSet};
use thiserror::Error;

use super::text::normalize;

pub const LABELS_FILE: &str = "labels.tsv";
pub const SYNONYMY_FILE: &str = "synonymy.tsv";
pub const HYPERNYMY_FILE: &str = "hypernymy.tsv";
pub const META_FILE: &str = "pack.meta";

#[derive(Debug, Error)]
pub enum PackError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: missing required key `{key}`")]
    MissingKey { path: PathBuf, key: &'static str },
}

/// Dense handle for a concept inside one pack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptId(u32);

impl ConceptId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Serialized form of a pack: exactly what the pack directory holds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PackData {
    pub name: String,
    pub mutual_hypernymy_synonymy: bool,
    /// (normalized surface form, concept id)
    pub labels: BTreeSet<(String, String)>,
    pub synonymy: BTreeSet<(String, String)>,
    /// (hyponym, hypernym)
    pub hypernymy: BTreeSet<(String, String)>,
}

impl PackData {
    pub fn new(name: impl Into<String>) -> Self {
        PackData {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), PackError> {
        fs::create_dir_all(dir).map_err(|source| PackError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_pairs(&dir.join(LABELS_FILE), &self.labels)?;
        write_pairs(&dir.join(SYNONYMY_FILE), &self.synonymy)?;
        write_pairs(&dir.join(HYPERNYMY_FILE), &self.hypernymy)?;
        let meta = dir.join(META_FILE);
        let body = format!(
            "name={}\nmutual_hypernymy_synonymy={}\n",
            self.name, self.mutual_hypernymy_synonymy
        );
        fs::write(&meta, body).map_err(|source| PackError::Io { path: meta, source })
    }

    pub fn read_dir(dir: &Path) -> Result<Self, PackError> {
        let meta_path = dir.join(META_FILE);
        let meta = fs::read_to_string(&meta_path).map_err(|source| PackError::Io {
            path: meta_path.clone(),
            source,
        })?;
        let mut name = None;
        let mut mutual = None;
        for (i, line) in meta.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(PackError::Format {
                    path: meta_path.clone(),
                    line: i + 1,
                    message: "expected key=value".into(),
                });
            };
            match k.trim() {
                "name" => name = Some(v.trim().to_string()),
                "mutual_hypernymy_synonymy" => {
                    mutual = Some(v.trim().parse::<bool>().map_err(|_| PackError::Format {
                        path: meta_path.clone(),
                        line: i + 1,
                        message: format!("expected true/false, got `{}`", v.trim()),
                    })?)
                }
                _ => {}
            }
        }
        let name = name.ok_or_else(|| PackError::MissingKey {
            path: meta_path.clone(),
            key: "name",
        })?;
        let mutual = mutual.ok_or(PackError::MissingKey {
            path: meta_path,
            key: "mutual_hypernymy_synonymy",
        })?;
        Ok(PackData {
            name,
            mutual_hypernymy_synonymy: mutual,
            labels: read_pairs(&dir.join(LABELS_FILE))?,
            synonymy: read_pairs(&dir.join(SYNONYMY_FILE))?,
            hypernymy: read_pairs(&dir.join(HYPERNYMY_FILE))?,
        })
    }
}

fn write_pairs(path: &Path, pairs: &BTreeSet<(String, String)>) -> Result<(), PackError> {
    let io_err = |source| PackError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    for (a, b) in pairs {
        writeln!(w, "{a}\t{b}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn read_pairs(path: &Path) -> Result<BTreeSet<(String, String)>, PackError> {
    let io_err = |source| PackError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut out = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                out.insert((a.to_string(), b.to_string()));
            }
            _ => {
                return Err(PackError::Format {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: "expected exactly two non-empty tab-separated columns".into(),
                })
            }
        }
    }
    Ok(out)
}

/// An immutable, loaded background source.
#[derive(Debug, Clone)]
pub struct BackgroundPack {
    name: String,
    concepts: Vec<String>,
    ids: FnvHashMap<String, ConceptId>,
    surface_index: FnvHashMap<String, Vec<ConceptId>>,
    synonymy: FnvHashSet<(ConceptId, ConceptId)>,
    hypernymy: FnvHashSet<(ConceptId, ConceptId)>,
    mutual_hypernymy_synonymy: bool,
    orphans: usize,
}

impl BackgroundPack {
    pub fn load(dir: &Path) -> Result<Self, PackError> {
        Ok(Self::from_data(&PackData::read_dir(dir)?))
    }

    pub fn from_data(data: &PackData) -> Self {
        let mut b = PackBuilder::new(&data.name).mutual_hypernymy_synonymy(data.mutual_hypernymy_synonymy);
        for (sf, c) in &data.labels {
            b = b.label(sf, c);
        }
        for (x, y) in &data.synonymy {
            b = b.synonym(x, y);
        }
        for (x, y) in &data.hypernymy {
            b = b.hypernym(x, y);
        }
        b.build()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mutual_hypernymy_synonymy(&self) -> bool {
        self.mutual_hypernymy_synonymy
    }

    /// Concepts referenced by an edge but reachable from no surface form.
    pub fn orphan_count(&self) -> usize {
        self.orphans
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    /// Concept names in ID order.
    pub fn concept_names(&self) -> impl Iterator<Item = &str> {
        self.concepts.iter().map(String::as_str)
    }

    pub fn concept_name(&self, id: ConceptId) -> &str {
        &self.concepts[id.index()]
    }

    pub fn concept_id(&self, name: &str) -> Option<ConceptId> {
        self.ids.get(name).copied()
    }

    /// Concepts for an already-normalized surface form.
    pub fn lookup(&self, surface: &str) -> Option<&[ConceptId]> {
        self.surface_index.get(surface).map(Vec::as_slice)
    }

    /// Reflexive, symmetric; optionally also true for mutual hypernyms.
    pub fn is_synonymous(&self, c1: ConceptId, c2: ConceptId) -> bool {
        c1 == c2
            || self.synonymy.contains(&(c1, c2))
            || (self.mutual_hypernymy_synonymy
                && self.hypernymy.contains(&(c1, c2))
                && self.hypernymy.contains(&(c2, c1)))
    }

    /// Direct edge `c1 -> c2` only: `c2` is a hypernym of `c1`.
    pub fn is_hypernym(&self, c1: ConceptId, c2: ConceptId) -> bool {
        self.hypernymy.contains(&(c1, c2))
    }

    pub fn concepts_related(&self, c1: ConceptId, c2: ConceptId, mode: RelationMode) -> bool {
        self.is_synonymous(c1, c2)
            || (mode == RelationMode::SynonymyHypernymy
                && (self.is_hypernym(c1, c2) || self.is_hypernym(c2, c1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationMode {
    Synonymy,
    SynonymyHypernymy,
}

/// Builds packs in memory; surface forms are normalized on insertion.
#[derive(Debug, Default)]
pub struct PackBuilder {
    name: String,
    concepts: Vec<String>,
    ids: FnvHashMap<String, ConceptId>,
    surface_index: FnvHashMap<String, Vec<ConceptId>>,
    synonymy: FnvHashSet<(ConceptId, ConceptId)>,
    hypernymy: FnvHashSet<(ConceptId, ConceptId)>,
    mutual: bool,
}

impl PackBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        PackBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    fn intern(&mut self, concept: &str) -> ConceptId {
        if let Some(id) = self.ids.get(concept) {
            return *id;
        }
        let id = ConceptId(self.concepts.len() as u32);
        self.concepts.push(concept.to_string());
        self.ids.insert(concept.to_string(), id);
        id
    }

    pub fn mutual_hypernymy_synonymy(mut self, flag: bool) -> Self {
        self.mutual = flag;
        self
    }

    pub fn label(mut self, surface: &str, concept: &str) -> Self {
        let id = self.intern(concept);
        let key = normalize(surface);
        if key.is_empty() {
            return self;
        }
        let ids = self.surface_index.entry(key).or_default();
        if !ids.contains(&id) {
            ids.push(id);
        }
        self
    }

    pub fn synonym(mut self, a: &str, b: &str) -> Self {
        let (a, b) = (self.intern(a), self.intern(b));
        if a != b {
            self.synonymy.insert((a, b));
            self.synonymy.insert((b, a));
        }
        self
    }

    pub fn hypernym(mut self, hyponym: &str, hypernym: &str) -> Self {
        let (a, b) = (self.intern(hyponym), self.intern(hypernym));
        self.hypernymy.insert((a, b));
        self
    }

    pub fn build(mut self) -> BackgroundPack {
        for ids in self.surface_index.values_mut() {
            ids.sort_unstable();
        }
        let mut anchored = vec![false; self.concepts.len()];
        for ids in self.surface_index.values() {
            for id in ids {
                anchored[id.index()] = true;
            }
        }
        let mut in_edges = vec![false; self.concepts.len()];
        for &(a, b) in self.synonymy.iter().chain(self.hypernymy.iter()) {
            in_edges[a.index()] = true;
            in_edges[b.index()] = true;
        }
        let orphans = in_edges
            .iter()
            .zip(&anchored)
            .filter(|(e, a)| **e && !**a)
            .count();
        BackgroundPack {
            name: self.name,
            concepts: self.concepts,
            ids: self.ids,
            surface_index: self.surface_index,
            synonymy: self.synonymy,
            hypernymy: self.hypernymy,
            mutual_hypernymy_synonymy: self.mutual,
            orphans,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn webisa_like() -> BackgroundPack {
        PackBuilder::new("webisa")
            .mutual_hypernymy_synonymy(true)
            .label("symposium", "c:symposium")
            .label("conference", "c:conference")
            .label("european union", "c:european_union")
            .label("major economic power", "c:major_economic_power")
            .hypernym("c:symposium", "c:conference")
            .hypernym("c:conference", "c:symposium")
            .hypernym("c:european_union", "c:major_economic_power")
            .build()
    }

    fn id(p: &BackgroundPack, n: &str) -> ConceptId {
        p.concept_id(n).unwrap()
    }

    #[test]
    fn synonymy_is_reflexive() {
        let p = webisa_like();
        let c = id(&p, "c:symposium");
        assert!(p.is_synonymous(c, c));
    }

    #[test]
    fn mutual_hypernyms_are_synonyms_when_flagged() {
        let p = webisa_like();
        assert!(p.is_synonymous(id(&p, "c:symposium"), id(&p, "c:conference")));
        // one direction only is not enough
        assert!(!p.is_synonymous(id(&p, "c:european_union"), id(&p, "c:major_economic_power")));
    }

    #[test]
    fn mutual_hypernyms_ignored_without_flag() {
        let p = PackBuilder::new("x")
            .hypernym("a", "b")
            .hypernym("b", "a")
            .build();
        assert!(!p.is_synonymous(id(&p, "a"), id(&p, "b")));
    }

    #[test]
    fn hypernym_direction_matters() {
        let p = webisa_like();
        let (eu, mep) = (id(&p, "c:european_union"), id(&p, "c:major_economic_power"));
        assert!(p.is_hypernym(eu, mep));
        assert!(!p.is_hypernym(mep, eu));
        assert!(!p.is_hypernym(eu, eu));
    }

    #[test]
    fn orphans_are_counted() {
        let p = PackBuilder::new("x").label("a", "A").synonym("A", "B").build();
        assert_eq!(p.orphan_count(), 1);
    }

    #[test]
    fn surface_forms_are_normalized() {
        let p = PackBuilder::new("x").label("European_Union", "eu").build();
        assert_eq!(p.lookup("european union").unwrap().len(), 1);
    }

    #[test]
    fn pack_directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut data = PackData::new("toy");
        data.mutual_hypernymy_synonymy = true;
        data.labels.insert(("car".into(), "c1".into()));
        data.synonymy.insert(("c1".into(), "c2".into()));
        data.hypernymy.insert(("c1".into(), "c3".into()));
        data.write_dir(dir.path()).unwrap();
        assert_eq!(PackData::read_dir(dir.path()).unwrap(), data);
        let p = BackgroundPack::load(dir.path()).unwrap();
        assert_eq!(p.name(), "toy");
        assert!(p.is_synonymous(id(&p, "c2"), id(&p, "c1")));
    }

    #[test]
    fn meta_requires_keys() {
        let dir = tempfile::tempdir().unwrap();
        PackData::new("x").write_dir(dir.path()).unwrap();
        fs::write(dir.path().join(META_FILE), "name=x\n").unwrap();
        let err = PackData::read_dir(dir.path()).unwrap_err();
        assert!(matches!(err, PackError::MissingKey { key: "mutual_hypernymy_synonymy", .. }));
    }

    #[test]
    fn malformed_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        PackData::new("x").write_dir(dir.path()).unwrap();
        fs::write(dir.path().join(LABELS_FILE), "car\tc1\nbroken\n").unwrap();
        match PackData::read_dir(dir.path()).unwrap_err() {
            PackError::Format { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    proptest! {
        #[test]
        fn synonymy_symmetric_and_reflexive(
            edges in proptest::collection::vec((0u8..8, 0u8..8), 0..20),
            hyp in proptest::collection::vec((0u8..8, 0u8..8), 0..20),
            mutual in any::<bool>(),
        ) {
            let mut b = PackBuilder::new("r").mutual_hypernymy_synonymy(mutual);
            for i in 0..8u8 {
                b = b.label(&format!("w{i}"), &format!("c{i}"));
            }
            for (x, y) in &edges {
                b = b.synonym(&format!("c{x}"), &format!("c{y}"));
            }
            for (x, y) in &hyp {
                b = b.hypernym(&format!("c{x}"), &format!("c{y}"));
            }
            let p = b.build();
            for i in 0..8u8 {
                let a = id(&p, &format!("c{i}"));
                prop_assert!(p.is_synonymous(a, a));
                for j in 0..8u8 {
                    let c = id(&p, &format!("c{j}"));
                    prop_assert_eq!(p.is_synonymous(a, c), p.is_synonymous(c, a));
                }
            }
        }
    }
}
