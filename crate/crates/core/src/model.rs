//! Shared domain types: entities, ontologies, correspondences and alignments.

use std::collections::btree_map::{self, BTreeMap};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("entity IRI must not be empty")]
    EmptyIri,
    #[error("entity `{0}` has no non-empty label")]
    NoLabels(String),
    #[error("duplicate entity IRI `{0}` in ontology `{1}`")]
    DuplicateEntity(String, String),
    #[error("confidence {0} outside [0, 1]")]
    Confidence(f64),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
}

/// A schema element with its IRI and at least one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    iri: String,
    labels: Vec<String>,
}

impl Entity {
    /// Labels are trimmed; empty ones are dropped. At least one must remain.
    pub fn new<S: Into<String>>(
        iri: impl Into<String>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self, ModelError> {
        let iri = iri.into();
        if iri.trim().is_empty() {
            return Err(ModelError::EmptyIri);
        }
        let labels: Vec<String> = labels
            .into_iter()
            .map(Into::into)
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .collect();
        if labels.is_empty() {
            return Err(ModelError::NoLabels(iri));
        }
        Ok(Entity { iri, labels })
    }

    pub fn iri(&self) -> &str {
        &self.iri
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A set of entities with pairwise distinct IRIs, kept sorted by IRI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    id: String,
    entities: Vec<Entity>,
}

impl Ontology {
    pub fn new(id: impl Into<String>, mut entities: Vec<Entity>) -> Result<Self, ModelError> {
        let id = id.into();
        entities.sort_by(|a, b| a.iri.cmp(&b.iri));
        if let Some(w) = entities.windows(2).find(|w| w[0].iri == w[1].iri) {
            return Err(ModelError::DuplicateEntity(w[0].iri.clone(), id));
        }
        Ok(Ontology { id, entities })
    }

    pub fn empty(id: impl Into<String>) -> Self {
        Ontology {
            id: id.into(),
            entities: Vec::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn get(&self, iri: &str) -> Option<&Entity> {
        self.entities
            .binary_search_by(|e| e.iri.as_str().cmp(iri))
            .ok()
            .map(|i| &self.entities[i])
    }
}

/// Only equivalence is produced by the matcher; the enum leaves room for more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Equivalence,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equivalence => "=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Relation {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "=" | "equivalence" | "Equivalence" | "EQUIVALENCE" => Ok(Relation::Equivalence),
            other => Err(ModelError::UnknownRelation(other.to_string())),
        }
    }
}

/// Which step of the pipeline produced a correspondence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    String,
    FullLabel,
    LongestToken,
    Token,
    Embedding,
    /// Read from a file or otherwise produced outside the matcher.
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::String => "STRING",
            Provenance::FullLabel => "FULL_LABEL",
            Provenance::LongestToken => "LONGEST_TOKEN",
            Provenance::Token => "TOKEN",
            Provenance::Embedding => "EMBEDDING",
            Provenance::External => "EXTERNAL",
        };
        f.write_str(s)
    }
}

/// The identity of a correspondence. Confidence and provenance are not part of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrespondenceKey {
    pub source: String,
    pub target: String,
    pub relation: Relation,
}

#[derive(Debug, Clone)]
pub struct Correspondence {
    key: CorrespondenceKey,
    confidence: f64,
    provenance: Provenance,
}

impl Correspondence {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        relation: Relation,
        confidence: f64,
        provenance: Provenance,
    ) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(ModelError::Confidence(confidence));
        }
        Ok(Correspondence {
            key: CorrespondenceKey {
                source: source.into(),
                target: target.into(),
                relation,
            },
            confidence,
            provenance,
        })
    }

    /// Equivalence with full confidence; handy for fixtures and references.
    pub fn equivalence(source: impl Into<String>, target: impl Into<String>) -> Self {
        Correspondence {
            key: CorrespondenceKey {
                source: source.into(),
                target: target.into(),
                relation: Relation::Equivalence,
            },
            confidence: 1.0,
            provenance: Provenance::External,
        }
    }

    pub fn key(&self) -> &CorrespondenceKey {
        &self.key
    }

    pub fn source(&self) -> &str {
        &self.key.source
    }

    pub fn target(&self) -> &str {
        &self.key.target
    }

    pub fn relation(&self) -> Relation {
        self.key.relation
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

impl PartialEq for Correspondence {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Correspondence {}

impl std::hash::Hash for Correspondence {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

/// A set of correspondences keyed by (source, target, relation).
///
/// Iteration is ordered by key, so anything derived from an alignment is
/// deterministic. Re-inserting an existing key keeps the higher confidence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Alignment {
    cells: BTreeMap<CorrespondenceKey, Correspondence>,
    one_to_one: bool,
}

impl Alignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true when the key was not present before.
    pub fn insert(&mut self, c: Correspondence) -> bool {
        match self.cells.entry(c.key.clone()) {
            btree_map::Entry::Vacant(v) => {
                v.insert(c);
                true
            }
            btree_map::Entry::Occupied(mut o) => {
                if c.confidence > o.get().confidence {
                    o.insert(c);
                }
                false
            }
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, key: &CorrespondenceKey) -> bool {
        self.cells.contains_key(key)
    }

    pub fn contains_pair(&self, source: &str, target: &str) -> bool {
        self.cells.contains_key(&CorrespondenceKey {
            source: source.to_string(),
            target: target.to_string(),
            relation: Relation::Equivalence,
        })
    }

    pub fn get(&self, key: &CorrespondenceKey) -> Option<&Correspondence> {
        self.cells.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Correspondence> {
        self.cells.values()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CorrespondenceKey> {
        self.cells.keys()
    }

    pub fn is_one_to_one(&self) -> bool {
        self.one_to_one
    }

    /// Marks the alignment as asserting one-to-one cardinality. The flag is
    /// only a claim; [`validate_alignment`] checks it.
    pub fn set_one_to_one(&mut self, flag: bool) {
        self.one_to_one = flag;
    }

    /// Cells whose key is in both alignments; confidences come from `self`.
    pub fn intersection(&self, other: &Alignment) -> Alignment {
        self.filtered(|k| other.contains(k))
    }

    pub fn difference(&self, other: &Alignment) -> Alignment {
        self.filtered(|k| !other.contains(k))
    }

    pub fn union(&self, other: &Alignment) -> Alignment {
        let mut out = self.clone();
        out.one_to_one = false;
        out.extend(other.iter().cloned());
        out
    }

    fn filtered(&self, keep: impl Fn(&CorrespondenceKey) -> bool) -> Alignment {
        Alignment {
            cells: self
                .cells
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
            one_to_one: false,
        }
    }

    pub fn key_set(&self) -> BTreeSet<CorrespondenceKey> {
        self.cells.keys().cloned().collect()
    }
}

impl Extend<Correspondence> for Alignment {
    fn extend<T: IntoIterator<Item = Correspondence>>(&mut self, iter: T) {
        for c in iter {
            self.insert(c);
        }
    }
}

impl FromIterator<Correspondence> for Alignment {
    fn from_iter<T: IntoIterator<Item = Correspondence>>(iter: T) -> Self {
        let mut a = Alignment::new();
        a.extend(iter);
        a
    }
}

impl<'a> IntoIterator for &'a Alignment {
    type Item = &'a Correspondence;
    type IntoIter = btree_map::Values<'a, CorrespondenceKey, Correspondence>;

    fn into_iter(self) -> Self::IntoIter {
        self.cells.values()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ConfidenceOutOfRange { source: String, target: String, confidence: f64 },
    DuplicateSource { source: String, count: usize },
    DuplicateTarget { target: String, count: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConfidenceOutOfRange { source, target, confidence } => {
                write!(f, "confidence {confidence} of ({source}, {target}) outside [0, 1]")
            }
            Violation::DuplicateSource { source, count } => {
                write!(f, "source `{source}` appears in {count} correspondences")
            }
            Violation::DuplicateTarget { target, count } => {
                write!(f, "target `{target}` appears in {count} correspondences")
            }
        }
    }
}

/// Lists every invariant violation of `a`; with `one_to_one` set, repeated
/// sources and targets are violations too. An empty list means valid.
pub fn validate_alignment(a: &Alignment, one_to_one: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    for c in a.iter() {
        if !(0.0..=1.0).contains(&c.confidence) {
            out.push(Violation::ConfidenceOutOfRange {
                source: c.source().to_string(),
                target: c.target().to_string(),
                confidence: c.confidence,
            });
        }
    }
    if one_to_one {
        let mut sources: BTreeMap<&str, usize> = BTreeMap::new();
        let mut targets: BTreeMap<&str, usize> = BTreeMap::new();
        for c in a.iter() {
            *sources.entry(c.source()).or_default() += 1;
            *targets.entry(c.target()).or_default() += 1;
        }
        out.extend(sources.into_iter().filter(|(_, n)| *n > 1).map(|(s, count)| {
            Violation::DuplicateSource { source: s.to_string(), count }
        }));
        out.extend(targets.into_iter().filter(|(_, n)| *n > 1).map(|(t, count)| {
            Violation::DuplicateTarget { target: t.to_string(), count }
        }));
    }
    out
}

/// The exploitation strategy applied to the linked labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseStrategy {
    Synonymy,
    SynonymyHypernymy,
    Embedding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Single(BaseStrategy),
    /// A pair is a candidate if any pack finds evidence under the base strategy.
    Combination(BaseStrategy),
}

impl Strategy {
    pub const SYNONYMY: Strategy = Strategy::Single(BaseStrategy::Synonymy);
    pub const SYNONYMY_HYPERNYMY: Strategy = Strategy::Single(BaseStrategy::SynonymyHypernymy);
    pub const EMBEDDING: Strategy = Strategy::Single(BaseStrategy::Embedding);

    pub fn base(self) -> BaseStrategy {
        match self {
            Strategy::Single(b) | Strategy::Combination(b) => b,
        }
    }

    pub fn is_combination(self) -> bool {
        matches!(self, Strategy::Combination(_))
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base() {
            BaseStrategy::Synonymy => "syn",
            BaseStrategy::SynonymyHypernymy => "syn-hyp",
            BaseStrategy::Embedding => "embedding",
        };
        if self.is_combination() {
            write!(f, "combination-{base}")
        } else {
            f.write_str(base)
        }
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        let (combo, base) = match s.strip_prefix("combination-") {
            Some(rest) => (true, rest),
            None => (false, s.as_str()),
        };
        let base = match base {
            "syn" | "synonymy" => BaseStrategy::Synonymy,
            "syn-hyp" | "synonymy-hypernymy" => BaseStrategy::SynonymyHypernymy,
            "embedding" | "emb" | "rdf2vec" => BaseStrategy::Embedding,
            _ => return Err(format!("unknown strategy `{s}`")),
        };
        Ok(if combo {
            Strategy::Combination(base)
        } else {
            Strategy::Single(base)
        })
    }
}

/// Pair weights fed to Hungarian extraction, by the tier that linked the labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierConfidences {
    pub string: f64,
    pub full_label: f64,
    pub longest_token: f64,
    pub token: f64,
}

impl Default for TierConfidences {
    fn default() -> Self {
        TierConfidences {
            string: 1.0,
            full_label: 0.9,
            longest_token: 0.8,
            token: 0.7,
        }
    }
}

impl TierConfidences {
    pub fn for_provenance(&self, p: Provenance) -> f64 {
        match p {
            Provenance::String => self.string,
            Provenance::FullLabel => self.full_label,
            Provenance::LongestToken => self.longest_token,
            Provenance::Token => self.token,
            Provenance::Embedding | Provenance::External => 1.0,
        }
    }

    fn is_valid(&self) -> bool {
        let all = [self.string, self.full_label, self.longest_token, self.token];
        all.iter().all(|c| (0.0..=1.0).contains(c) && *c > 0.0)
            && self.string > self.full_label
            && self.full_label > self.longest_token
            && self.longest_token > self.token
    }
}

pub const DEFAULT_STOPWORDS: [&str; 6] = ["a", "an", "the", "of", "has", "is"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("embedding threshold {0} outside [-1, 1]")]
    Threshold(f64),
    #[error("tier confidences must lie in (0, 1] and be strictly ordered STRING > FULL_LABEL > LONGEST_TOKEN > TOKEN")]
    TierOrder,
    #[error("significance level {0} outside (0, 1)")]
    Alpha(f64),
    #[error("{0}")]
    Resources(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatcherConfig {
    pub strategy: Strategy,
    pub embedding_threshold: f64,
    pub tier_confidences: TierConfidences,
    pub stopwords: BTreeSet<String>,
    pub alpha: f64,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        MatcherConfig {
            strategy: Strategy::SYNONYMY,
            embedding_threshold: 0.7,
            tier_confidences: TierConfidences::default(),
            stopwords: DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect(),
            alpha: 0.05,
        }
    }
}

impl MatcherConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        MatcherConfig {
            strategy,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(-1.0..=1.0).contains(&self.embedding_threshold) {
            return Err(ConfigError::Threshold(self.embedding_threshold));
        }
        if !self.tier_confidences.is_valid() {
            return Err(ConfigError::TierOrder);
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::Alpha(self.alpha));
        }
        Ok(())
    }
}
