//! Turning triples into ontologies and background packs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::str::FromStr;

use super::ntriples::{Literal, Term, Triple};
use super::IngestError;
use crate::model::{Entity, Ontology};
use crate::store::{normalize, PackData};

pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";

/// Which predicates carry labels, synonyms and hypernyms in a source.
/// A predicate may serve more than one role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateProfile {
    pub name: String,
    pub label_predicates: BTreeSet<String>,
    pub synonym_predicates: BTreeSet<String>,
    pub hypernym_predicates: BTreeSet<String>,
    /// Whether packs built with this profile treat mutual hypernyms as synonyms.
    pub mutual_hypernymy_synonymy: bool,
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// The built-in profiles, by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinProfile {
    WordnetStyle,
    WikidataStyle,
    DbpediaStyle,
    WebisalodStyle,
}

impl BuiltinProfile {
    pub const ALL: [BuiltinProfile; 4] = [
        BuiltinProfile::WordnetStyle,
        BuiltinProfile::WikidataStyle,
        BuiltinProfile::DbpediaStyle,
        BuiltinProfile::WebisalodStyle,
    ];

    pub fn profile(self) -> PredicateProfile {
        match self {
            BuiltinProfile::WordnetStyle => PredicateProfile {
                name: self.to_string(),
                label_predicates: set(&[
                    RDFS_LABEL,
                    &format!("{SKOS}prefLabel"),
                    &format!("{SKOS}altLabel"),
                    "http://www.w3.org/ns/lemon/ontolex#writtenRep",
                ]),
                synonym_predicates: set(&[
                    OWL_SAME_AS,
                    &format!("{SKOS}exactMatch"),
                    "http://wordnet-rdf.princeton.edu/ontology#synonym",
                ]),
                hypernym_predicates: set(&[
                    &format!("{SKOS}broader"),
                    "http://wordnet-rdf.princeton.edu/ontology#hypernym",
                    "http://wordnet-rdf.princeton.edu/ontology#instance_hypernym",
                ]),
                mutual_hypernymy_synonymy: false,
            },
            BuiltinProfile::WikidataStyle => PredicateProfile {
                name: self.to_string(),
                label_predicates: set(&[RDFS_LABEL, &format!("{SKOS}altLabel")]),
                synonym_predicates: BTreeSet::new(),
                hypernym_predicates: set(&[
                    "http://www.wikidata.org/prop/direct/P31",
                    "http://www.wikidata.org/prop/direct/P279",
                ]),
                mutual_hypernymy_synonymy: false,
            },
            BuiltinProfile::DbpediaStyle => PredicateProfile {
                name: self.to_string(),
                label_predicates: set(&[
                    RDFS_LABEL,
                    "http://xmlns.com/foaf/0.1/name",
                    "http://dbpedia.org/ontology/alias",
                    "http://dbpedia.org/property/name",
                    "http://dbpedia.org/property/otherNames",
                ]),
                synonym_predicates: BTreeSet::new(),
                hypernym_predicates: set(&[RDF_TYPE, "http://dbpedia.org/ontology/type"]),
                mutual_hypernymy_synonymy: false,
            },
            BuiltinProfile::WebisalodStyle => PredicateProfile {
                name: self.to_string(),
                label_predicates: set(&[RDFS_LABEL, &format!("{SKOS}prefLabel")]),
                synonym_predicates: BTreeSet::new(),
                hypernym_predicates: set(&[&format!("{SKOS}broader")]),
                mutual_hypernymy_synonymy: true,
            },
        }
    }
}

impl fmt::Display for BuiltinProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuiltinProfile::WordnetStyle => "wordnet-style",
            BuiltinProfile::WikidataStyle => "wikidata-style",
            BuiltinProfile::DbpediaStyle => "dbpedia-style",
            BuiltinProfile::WebisalodStyle => "webisalod-style",
        })
    }
}

impl FromStr for BuiltinProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| {
                let names: Vec<String> = Self::ALL.iter().map(|p| p.to_string()).collect();
                format!("unknown profile `{s}` (expected one of {})", names.join(", "))
            })
    }
}

impl PredicateProfile {
    /// Only rdfs:label; the default for ontology inputs.
    pub fn rdfs_label() -> Self {
        PredicateProfile {
            name: "rdfs-label".into(),
            label_predicates: set(&[RDFS_LABEL]),
            synonym_predicates: BTreeSet::new(),
            hypernym_predicates: BTreeSet::new(),
            mutual_hypernymy_synonymy: false,
        }
    }
}

/// Untagged literals and tags starting with "en" are kept.
pub fn is_english(lit: &Literal) -> bool {
    match &lit.language {
        None => true,
        Some(tag) => tag.to_ascii_lowercase().starts_with("en"),
    }
}

/// Substring after the last '#' or '/'; falls back to the whole IRI.
pub fn local_name(iri: &str) -> &str {
    let trimmed = iri.trim_end_matches(['/', '#']);
    match trimmed.rfind(['#', '/']) {
        Some(i) if i + 1 < trimmed.len() => &trimmed[i + 1..],
        _ if !trimmed.is_empty() => trimmed,
        _ => iri,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractStats {
    pub blank_subjects_skipped: usize,
    pub non_english_labels_dropped: usize,
    pub fallback_labels: usize,
}

/// Every IRI subject becomes an entity. Labels are the English lexical forms
/// of the profile's label predicates; entities without one get their local
/// name. The result does not depend on triple order.
pub fn extract_ontology<I>(
    id: &str,
    triples: I,
    profile: &PredicateProfile,
) -> Result<(Ontology, ExtractStats), IngestError>
where
    I: IntoIterator<Item = Triple>,
{
    let mut stats = ExtractStats::default();
    let mut labels: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for t in triples {
        let Term::Iri(subject) = t.subject else {
            stats.blank_subjects_skipped += 1;
            continue;
        };
        let entry = labels.entry(subject).or_default();
        if !profile.label_predicates.contains(&t.predicate) {
            continue;
        }
        if let Term::Literal(lit) = &t.object {
            if !is_english(lit) {
                stats.non_english_labels_dropped += 1;
                continue;
            }
            let l = lit.lexical.trim();
            if !l.is_empty() {
                entry.insert(l.to_string());
            }
        }
    }
    let mut entities = Vec::with_capacity(labels.len());
    for (iri, ls) in labels {
        let e = if ls.is_empty() {
            stats.fallback_labels += 1;
            let name = local_name(&iri).to_string();
            Entity::new(iri, [name])?
        } else {
            Entity::new(iri, ls)?
        };
        entities.push(e);
    }
    Ok((Ontology::new(id, entities)?, stats))
}

/// Reads an ontology label file: `iri<TAB>label` per line, one line per
/// label. A line holding only an IRI declares an entity without a label,
/// which receives its local name. Empty lines and `#` comments are ignored.
pub fn read_label_tsv<R: Read>(id: &str, reader: R) -> Result<Ontology, IngestError> {
    let mut labels: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| IngestError::Io { context: "label file".into(), source: e })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (iri, label) = match line.split_once('\t') {
            Some((iri, label)) => (iri.trim(), label.trim()),
            None => (line.trim(), ""),
        };
        if iri.is_empty() {
            return Err(IngestError::Format {
                location: format!("line {}", i + 1),
                message: "empty IRI".into(),
            });
        }
        let set = labels.entry(iri.to_string()).or_default();
        if !label.is_empty() {
            set.insert(label.to_string());
        }
    }
    let entities = labels
        .into_iter()
        .map(|(iri, ls)| {
            if ls.is_empty() {
                let name = local_name(&iri).to_string();
                Entity::new(iri, [name])
            } else {
                Entity::new(iri, ls)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ontology::new(id, entities)?)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub triples: usize,
    pub blank_nodes_skipped: usize,
    pub literal_relation_objects_skipped: usize,
    pub non_english_labels_dropped: usize,
    pub fallback_labels: usize,
    pub shared_label_edges: usize,
}

/// Materializes a background pack from triples.
///
/// Synonymy comes from the profile's synonym predicates and from distinct
/// subjects sharing a normalized label; hypernymy from hypernym predicates
/// with IRI objects. Concepts that take part in an edge but carry no label
/// are indexed under their normalized local name.
pub fn build_pack<I>(name: &str, triples: I, profile: &PredicateProfile) -> (PackData, BuildStats)
where
    I: IntoIterator<Item = Triple>,
{
    let mut stats = BuildStats::default();
    let mut labels: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut data = PackData::new(name);
    data.mutual_hypernymy_synonymy = profile.mutual_hypernymy_synonymy;
    let mut edge_concepts: BTreeSet<String> = BTreeSet::new();

    for t in triples {
        stats.triples += 1;
        let Term::Iri(subject) = t.subject else {
            stats.blank_nodes_skipped += 1;
            continue;
        };
        let p = &t.predicate;
        if profile.label_predicates.contains(p) {
            if let Term::Literal(lit) = &t.object {
                if is_english(lit) {
                    let key = normalize(&lit.lexical);
                    if !key.is_empty() {
                        labels.entry(subject.clone()).or_default().insert(key);
                    }
                } else {
                    stats.non_english_labels_dropped += 1;
                }
            }
        }
        let is_syn = profile.synonym_predicates.contains(p);
        let is_hyp = profile.hypernym_predicates.contains(p);
        if !(is_syn || is_hyp) {
            continue;
        }
        match &t.object {
            Term::Iri(o) => {
                if is_syn && *o != subject {
                    let (a, b) = ordered(&subject, o);
                    data.synonymy.insert((a.to_string(), b.to_string()));
                }
                if is_hyp {
                    data.hypernymy.insert((subject.clone(), o.clone()));
                }
                edge_concepts.insert(subject.clone());
                edge_concepts.insert(o.clone());
            }
            Term::Blank(_) => stats.blank_nodes_skipped += 1,
            Term::Literal(_) => stats.literal_relation_objects_skipped += 1,
        }
    }

    for c in edge_concepts {
        if !labels.contains_key(&c) {
            let key = normalize(local_name(&c));
            if !key.is_empty() {
                stats.fallback_labels += 1;
                labels.entry(c).or_default().insert(key);
            }
        }
    }

    let mut by_surface: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (concept, forms) in &labels {
        for f in forms {
            data.labels.insert((f.clone(), concept.clone()));
            by_surface.entry(f).or_default().push(concept);
        }
    }
    for concepts in by_surface.values() {
        for (i, a) in concepts.iter().enumerate() {
            for b in &concepts[i + 1..] {
                let (x, y) = ordered(a, b);
                if data.synonymy.insert((x.to_string(), y.to_string())) {
                    stats.shared_label_edges += 1;
                }
            }
        }
    }
    (data, stats)
}

fn ordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
