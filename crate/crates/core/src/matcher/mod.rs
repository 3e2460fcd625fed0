//! The matching pipeline: string pre-pass, linking, candidate scan and
//! one-to-one extraction.

mod hungarian;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::embeddings::{embedding_score, EmbeddingStore};
use crate::model::{
    validate_alignment, Alignment, BaseStrategy, ConfigError, Correspondence, Entity, MatcherConfig, Ontology,
    Provenance, Relation, TierConfidences,
};
use crate::store::{link, links_related, normalize, BackgroundPack, LabelAnalyzer, LinkResult, LinkTier, RelationMode};

pub use hungarian::{max_weight_assignment, quantize};

/// Smallest weight given to an accepted embedding pair, so that thresholds
/// at or below zero still produce selectable cells.
pub const MIN_EMBEDDING_WEIGHT: f64 = 1e-9;

/// Dense n x m pair weights; 0 means "not a candidate".
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGrid {
    sources: Vec<String>,
    targets: Vec<String>,
    weights: Vec<f64>,
    provenance: Vec<Provenance>,
}

impl CandidateGrid {
    /// Panics on duplicate IRIs within `sources` or within `targets`.
    pub fn new(sources: Vec<String>, targets: Vec<String>) -> Self {
        let distinct = |v: &[String]| v.iter().collect::<BTreeSet<_>>().len() == v.len();
        assert!(distinct(&sources) && distinct(&targets), "duplicate IRI in candidate grid");
        let cells = sources.len() * targets.len();
        CandidateGrid {
            sources,
            targets,
            weights: vec![0.0; cells],
            provenance: vec![Provenance::External; cells],
        }
    }

    pub fn from_rows(sources: Vec<String>, targets: Vec<String>, rows: &[Vec<f64>]) -> Self {
        let mut g = CandidateGrid::new(sources, targets);
        assert_eq!(rows.len(), g.sources.len());
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), g.targets.len());
            for (j, &w) in row.iter().enumerate() {
                g.set(i, j, w, Provenance::External);
            }
        }
        g
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.targets.len() + j]
    }

    pub fn provenance(&self, i: usize, j: usize) -> Provenance {
        self.provenance[i * self.targets.len() + j]
    }

    /// Panics unless `w` is finite and in [0, 1].
    pub fn set(&mut self, i: usize, j: usize, w: f64, p: Provenance) {
        assert!(w.is_finite() && (0.0..=1.0).contains(&w), "weight {w} outside [0, 1]");
        let k = i * self.targets.len() + j;
        self.weights[k] = w;
        self.provenance[k] = p;
    }

    /// (source, target) of every positive cell.
    pub fn candidate_pairs(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        for (i, s) in self.sources.iter().enumerate() {
            for (j, t) in self.targets.iter().enumerate() {
                if self.weight(i, j) > 0.0 {
                    out.insert((s.clone(), t.clone()));
                }
            }
        }
        out
    }
}

/// One-to-one extraction. Ties go to the lexicographically smallest set of
/// (source IRI, target IRI) pairs.
pub fn hungarian_extract(grid: &CandidateGrid) -> Alignment {
    let mut rows: Vec<usize> = (0..grid.sources.len()).collect();
    let mut cols: Vec<usize> = (0..grid.targets.len()).collect();
    rows.sort_by(|&a, &b| grid.sources[a].cmp(&grid.sources[b]));
    cols.sort_by(|&a, &b| grid.targets[a].cmp(&grid.targets[b]));
    let mut w = Vec::with_capacity(rows.len() * cols.len());
    for &r in &rows {
        for &c in &cols {
            w.push(grid.weight(r, c));
        }
    }
    let mut out = Alignment::new();
    for (r, c) in max_weight_assignment(rows.len(), cols.len(), &w) {
        let (i, j) = (rows[r], cols[c]);
        let cell = Correspondence::new(
            grid.sources[i].clone(),
            grid.targets[j].clone(),
            Relation::Equivalence,
            grid.weight(i, j),
            grid.provenance(i, j),
        )
        .expect("grid weights are validated on insertion");
        out.insert(cell);
    }
    out.set_one_to_one(true);
    out
}

/// Every cross pair sharing a normalized label, at confidence 1.0. May be
/// many-to-many.
pub fn string_match(o1: &Ontology, o2: &Ontology) -> Alignment {
    let mut by_label: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for e in o1.entities() {
        for l in e.labels() {
            let n = normalize(l);
            if !n.is_empty() {
                by_label.entry(n).or_default().push(e.iri());
            }
        }
    }
    let mut out = Alignment::new();
    for e in o2.entities() {
        for l in e.labels() {
            if let Some(sources) = by_label.get(&normalize(l)) {
                for s in sources {
                    let c = Correspondence::new(*s, e.iri(), Relation::Equivalence, 1.0, Provenance::String)
                        .expect("constant confidence");
                    out.insert(c);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchStats {
    /// Cross pairs evaluated by the strategy (after the string pre-pass).
    pub pairs_scanned: usize,
    pub string_matches: usize,
    /// String matches kept after reducing them to one-to-one.
    pub string_matches_kept: usize,
    pub candidates: usize,
    pub extracted: usize,
    pub full_label_links: usize,
    pub longest_token_links: usize,
    pub token_links: usize,
    pub unlinked_labels: usize,
}

#[derive(Debug, Clone)]
pub struct MatchOutput {
    pub alignment: Alignment,
    pub stats: MatchStats,
}

/// Checks pack/store counts against the strategy before any work is done.
pub fn check_resources(cfg: &MatcherConfig, packs: &[BackgroundPack], stores: &[EmbeddingStore]) -> Result<(), ConfigError> {
    cfg.validate()?;
    let s = cfg.strategy;
    if packs.is_empty() {
        return Err(ConfigError::Resources(format!("strategy `{s}` needs at least one background pack")));
    }
    if !s.is_combination() && packs.len() != 1 {
        return Err(ConfigError::Resources(format!(
            "strategy `{s}` uses exactly one background pack, {} given; use `combination-{s}` for several",
            packs.len()
        )));
    }
    let embedding = s.base() == BaseStrategy::Embedding;
    if embedding && stores.len() != packs.len() {
        return Err(ConfigError::Resources(format!(
            "strategy `{s}` needs one vector file per pack: {} packs, {} vector files",
            packs.len(),
            stores.len()
        )));
    }
    if !embedding && !stores.is_empty() {
        return Err(ConfigError::Resources(format!("strategy `{s}` does not use vector files")));
    }
    Ok(())
}

/// Per-label normalized form and link into one pack.
type LinkedLabels = Vec<(String, Option<LinkResult>)>;

fn link_entities(entities: &[&Entity], pack: &BackgroundPack, analyzer: &LabelAnalyzer) -> Vec<LinkedLabels> {
    entities
        .par_iter()
        .map(|e| e.labels().iter().map(|l| (normalize(l), link(l, pack, analyzer))).collect())
        .collect()
}

fn weaker(a: LinkTier, b: LinkTier) -> LinkTier {
    a.max(b)
}

fn explicit_evidence(
    l1: &LinkedLabels,
    l2: &LinkedLabels,
    pack: &BackgroundPack,
    mode: RelationMode,
    tiers: &TierConfidences,
) -> Option<(f64, Provenance)> {
    let mut best: Option<(f64, Provenance)> = None;
    for (n1, k1) in l1 {
        for (n2, k2) in l2 {
            let hit = if !n1.is_empty() && n1 == n2 {
                Some(Provenance::String)
            } else {
                match (k1, k2) {
                    (Some(a), Some(b)) if links_related(a, b, pack, mode) => {
                        Some(weaker(a.tier(), b.tier()).provenance())
                    }
                    _ => None,
                }
            };
            if let Some(p) = hit {
                let w = tiers.for_provenance(p);
                if best.is_none_or(|(bw, _)| w > bw) {
                    best = Some((w, p));
                }
            }
        }
    }
    best
}

fn embedding_evidence(
    l1: &LinkedLabels,
    l2: &LinkedLabels,
    pack: &BackgroundPack,
    store: &EmbeddingStore,
    t: f64,
) -> Option<(f64, Provenance)> {
    let mut best: Option<f64> = None;
    for (_, k1) in l1 {
        for (_, k2) in l2 {
            if let (Some(a), Some(b)) = (k1, k2) {
                if let Some(s) = embedding_score(a, b, pack, store).filter(|&s| s > t) {
                    best = Some(best.map_or(s, |m| m.max(s)));
                }
            }
        }
    }
    best.map(|s| (s.clamp(MIN_EMBEDDING_WEIGHT, 1.0), Provenance::Embedding))
}

fn scan(
    sources: &[&Entity],
    targets: &[&Entity],
    packs: &[BackgroundPack],
    stores: &[EmbeddingStore],
    cfg: &MatcherConfig,
    stats: &mut MatchStats,
) -> CandidateGrid {
    let analyzer = LabelAnalyzer::new(cfg.stopwords.iter().cloned());
    let mut grid = CandidateGrid::new(
        sources.iter().map(|e| e.iri().to_string()).collect(),
        targets.iter().map(|e| e.iri().to_string()).collect(),
    );
    stats.pairs_scanned += sources.len() * targets.len();
    if sources.is_empty() || targets.is_empty() {
        return grid;
    }
    let base = cfg.strategy.base();
    let mode = match base {
        BaseStrategy::SynonymyHypernymy => RelationMode::SynonymyHypernymy,
        _ => RelationMode::Synonymy,
    };

    // Best evidence per cell across packs; rows evaluated in parallel.
    let mut best: Vec<Option<(f64, Provenance)>> = vec![None; sources.len() * targets.len()];
    for (k, pack) in packs.iter().enumerate() {
        let ls = link_entities(sources, pack, &analyzer);
        let lt = link_entities(targets, pack, &analyzer);
        for links in ls.iter().chain(lt.iter()) {
            for (_, l) in links {
                match l.as_ref().map(LinkResult::tier) {
                    Some(LinkTier::FullLabel) => stats.full_label_links += 1,
                    Some(LinkTier::LongestToken) => stats.longest_token_links += 1,
                    Some(LinkTier::Token) => stats.token_links += 1,
                    None => stats.unlinked_labels += 1,
                }
            }
        }
        best.par_chunks_mut(targets.len()).zip(ls.par_iter()).for_each(|(row, l1)| {
            for (cell, l2) in row.iter_mut().zip(&lt) {
                let ev = match base {
                    BaseStrategy::Embedding => {
                        embedding_evidence(l1, l2, pack, &stores[k], cfg.embedding_threshold)
                    }
                    _ => explicit_evidence(l1, l2, pack, mode, &cfg.tier_confidences),
                };
                if let Some((w, p)) = ev {
                    if cell.is_none_or(|(bw, _)| w > bw) {
                        *cell = Some((w, p));
                    }
                }
            }
        });
    }
    for (k, cell) in best.into_iter().enumerate() {
        if let Some((w, p)) = cell {
            grid.set(k / targets.len(), k % targets.len(), w, p);
            stats.candidates += 1;
        }
    }
    grid
}

/// Candidate grid over the full cross product, without the string pre-pass.
pub fn candidate_grid(
    o1: &Ontology,
    o2: &Ontology,
    packs: &[BackgroundPack],
    stores: &[EmbeddingStore],
    cfg: &MatcherConfig,
) -> Result<CandidateGrid, ConfigError> {
    check_resources(cfg, packs, stores)?;
    let s: Vec<&Entity> = o1.entities().iter().collect();
    let t: Vec<&Entity> = o2.entities().iter().collect();
    Ok(scan(&s, &t, packs, stores, cfg, &mut MatchStats::default()))
}

/// Runs the full pipeline. String matches are fixed first (reduced to
/// one-to-one if needed) and their entities leave the scan, so they are never
/// displaced by strategy candidates.
pub fn run_match(
    o1: &Ontology,
    o2: &Ontology,
    packs: &[BackgroundPack],
    stores: &[EmbeddingStore],
    cfg: &MatcherConfig,
) -> Result<MatchOutput, ConfigError> {
    check_resources(cfg, packs, stores)?;
    let mut stats = MatchStats::default();

    let strings = string_match(o1, o2);
    stats.string_matches = strings.len();
    let fixed = if validate_alignment(&strings, true).is_empty() {
        strings
    } else {
        let sources: BTreeSet<&str> = strings.iter().map(|c| c.source()).collect();
        let targets: BTreeSet<&str> = strings.iter().map(|c| c.target()).collect();
        let sources: Vec<String> = sources.into_iter().map(String::from).collect();
        let targets: Vec<String> = targets.into_iter().map(String::from).collect();
        let mut g = CandidateGrid::new(sources, targets);
        for (i, s) in g.sources.clone().iter().enumerate() {
            for (j, t) in g.targets.clone().iter().enumerate() {
                if strings.contains_pair(s, t) {
                    g.set(i, j, 1.0, Provenance::String);
                }
            }
        }
        hungarian_extract(&g)
    };
    stats.string_matches_kept = fixed.len();

    let used_s: BTreeSet<&str> = fixed.iter().map(|c| c.source()).collect();
    let used_t: BTreeSet<&str> = fixed.iter().map(|c| c.target()).collect();
    let sources: Vec<&Entity> = o1.entities().iter().filter(|e| !used_s.contains(e.iri())).collect();
    let targets: Vec<&Entity> = o2.entities().iter().filter(|e| !used_t.contains(e.iri())).collect();
    let grid = scan(&sources, &targets, packs, stores, cfg, &mut stats);

    let mut alignment = hungarian_extract(&grid);
    alignment.extend(fixed.iter().cloned());
    alignment.set_one_to_one(true);
    stats.extracted = alignment.len();
    debug_assert!(validate_alignment(&alignment, true).is_empty());
    Ok(MatchOutput { alignment, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Strategy;
    use crate::store::PackBuilder;

    fn onto(id: &str, entities: &[(&str, &[&str])]) -> Ontology {
        Ontology::new(
            id,
            entities
                .iter()
                .map(|(iri, labels)| Entity::new(*iri, labels.iter().map(|l| l.to_string()).collect::<Vec<_>>()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn string_match_normalizes() {
        let o1 = onto("a", &[("a#1", &["Match"]), ("a#2", &["conference"])]);
        let o2 = onto("b", &[("b#1", &["match"]), ("b#2", &["conference dinner"])]);
        let s = string_match(&o1, &o2);
        assert_eq!(s.len(), 1);
        assert!(s.contains_pair("a#1", "b#1"));
        assert!(string_match(&o1, &onto("c", &[("c#1", &["zzz"])])).is_empty());
    }

    fn pack() -> BackgroundPack {
        PackBuilder::new("p")
            .label("person", "Person")
            .label("individual", "Person")
            .label("conference", "Conf")
            .label("banquet", "Banquet")
            .label("dinner", "Dinner")
            .synonym("Banquet", "Dinner")
            .build()
    }

    #[test]
    fn person_individual() {
        let o1 = onto("a", &[("a#p", &["person"])]);
        let o2 = onto("b", &[("b#i", &["individual"])]);
        let out = run_match(&o1, &o2, &[pack()], &[], &MatcherConfig::default()).unwrap();
        let c = out.alignment.iter().next().unwrap();
        assert_eq!((c.source(), c.target()), ("a#p", "b#i"));
        assert_eq!(c.provenance(), Provenance::FullLabel);
        assert_eq!(c.confidence(), 0.9);
    }

    #[test]
    fn banquet_dinner_via_longest_token() {
        let o1 = onto("a", &[("a#cb", &["conference banquet"])]);
        let o2 = onto("b", &[("b#cd", &["conference dinner"])]);
        let out = run_match(&o1, &o2, &[pack()], &[], &MatcherConfig::default()).unwrap();
        let c = out.alignment.iter().next().unwrap();
        assert_eq!(c.provenance(), Provenance::LongestToken);
        assert_eq!(out.stats.longest_token_links, 2);
    }

    #[test]
    fn empty_target_gives_empty_alignment() {
        let o1 = onto("a", &[("a#p", &["person"])]);
        let out = run_match(&o1, &Ontology::empty("b"), &[pack()], &[], &MatcherConfig::default()).unwrap();
        assert!(out.alignment.is_empty());
    }

    #[test]
    fn string_matches_are_not_displaced() {
        // a#1-b#1 share a label; the two synonym cells would outweigh it.
        let p = PackBuilder::new("p")
            .label("x", "X")
            .label("y", "X")
            .label("z", "X")
            .build();
        let o1 = onto("a", &[("a#1", &["x"]), ("a#2", &["z"])]);
        let o2 = onto("b", &[("b#1", &["x"]), ("b#2", &["y"])]);
        let out = run_match(&o1, &o2, &[p], &[], &MatcherConfig::default()).unwrap();
        assert!(out.alignment.contains_pair("a#1", "b#1"));
        assert!(out.alignment.contains_pair("a#2", "b#2"));
    }

    #[test]
    fn many_to_many_string_matches_are_reduced() {
        let o1 = onto("a", &[("a#1", &["x"]), ("a#2", &["x"])]);
        let o2 = onto("b", &[("b#1", &["x"])]);
        let out = run_match(&o1, &o2, &[pack()], &[], &MatcherConfig::default()).unwrap();
        assert_eq!(out.alignment.len(), 1);
        assert!(out.alignment.contains_pair("a#1", "b#1"));
        assert_eq!(out.stats.string_matches, 2);
        assert_eq!(out.stats.string_matches_kept, 1);
    }

    #[test]
    fn resource_checks() {
        let cfg = MatcherConfig::default();
        assert!(matches!(check_resources(&cfg, &[], &[]), Err(ConfigError::Resources(_))));
        assert!(check_resources(&cfg, &[pack(), pack()], &[]).is_err());
        let combo = MatcherConfig::with_strategy(Strategy::Combination(BaseStrategy::Synonymy));
        assert!(check_resources(&combo, &[pack(), pack()], &[]).is_ok());
        let emb = MatcherConfig::with_strategy(Strategy::EMBEDDING);
        assert!(check_resources(&emb, &[pack()], &[]).is_err());
    }

    #[test]
    fn grid_extraction_uses_iris_for_ties() {
        let g = CandidateGrid::from_rows(
            vec!["s2".into(), "s1".into()],
            vec!["t2".into(), "t1".into()],
            &[vec![1.0, 1.0], vec![1.0, 1.0]],
        );
        let a = hungarian_extract(&g);
        assert!(a.contains_pair("s1", "t1") && a.contains_pair("s2", "t2"));
    }
}
