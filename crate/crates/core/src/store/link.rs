//! Three-tier linking of labels into a pack, and the label-level relation
//! predicates built on top of it.

use std::fmt;

use super::pack::{BackgroundPack, ConceptId, RelationMode};
use super::text::{normalize, LabelAnalyzer};
use crate::model::Provenance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkTier {
    FullLabel,
    LongestToken,
    Token,
}

impl LinkTier {
    pub fn provenance(self) -> Provenance {
        match self {
            LinkTier::FullLabel => Provenance::FullLabel,
            LinkTier::LongestToken => Provenance::LongestToken,
            LinkTier::Token => Provenance::Token,
        }
    }
}

impl fmt::Display for LinkTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.provenance(), f)
    }
}

/// A piece of the label that resolved to one or more concepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkedSpan {
    pub text: String,
    pub concepts: Vec<ConceptId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkResult {
    spans: Vec<LinkedSpan>,
    tier: LinkTier,
    unlinked_tokens: Vec<String>,
}

impl LinkResult {
    pub fn tier(&self) -> LinkTier {
        self.tier
    }

    pub fn spans(&self) -> &[LinkedSpan] {
        &self.spans
    }

    /// One concept set per linked sub-span.
    pub fn concepts(&self) -> impl Iterator<Item = &[ConceptId]> {
        self.spans.iter().map(|s| s.concepts.as_slice())
    }

    pub fn unlinked_tokens(&self) -> &[String] {
        &self.unlinked_tokens
    }
}

/// Index lookups performed per tier; lets callers observe which tiers ran.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkTrace {
    pub full_label_lookups: usize,
    pub longest_token_lookups: usize,
    pub token_lookups: usize,
}

pub fn link(label: &str, pack: &BackgroundPack, analyzer: &LabelAnalyzer) -> Option<LinkResult> {
    link_traced(label, pack, analyzer, &mut LinkTrace::default())
}

pub fn link_traced(
    label: &str,
    pack: &BackgroundPack,
    analyzer: &LabelAnalyzer,
    trace: &mut LinkTrace,
) -> Option<LinkResult> {
    let full = normalize(label);
    if full.is_empty() {
        return None;
    }
    trace.full_label_lookups += 1;
    if let Some(ids) = pack.lookup(&full) {
        return Some(LinkResult {
            spans: vec![LinkedSpan {
                text: full,
                concepts: ids.to_vec(),
            }],
            tier: LinkTier::FullLabel,
            unlinked_tokens: Vec::new(),
        });
    }

    let tokens = analyzer.tokenize(label);
    if let Some(spans) = longest_token_cover(&tokens, pack, trace) {
        return Some(LinkResult {
            spans,
            tier: LinkTier::LongestToken,
            unlinked_tokens: Vec::new(),
        });
    }

    let mut spans = Vec::new();
    let mut unlinked = Vec::new();
    for t in &tokens {
        trace.token_lookups += 1;
        match pack.lookup(t) {
            Some(ids) => spans.push(LinkedSpan {
                text: t.clone(),
                concepts: ids.to_vec(),
            }),
            None => unlinked.push(t.clone()),
        }
    }
    if spans.is_empty() {
        return None;
    }
    Some(LinkResult {
        spans,
        tier: LinkTier::Token,
        unlinked_tokens: unlinked,
    })
}

/// Greedy left-anchored segmentation: from the current position, try the
/// remaining tokens truncated from the right until a prefix links, consume
/// it and continue. Fails unless every token ends up in a linked span.
fn longest_token_cover(
    tokens: &[String],
    pack: &BackgroundPack,
    trace: &mut LinkTrace,
) -> Option<Vec<LinkedSpan>> {
    let mut spans = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        let mut hit = None;
        for end in (pos + 1..=tokens.len()).rev() {
            let candidate = tokens[pos..end].join(" ");
            trace.longest_token_lookups += 1;
            if let Some(ids) = pack.lookup(&candidate) {
                hit = Some((end, candidate, ids.to_vec()));
                break;
            }
        }
        let (end, text, concepts) = hit?;
        spans.push(LinkedSpan { text, concepts });
        pos = end;
    }
    if spans.is_empty() {
        None
    } else {
        Some(spans)
    }
}

/// Bidirectional coverage: every span on each side needs a partner span on
/// the other side for which `partner` holds.
pub fn coverage_holds<F>(a: &[LinkedSpan], b: &[LinkedSpan], partner: F) -> bool
where
    F: Fn(&LinkedSpan, &LinkedSpan) -> bool,
{
    if a.is_empty() || b.is_empty() {
        return false;
    }
    let mut b_covered = vec![false; b.len()];
    for sa in a {
        let mut found = false;
        for (j, sb) in b.iter().enumerate() {
            if partner(sa, sb) {
                found = true;
                b_covered[j] = true;
            }
        }
        if !found {
            return false;
        }
    }
    b_covered.into_iter().all(|c| c)
}

/// Relation test between two already-linked labels.
pub fn links_related(a: &LinkResult, b: &LinkResult, pack: &BackgroundPack, mode: RelationMode) -> bool {
    coverage_holds(&a.spans, &b.spans, |sa, sb| {
        sa.concepts
            .iter()
            .any(|&c1| sb.concepts.iter().any(|&c2| pack.concepts_related(c1, c2, mode)))
    })
}

/// Lifts the concept predicates to labels. Labels with the same normalized
/// form are always related.
pub fn labels_related(
    l1: &str,
    l2: &str,
    pack: &BackgroundPack,
    analyzer: &LabelAnalyzer,
    mode: RelationMode,
) -> bool {
    let n1 = normalize(l1);
    if !n1.is_empty() && n1 == normalize(l2) {
        return true;
    }
    match (link(l1, pack, analyzer), link(l2, pack, analyzer)) {
        (Some(a), Some(b)) => links_related(&a, &b, pack, mode),
        _ => false,
    }
}
