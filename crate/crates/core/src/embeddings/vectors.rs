//! Pre-trained concept vectors and the cosine-threshold predicate.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::store::{coverage_holds, BackgroundPack, LinkResult, LinkedSpan};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Immutable after load. Lookups are keyed by concept name as it appears in
/// the pack (the vector file's first column).
#[derive(Debug)]
pub struct EmbeddingStore {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
    zero_vector_hits: AtomicUsize,
}

impl EmbeddingStore {
    /// Panics if a vector has the wrong width or a non-finite component.
    pub fn from_vectors(dimension: usize, vectors: impl IntoIterator<Item = (String, Vec<f64>)>) -> Self {
        assert!(dimension > 0, "dimension must be positive");
        let vectors: HashMap<_, _> = vectors.into_iter().collect();
        for (k, v) in &vectors {
            assert_eq!(v.len(), dimension, "vector `{k}` has wrong width");
            assert!(v.iter().all(|x| x.is_finite()), "vector `{k}` is not finite");
        }
        EmbeddingStore {
            dimension,
            vectors,
            zero_vector_hits: AtomicUsize::new(0),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    /// Comparisons that involved a zero vector and were scored 0.
    pub fn zero_vector_hits(&self) -> usize {
        self.zero_vector_hits.load(Ordering::Relaxed)
    }

    /// `None` unless both tokens have vectors.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        let (u, v) = (self.get(a)?, self.get(b)?);
        match cosine_checked(u, v) {
            Some(c) => Some(c),
            None => {
                self.zero_vector_hits.fetch_add(1, Ordering::Relaxed);
                Some(0.0)
            }
        }
    }
}

pub fn load_vectors(path: &Path) -> Result<EmbeddingStore, EmbeddingError> {
    let file = File::open(path).map_err(|source| EmbeddingError::Io {
        context: path.display().to_string(),
        source,
    })?;
    read_vectors(file)
}

/// word2vec text format: a `count dim` header, then `token v1 .. vdim`.
pub fn read_vectors<R: Read>(reader: R) -> Result<EmbeddingStore, EmbeddingError> {
    let mut lines = BufReader::new(reader).lines();
    let io_err = |source| EmbeddingError::Io {
        context: "vector file".into(),
        source,
    };
    let fmt_err = |line, message: String| EmbeddingError::Format { line, message };

    let header = lines
        .next()
        .transpose()
        .map_err(io_err)?
        .ok_or_else(|| fmt_err(1, "missing `count dim` header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let (count, dim) = match parts.as_slice() {
        [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) if d > 0 => (c, d),
            _ => return Err(fmt_err(1, format!("invalid header `{header}`"))),
        },
        _ => return Err(fmt_err(1, format!("invalid header `{header}`"))),
    };

    let mut vectors = HashMap::with_capacity(count);
    let mut last = 1;
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        last = line_no;
        let mut it = line.split_whitespace();
        let token = it.next().unwrap_or_default().to_string();
        let mut v = Vec::with_capacity(dim);
        for raw in it {
            let x: f64 = raw
                .parse()
                .map_err(|_| fmt_err(line_no, format!("component `{raw}` is not a number")))?;
            if !x.is_finite() {
                return Err(fmt_err(line_no, format!("component `{raw}` is not finite")));
            }
            v.push(x);
        }
        if v.len() != dim {
            return Err(fmt_err(line_no, format!("expected {dim} components, found {}", v.len())));
        }
        if vectors.len() == count {
            return Err(fmt_err(line_no, format!("more rows than the {count} declared")));
        }
        if vectors.insert(token.clone(), v).is_some() {
            return Err(fmt_err(line_no, format!("duplicate token `{token}`")));
        }
    }
    if vectors.len() != count {
        return Err(fmt_err(
            last,
            format!("header declares {count} rows, file has {}", vectors.len()),
        ));
    }
    Ok(EmbeddingStore::from_vectors(dim, vectors))
}

/// Cosine similarity clamped to [-1, 1]; 0 when either vector is zero.
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    cosine_checked(u, v).unwrap_or(0.0)
}

fn cosine_checked(u: &[f64], v: &[f64]) -> Option<f64> {
    debug_assert_eq!(u.len(), v.len());
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return None;
    }
    Some((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Best cosine over the concept cross product of two spans, restricted to
/// concepts with vectors.
fn span_similarity(a: &LinkedSpan, b: &LinkedSpan, pack: &BackgroundPack, store: &EmbeddingStore) -> Option<f64> {
    let mut best: Option<f64> = None;
    for &c1 in &a.concepts {
        for &c2 in &b.concepts {
            if let Some(s) = store.similarity(pack.concept_name(c1), pack.concept_name(c2)) {
                best = Some(best.map_or(s, |m| m.max(s)));
            }
        }
    }
    best
}

/// True iff every span on both sides has a partner span whose best cosine
/// exceeds `t` strictly.
pub fn embedding_match(
    a: &LinkResult,
    b: &LinkResult,
    pack: &BackgroundPack,
    store: &EmbeddingStore,
    t: f64,
) -> bool {
    coverage_holds(a.spans(), b.spans(), |sa, sb| {
        span_similarity(sa, sb, pack, store).is_some_and(|s| s > t)
    })
}

/// The largest `t` for which [`embedding_match`] would still hold, as
/// a bottleneck score: `embedding_match(.., t)` is `score > t`. `None` if
/// some span has no partner with vectors.
pub fn embedding_score(a: &LinkResult, b: &LinkResult, pack: &BackgroundPack, store: &EmbeddingStore) -> Option<f64> {
    let (sa, sb) = (a.spans(), b.spans());
    if sa.is_empty() || sb.is_empty() {
        return None;
    }
    let sims: Vec<Vec<Option<f64>>> = sa
        .iter()
        .map(|x| sb.iter().map(|y| span_similarity(x, y, pack, store)).collect())
        .collect();
    let best = |it: &mut dyn Iterator<Item = Option<f64>>| it.flatten().reduce(f64::max);
    let mut score = f64::INFINITY;
    for row in &sims {
        score = score.min(best(&mut row.iter().copied())?);
    }
    for j in 0..sb.len() {
        score = score.min(best(&mut sims.iter().map(|row| row[j]))?);
    }
    Some(score)
}
