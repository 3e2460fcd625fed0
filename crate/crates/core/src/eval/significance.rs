//! McNemar's test between two alignments and the aggregate views built on it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::model::Alignment;

/// Below this many discordant cells the exact test is used.
pub const EXACT_TEST_LIMIT: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("configuration `{config}` has {found} test cases, expected {expected}")]
    TestcaseMismatch {
        config: String,
        expected: usize,
        found: usize,
    },
    #[error("no alignments for source `{pack}` with strategy `{strategy}`")]
    MissingRun { pack: String, strategy: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContingencyCounts {
    pub n01: usize,
    pub n10: usize,
}

impl ContingencyCounts {
    pub fn n(&self) -> usize {
        self.n01 + self.n10
    }

    pub fn swapped(self) -> Self {
        ContingencyCounts {
            n01: self.n10,
            n10: self.n01,
        }
    }
}

/// n01 = |(A2 ∩ R) − A1| + |A1 − A2 − R|, n10 = |(A1 ∩ R) − A2| + |A2 − A1 − R|.
pub fn mcnemar_counts(a1: &Alignment, a2: &Alignment, r: &Alignment) -> ContingencyCounts {
    let n01 = a2.keys().filter(|k| r.contains(k) && !a1.contains(k)).count()
        + a1.keys().filter(|k| !a2.contains(k) && !r.contains(k)).count();
    let n10 = a1.keys().filter(|k| r.contains(k) && !a2.contains(k)).count()
        + a2.keys().filter(|k| !a1.contains(k) && !r.contains(k)).count();
    ContingencyCounts { n01, n10 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignificanceTest {
    AsymptoticCc,
    Exact,
}

/// Tail of the exact test.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ExactTail {
    /// Upper tail from n01, as in the formula.
    #[default]
    OneSided,
    /// Twice the upper tail, capped at 1.
    Doubled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceResult {
    pub test: SignificanceTest,
    /// χ² with continuity correction; `None` for the exact test.
    pub statistic: Option<f64>,
    pub p_value: f64,
    pub significant: bool,
}

/// P(X >= k) for X ~ Binomial(n, 1/2).
fn binomial_upper_tail(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut pmf = 0.5f64.powi(n as i32);
    let mut tail = 0.0;
    for x in 0..=n {
        if x >= k {
            tail += pmf;
        }
        pmf *= (n - x) as f64 / (x + 1) as f64;
    }
    tail.min(1.0)
}

pub fn mcnemar_test(counts: ContingencyCounts, alpha: f64, tail: ExactTail) -> SignificanceResult {
    let n = counts.n();
    if n < EXACT_TEST_LIMIT {
        let mut p = if n == 0 { 1.0 } else { binomial_upper_tail(n, counts.n01) };
        if tail == ExactTail::Doubled {
            p = (2.0 * p).min(1.0);
        }
        return SignificanceResult {
            test: SignificanceTest::Exact,
            statistic: None,
            p_value: p,
            significant: p < alpha,
        };
    }
    let diff = counts.n01.abs_diff(counts.n10) as f64;
    let chi2 = (diff - 1.0).powi(2) / n as f64;
    // χ²(1) survival: P(Z² > x) = erfc(sqrt(x / 2)).
    let p = libm::erfc((chi2 / 2.0).sqrt()).clamp(0.0, 1.0);
    SignificanceResult {
        test: SignificanceTest::AsymptoticCc,
        statistic: Some(chi2),
        p_value: p,
        significant: p < alpha,
    }
}

/// Symmetric significance between two alignments: the exact test's one-sided
/// tail is taken in the direction of the larger discordant count, so the
/// answer does not depend on argument order.
pub fn significant_difference(a1: &Alignment, a2: &Alignment, r: &Alignment, alpha: f64, tail: ExactTail) -> bool {
    let c = mcnemar_counts(a1, a2, r);
    let oriented = if c.n01 >= c.n10 { c } else { c.swapped() };
    mcnemar_test(oriented, alpha, tail).significant
}

/// Pairwise counts of significantly different test cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignificanceMatrix {
    pub names: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

/// `runs[i]` holds configuration i's alignments, one per test case, in the
/// same order as `refs`.
pub fn significance_matrix(
    runs: &[(String, Vec<Alignment>)],
    refs: &[Alignment],
    alpha: f64,
    tail: ExactTail,
) -> Result<SignificanceMatrix, EvalError> {
    for (name, list) in runs {
        if list.len() != refs.len() {
            return Err(EvalError::TestcaseMismatch {
                config: name.clone(),
                expected: refs.len(),
                found: list.len(),
            });
        }
    }
    let k = runs.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let cells: Vec<usize> = pairs
        .par_iter()
        .map(|&(i, j)| {
            (0..refs.len())
                .filter(|&tc| significant_difference(&runs[i].1[tc], &runs[j].1[tc], &refs[tc], alpha, tail))
                .count()
        })
        .collect();
    let mut counts = vec![vec![0; k]; k];
    for (&(i, j), &c) in pairs.iter().zip(&cells) {
        counts[i][j] = c;
        counts[j][i] = c;
    }
    Ok(SignificanceMatrix {
        names: runs.iter().map(|(n, _)| n.clone()).collect(),
        counts,
    })
}

/// Denominator of the source impact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SourceDenominator {
    /// |TC|·|BK|² − |TC|·|BK|, mirroring the strategy impact.
    #[default]
    Symmetric,
    /// |TC|·|BK|² − |BK|·|S|.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ImpactReport {
    pub impact_strategy: f64,
    pub impact_source: f64,
    /// Population standard deviation over sources.
    pub std_strategy: f64,
    /// Population standard deviation over strategies.
    pub std_source: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn share(hits: usize, den: i64) -> f64 {
    if den <= 0 {
        0.0
    } else {
        hits as f64 / den as f64
    }
}

/// `sig((bk1, s1), (bk2, s2), tc)` tells whether the alignments of two
/// configurations differ significantly on a test case. Identical
/// configurations are never compared.
pub fn impact<F>(n_sources: usize, n_strategies: usize, n_testcases: usize, sig: F, denominator: SourceDenominator) -> ImpactReport
where
    F: Fn((usize, usize), (usize, usize), usize) -> bool,
{
    let (bk, s, tc) = (n_sources as i64, n_strategies as i64, n_testcases as i64);

    let per_source: Vec<f64> = (0..n_sources)
        .map(|b| {
            let mut hits = 0;
            for t in 0..n_testcases {
                for s1 in 0..n_strategies {
                    for s2 in (0..n_strategies).filter(|&s2| s2 != s1) {
                        hits += usize::from(sig((b, s1), (b, s2), t));
                    }
                }
            }
            share(hits, tc * s * s - tc * s)
        })
        .collect();

    let source_den = match denominator {
        SourceDenominator::Symmetric => tc * bk * bk - tc * bk,
        SourceDenominator::AsPrinted => tc * bk * bk - bk * s,
    };
    let per_strategy: Vec<f64> = (0..n_strategies)
        .map(|st| {
            let mut hits = 0;
            for t in 0..n_testcases {
                for b1 in 0..n_sources {
                    for b2 in (0..n_sources).filter(|&b2| b2 != b1) {
                        hits += usize::from(sig((b1, st), (b2, st), t));
                    }
                }
            }
            share(hits, source_den)
        })
        .collect();

    let (impact_strategy, std_strategy) = mean_std(&per_source);
    let (impact_source, std_source) = mean_std(&per_strategy);
    ImpactReport {
        impact_strategy,
        impact_source,
        std_strategy,
        std_source,
    }
}

/// Impact over a grid of runs keyed by (source, strategy), each holding one
/// alignment per test case in the order of `refs`.
pub fn impact_from_runs(
    sources: &[String],
    strategies: &[String],
    runs: &BTreeMap<(String, String), Vec<Alignment>>,
    refs: &[Alignment],
    alpha: f64,
    tail: ExactTail,
    denominator: SourceDenominator,
) -> Result<ImpactReport, EvalError> {
    let mut grid: Vec<Vec<&[Alignment]>> = Vec::with_capacity(sources.len());
    for b in sources {
        let mut row = Vec::with_capacity(strategies.len());
        for s in strategies {
            let list = runs.get(&(b.clone(), s.clone())).ok_or_else(|| EvalError::MissingRun {
                pack: b.clone(),
                strategy: s.clone(),
            })?;
            if list.len() != refs.len() {
                return Err(EvalError::TestcaseMismatch {
                    config: format!("{b}/{s}"),
                    expected: refs.len(),
                    found: list.len(),
                });
            }
            row.push(list.as_slice());
        }
        grid.push(row);
    }
    Ok(impact(
        sources.len(),
        strategies.len(),
        refs.len(),
        |(b1, s1), (b2, s2), t| significant_difference(&grid[b1][s1][t], &grid[b2][s2][t], &refs[t], alpha, tail),
        denominator,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Correspondence;

    fn al(names: &[&str]) -> Alignment {
        names.iter().map(|n| Correspondence::equivalence(*n, *n)).collect()
    }

    fn counts(n01: usize, n10: usize) -> ContingencyCounts {
        ContingencyCounts { n01, n10 }
    }

    #[test]
    fn contingency_by_hand() {
        let (a1, a2, r) = (al(&["a", "b", "d"]), al(&["a", "c"]), al(&["a", "b", "c"]));
        assert_eq!(mcnemar_counts(&a1, &a2, &r), counts(2, 1));
        assert_eq!(mcnemar_counts(&a2, &a1, &r), counts(1, 2));
        assert_eq!(mcnemar_counts(&a1, &a1, &r), counts(0, 0));
    }

    #[test]
    fn asymptotic_by_hand() {
        let res = mcnemar_test(counts(30, 10), 0.05, ExactTail::OneSided);
        assert_eq!(res.test, SignificanceTest::AsymptoticCc);
        assert!((res.statistic.unwrap() - 9.025).abs() < 1e-12);
        assert!((res.p_value - 0.00266).abs() < 1e-5);
        assert!(res.significant);
    }

    #[test]
    fn exact_by_hand() {
        let res = mcnemar_test(counts(2, 1), 0.05, ExactTail::OneSided);
        assert_eq!(res.test, SignificanceTest::Exact);
        assert_eq!(res.p_value, 0.5);
        assert!(!res.significant);
        assert_eq!(mcnemar_test(counts(2, 1), 0.05, ExactTail::Doubled).p_value, 1.0);
        let zero = mcnemar_test(counts(0, 0), 0.05, ExactTail::OneSided);
        assert_eq!((zero.p_value, zero.significant), (1.0, false));
    }

    #[test]
    fn test_selection_boundary() {
        assert_eq!(mcnemar_test(counts(24, 0), 0.05, ExactTail::OneSided).test, SignificanceTest::Exact);
        assert_eq!(mcnemar_test(counts(25, 0), 0.05, ExactTail::OneSided).test, SignificanceTest::AsymptoticCc);
    }

    #[test]
    fn significance_is_order_independent() {
        let r = al(&["a", "b", "c", "d", "e", "f", "g"]);
        let a1 = al(&["a", "b", "c", "d", "e", "f", "g"]);
        let a2 = al(&["x1", "x2"]);
        assert!(significant_difference(&a1, &a2, &r, 0.05, ExactTail::OneSided));
        assert!(significant_difference(&a2, &a1, &r, 0.05, ExactTail::OneSided));
    }

    #[test]
    fn matrix_shapes() {
        let r = vec![al(&["a"])];
        let m = significance_matrix(&[("only".into(), vec![al(&["a"])])], &r, 0.05, ExactTail::OneSided).unwrap();
        assert_eq!(m.counts, vec![vec![0]]);
        let err = significance_matrix(&[("bad".into(), vec![])], &r, 0.05, ExactTail::OneSided).unwrap_err();
        assert!(matches!(err, EvalError::TestcaseMismatch { found: 0, .. }));
    }

    #[test]
    fn impact_extremes_and_hand_case() {
        let never = impact(3, 3, 4, |_, _, _| false, SourceDenominator::Symmetric);
        assert_eq!(never, ImpactReport::default());
        let always = impact(3, 3, 4, |_, _, _| true, SourceDenominator::Symmetric);
        assert_eq!((always.impact_strategy, always.impact_source), (1.0, 1.0));
        assert_eq!((always.std_strategy, always.std_source), (0.0, 0.0));
        // Only source 0's strategy pair differs.
        let one = impact(2, 2, 1, |a, b, _| a.0 == 0 && b.0 == 0, SourceDenominator::Symmetric);
        assert_eq!(one.impact_strategy, 0.5);
        assert_eq!(one.std_strategy, 0.5);
        assert_eq!(one.impact_source, 0.0);
    }

    #[test]
    fn as_printed_denominator() {
        // |TC|=2, |BK|=3, |S|=2: 2·9 − 3·2 = 12 against the symmetric 2·9 − 2·3 = 12.
        let a = impact(3, 2, 2, |_, _, _| true, SourceDenominator::AsPrinted);
        assert_eq!(a.impact_source, 1.0);
        // |TC|=1, |BK|=2, |S|=3: 4 − 6 < 0, reported as 0.
        let b = impact(2, 3, 1, |_, _, _| true, SourceDenominator::AsPrinted);
        assert_eq!(b.impact_source, 0.0);
        let c = impact(2, 3, 1, |_, _, _| true, SourceDenominator::Symmetric);
        assert_eq!(c.impact_source, 1.0);
    }
}
