//! Precision/recall/F1, McNemar significance and strategy-vs-source impact.

mod report;
mod significance;

use std::fmt;
use std::str::FromStr;

use crate::model::Alignment;

pub use report::{write_matrix_csv, write_report_csv, ReportRow};
pub use significance::{
    impact, impact_from_runs, mcnemar_counts, mcnemar_test, significance_matrix, significant_difference,
    ContingencyCounts, EvalError, ExactTail, ImpactReport, SignificanceMatrix, SignificanceResult, SignificanceTest,
    SourceDenominator, EXACT_TEST_LIMIT,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl std::ops::Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

/// Compares on (source, target, relation); confidences are ignored.
pub fn confusion(a: &Alignment, r: &Alignment) -> ConfusionCounts {
    let tp = a.keys().filter(|k| r.contains(k)).count();
    ConfusionCounts {
        tp,
        fp: a.len() - tp,
        fn_: r.len() - tp,
    }
}

/// Value of a ratio whose denominator is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ZeroDivision {
    #[default]
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize, zd: ZeroDivision) -> f64 {
    if den == 0 {
        match zd {
            ZeroDivision::Zero => 0.0,
            ZeroDivision::One => 1.0,
        }
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn prf(c: ConfusionCounts, zd: ZeroDivision) -> Prf {
    let precision = ratio(c.tp, c.tp + c.fp, zd);
    let recall = ratio(c.tp, c.tp + c.fn_, zd);
    Prf {
        precision,
        recall,
        f1: harmonic(precision, recall),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// Sum counts over test cases, then compute the ratios.
    Micro,
    /// Average per-test-case P, R and F1 independently.
    Macro,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Micro => "MICRO",
            Aggregation::Macro => "MACRO",
        })
    }
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "micro" => Ok(Aggregation::Micro),
            "macro" => Ok(Aggregation::Macro),
            _ => Err(format!("unknown aggregation `{s}` (expected micro or macro)")),
        }
    }
}

/// An empty list aggregates to all zeros.
pub fn aggregate(per_testcase: &[ConfusionCounts], mode: Aggregation, zd: ZeroDivision) -> Prf {
    if per_testcase.is_empty() {
        return Prf::default();
    }
    match mode {
        Aggregation::Micro => prf(per_testcase.iter().copied().fold(ConfusionCounts::default(), |a, b| a + b), zd),
        Aggregation::Macro => {
            let n = per_testcase.len() as f64;
            let mut sum = Prf::default();
            for c in per_testcase {
                let m = prf(*c, zd);
                sum.precision += m.precision;
                sum.recall += m.recall;
                sum.f1 += m.f1;
            }
            Prf {
                precision: sum.precision / n,
                recall: sum.recall / n,
                f1: sum.f1 / n,
            }
        }
    }
}
