//! Reference implementations used only to check the library. Each one is
//! written the slow, obvious way and shares no code with the crate.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Exhaustive maximum over all partial injections rows -> cols using only
/// positive cells. Weights are integers so totals compare exactly. Returns
/// the best total and, among optimal sets, the lexicographically smallest
/// sorted list of pairs.
pub fn brute_force_assignment(rows: usize, cols: usize, w: &[i64]) -> (i64, Vec<(usize, usize)>) {
    #[allow(clippy::too_many_arguments)]
    fn go(
        r: usize,
        rows: usize,
        cols: usize,
        w: &[i64],
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        total: i64,
        best: &mut (i64, Vec<(usize, usize)>),
    ) {
        if r == rows {
            if total > best.0 || (total == best.0 && *cur < best.1) {
                *best = (total, cur.clone());
            }
            return;
        }
        for c in 0..cols {
            if !used[c] && w[r * cols + c] > 0 {
                used[c] = true;
                cur.push((r, c));
                go(r + 1, rows, cols, w, used, cur, total + w[r * cols + c], best);
                cur.pop();
                used[c] = false;
            }
        }
        go(r + 1, rows, cols, w, used, cur, total, best);
    }
    let mut best = (0, Vec::new());
    // The empty assignment is a valid baseline; any non-empty optimum beats
    // or ties it, and a tie with the empty set is impossible (weights > 0).
    go(0, rows, cols, w, &mut vec![false; cols], &mut Vec::new(), 0, &mut best);
    best
}

/// Binomial coefficients C(n, k) for n <= 64, exact.
pub fn pascal(n: usize) -> Vec<Vec<u128>> {
    let mut t = vec![vec![1u128]];
    for i in 1..=n {
        let prev = &t[i - 1];
        let mut row = vec![1u128; i + 1];
        for k in 1..i {
            row[k] = prev[k - 1] + prev[k];
        }
        t.push(row);
    }
    t
}

/// sum_{x=n01}^{n} C(n, x) / 2^n, from exact integer counts.
pub fn exact_tail_by_enumeration(n01: usize, n10: usize) -> f64 {
    let n = n01 + n10;
    if n == 0 {
        return 1.0;
    }
    let c = pascal(n);
    let hits: u128 = (n01..=n).map(|x| c[n][x]).sum();
    hits as f64 / (1u128 << n) as f64
}

/// Classifies every correspondence of A1 ∪ A2 ∪ R by whether each system is
/// right about it (member of the system iff member of the reference).
/// Returns (A1 wrong & A2 right, A1 right & A2 wrong).
pub fn contingency_by_classification<T: Ord + Clone>(
    a1: &BTreeSet<T>,
    a2: &BTreeSet<T>,
    r: &BTreeSet<T>,
) -> (usize, usize) {
    let universe: BTreeSet<T> = a1.iter().chain(a2).chain(r).cloned().collect();
    let (mut n01, mut n10) = (0, 0);
    for x in &universe {
        let right1 = a1.contains(x) == r.contains(x);
        let right2 = a2.contains(x) == r.contains(x);
        match (right1, right2) {
            (false, true) => n01 += 1,
            (true, false) => n10 += 1,
            _ => {}
        }
    }
    (n01, n10)
}
