//! Maximum-weight one-to-one assignment over a dense weight matrix.
//!
//! Weights are quantized to integers so that optimality and ties are decided
//! exactly. Each connected component of positive cells is solved on its own
//! as a square min-cost problem (zero cells and padding mean "unassigned").
//! Among all optimal assignments the lexicographically smallest set of
//! (row, column) pairs is then selected: every optimal assignment uses only
//! edges that are tight under the final dual potentials, so the choice is a
//! greedy walk over tight edges, each forced in by an alternating-path search.

use fnv::FnvHashSet;

const SCALE: f64 = (1u64 << 40) as f64;

/// Integer weight used for all comparisons.
pub fn quantize(w: f64) -> i64 {
    (w * SCALE).round() as i64
}

/// Optimal assignment for a `rows x cols` row-major matrix of weights in
/// [0, 1]. Returns (row, col) pairs in ascending order; cells with weight 0
/// are never selected. Ties prefer the lexicographically smallest pair set in
/// index order.
pub fn max_weight_assignment(rows: usize, cols: usize, weights: &[f64]) -> Vec<(usize, usize)> {
    assert_eq!(weights.len(), rows * cols, "weight matrix has wrong size");
    let q: Vec<i64> = weights.iter().map(|&w| quantize(w)).collect();

    let mut out = Vec::new();
    for (crows, ccols) in components(rows, cols, &q) {
        solve_component(&crows, &ccols, cols, &q, &mut out);
    }
    out.sort_unstable();
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the bipartite graph of positive cells; rows and
/// columns without positive cells are dropped.
fn components(rows: usize, cols: usize, q: &[i64]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut parent: Vec<usize> = (0..rows + cols).collect();
    let mut active = vec![false; rows + cols];
    for r in 0..rows {
        for c in 0..cols {
            if q[r * cols + c] > 0 {
                active[r] = true;
                active[rows + c] = true;
                let (a, b) = (find(&mut parent, r), find(&mut parent, rows + c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> = Default::default();
    for x in (0..rows + cols).filter(|&x| active[x]) {
        let root = find(&mut parent, x);
        let g = groups.entry(root).or_default();
        if x < rows {
            g.0.push(x);
        } else {
            g.1.push(x - rows);
        }
    }
    groups.into_values().collect()
}

struct Square {
    n: usize,
    cost: Vec<i64>,
    u: Vec<i64>,
    v: Vec<i64>,
    row_match: Vec<usize>,
    col_match: Vec<usize>,
}

impl Square {
    fn tight(&self, r: usize, c: usize) -> bool {
        self.cost[r * self.n + c] - self.u[r] - self.v[c] == 0
    }
}

/// Dense O(n^3) min-cost assignment with potentials (1-based internally).
fn solve_square(n: usize, cost: Vec<i64>) -> Square {
    const INF: i64 = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_match = vec![0; n];
    let mut col_match = vec![0; n];
    for j in 1..=n {
        row_match[p[j] - 1] = j - 1;
        col_match[j - 1] = p[j] - 1;
    }
    Square {
        n,
        cost,
        u: u[1..].to_vec(),
        v: v[1..].to_vec(),
        row_match,
        col_match,
    }
}

fn solve_component(crows: &[usize], ccols: &[usize], cols: usize, q: &[i64], out: &mut Vec<(usize, usize)>) {
    let n = crows.len().max(ccols.len());
    let mut cost = vec![0i64; n * n];
    for (r, &gr) in crows.iter().enumerate() {
        for (c, &gc) in ccols.iter().enumerate() {
            let w = q[gr * cols + gc];
            if w > 0 {
                cost[r * n + c] = -w;
            }
        }
    }
    let mut sq = solve_square(n, cost);
    debug_assert!((0..n).all(|r| sq.tight(r, sq.row_match[r])));

    let mut fixed_row = vec![false; n];
    let mut fixed_col = vec![false; n];
    let mut forbidden: FnvHashSet<(usize, usize)> = FnvHashSet::default();
    for r in 0..crows.len() {
        for c in 0..ccols.len() {
            if sq.cost[r * n + c] < 0 && sq.tight(r, c) {
                if force(&mut sq, r, c, &mut fixed_row, &mut fixed_col, &forbidden) {
                    fixed_row[r] = true;
                    fixed_col[c] = true;
                } else {
                    forbidden.insert((r, c));
                }
            }
        }
    }
    for (r, &row) in crows.iter().enumerate() {
        let c = sq.row_match[r];
        if c < ccols.len() && sq.cost[r * n + c] < 0 {
            out.push((row, ccols[c]));
        }
    }
}

/// Rearranges the tight perfect matching so it contains (i, j) while keeping
/// fixed pairs and avoiding forbidden ones. Leaves the matching unchanged and
/// returns false if impossible.
fn force(
    sq: &mut Square,
    i: usize,
    j: usize,
    fixed_row: &mut [bool],
    fixed_col: &mut [bool],
    forbidden: &FnvHashSet<(usize, usize)>,
) -> bool {
    if fixed_row[i] || fixed_col[j] {
        return false;
    }
    if sq.row_match[i] == j {
        return true;
    }
    let (j2, i2) = (sq.row_match[i], sq.col_match[j]);
    fixed_row[i] = true;
    fixed_col[j] = true;

    // Alternating path from the freed row i2 to the freed column j2.
    let n = sq.n;
    let mut prev = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([i2]);
    let mut found = false;
    'bfs: while let Some(r) = queue.pop_front() {
        for c in 0..n {
            if prev[c] != usize::MAX || fixed_col[c] || c == sq.row_match[r] && r != i2 {
                continue;
            }
            if !sq.tight(r, c) || forbidden.contains(&(r, c)) {
                continue;
            }
            prev[c] = r;
            if c == j2 {
                found = true;
                break 'bfs;
            }
            queue.push_back(sq.col_match[c]);
        }
    }
    fixed_row[i] = false;
    fixed_col[j] = false;
    if !found {
        return false;
    }
    let mut c = j2;
    loop {
        let r = prev[c];
        let next = sq.row_match[r];
        sq.row_match[r] = c;
        sq.col_match[c] = r;
        if r == i2 {
            break;
        }
        c = next;
    }
    sq.row_match[i] = j;
    sq.col_match[j] = i;
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(w: &[f64], cols: usize, pairs: &[(usize, usize)]) -> f64 {
        pairs.iter().map(|&(r, c)| w[r * cols + c]).sum()
    }

    #[test]
    fn two_by_two() {
        let w = [0.9, 0.2, 0.8, 0.85];
        let a = max_weight_assignment(2, 2, &w);
        assert_eq!(a, vec![(0, 0), (1, 1)]);
        assert!((total(&w, 2, &a) - 1.75).abs() < 1e-12);
    }

    #[test]
    fn zeros_and_rectangles() {
        assert!(max_weight_assignment(3, 2, &[0.0; 6]).is_empty());
        assert_eq!(max_weight_assignment(1, 2, &[0.3, 0.7]), vec![(0, 1)]);
        assert_eq!(max_weight_assignment(2, 1, &[0.3, 0.7]), vec![(1, 0)]);
        assert!(max_weight_assignment(0, 0, &[]).is_empty());
    }

    #[test]
    fn ties_prefer_smallest_pairs() {
        // Both diagonals total 2.0; the one containing (0, 0) wins.
        assert_eq!(max_weight_assignment(2, 2, &[1.0, 1.0, 1.0, 1.0]), vec![(0, 0), (1, 1)]);
        // (0,0) alone ties with (0,1)+(1,0); (0,0) is the smaller first pair.
        assert_eq!(max_weight_assignment(2, 2, &[1.0, 0.5, 0.5, 0.0]), vec![(0, 0)]);
        let w = [0.8; 9];
        assert_eq!(max_weight_assignment(3, 3, &w), vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn forced_pair_requires_long_cycle() {
        // The solver may start from any optimum; forcing (0,0) needs the
        // remaining rows to shift along a chain.
        let w = [
            0.5, 0.5, 0.0, 0.0, //
            0.0, 0.5, 0.5, 0.0, //
            0.0, 0.0, 0.5, 0.5, //
            0.5, 0.0, 0.0, 0.5, //
        ];
        assert_eq!(max_weight_assignment(4, 4, &w), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn independent_components() {
        let w = [
            0.9, 0.0, 0.0, //
            0.0, 0.0, 0.4, //
            0.0, 0.0, 0.6, //
        ];
        assert_eq!(max_weight_assignment(3, 3, &w), vec![(0, 0), (2, 2)]);
    }
}
