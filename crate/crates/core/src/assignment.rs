//! Minimum-cost bipartite assignment.
//!
//! [`solve_min_cost`] is a dense O(n³) shortest-augmenting-path solver
//! (Jonker-Volgenant style) over a rectangular cost matrix in which
//! `+inf` marks a forbidden pairing. It returns a maximum-cardinality
//! pairing over the finite cells with minimum total cost.
//! [`brute_force_min_cost`] enumerates every partial pairing and exists
//! as an independent oracle for tests; it refuses matrices larger than
//! 8 on a side.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense rectangular cost matrix. Entries are finite costs or
/// [`CostMatrix::FORBIDDEN`] (`+inf`) for pairings that must not occur.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// Sentinel for a forbidden pairing.
    pub const FORBIDDEN: f64 = f64::INFINITY;

    /// Row-major construction. Every entry must be finite or `+inf`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch {
                expected: alloc::format!("{rows}x{cols} = {} entries", rows * cols),
                got: alloc::format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|c| c.is_nan() || *c == f64::NEG_INFINITY) {
            return Err(Error::InvalidConfig(
                "cost entries must be finite or +inf".into(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidConfig("ragged cost matrix".into()));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    /// All-forbidden matrix, to be filled cell by cell.
    pub fn filled_forbidden(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Self::FORBIDDEN; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, cost: f64) {
        debug_assert!(!cost.is_nan() && cost != f64::NEG_INFINITY);
        self.data[row * self.cols + col] = cost;
    }

    fn max_finite_abs(&self) -> f64 {
        self.data
            .iter()
            .filter(|c| c.is_finite())
            .fold(0.0_f64, |acc, c| acc.max(c.abs()))
    }
}

/// A pairing and its total cost over the original matrix entries.
/// Pairs are sorted by row; the total is summed in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

impl Assignment {
    fn from_pairs(m: &CostMatrix, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        let total_cost = pairs.iter().map(|&(r, c)| m.get(r, c)).sum();
        Self { pairs, total_cost }
    }
}

/// Maximum-cardinality, minimum-total-cost pairing over finite cells.
///
/// Rows or columns whose every entry is forbidden stay unmatched, as do
/// the surplus rows/columns of a rectangular matrix.
pub fn solve_min_cost(m: &CostMatrix) -> Assignment {
    if m.rows == 0 || m.cols == 0 {
        return Assignment {
            pairs: Vec::new(),
            total_cost: 0.0,
        };
    }
    // Pad to a square of side rows+cols. Leaving row i (col j) unmatched
    // is modelled as pairing it with its private dummy column (row) at
    // cost `unmatched`; `forbid` is a finite stand-in for +inf chosen
    // large enough that no optimal solution ever uses one.
    let n = m.rows + m.cols;
    let unmatched = (m.max_finite_abs() + 1.0) * (n as f64 + 1.0);
    let forbid = unmatched * (n as f64 + 2.0);
    let mut padded = vec![forbid; n * n];
    for i in 0..m.rows {
        for j in 0..m.cols {
            let c = m.get(i, j);
            padded[i * n + j] = if c.is_finite() { c } else { forbid };
        }
        padded[i * n + m.cols + i] = unmatched;
    }
    for j in 0..m.cols {
        padded[(m.rows + j) * n + j] = unmatched;
    }
    for i in m.rows..n {
        for j in m.cols..n {
            padded[i * n + j] = 0.0;
        }
    }

    let row_of_col = lap_square(n, &padded);
    let mut pairs = Vec::new();
    for (col, &row) in row_of_col.iter().enumerate() {
        if row < m.rows && col < m.cols && m.get(row, col).is_finite() {
            pairs.push((row, col));
        }
    }
    Assignment::from_pairs(m, pairs)
}

/// Shortest-augmenting-path assignment on a dense square matrix with all
/// entries finite. Returns, for each column, the row assigned to it.
fn lap_square(n: usize, cost: &[f64]) -> Vec<usize> {
    // Potentials are 1-indexed with a virtual column 0.
    let mut u = vec![0.0_f64; n + 1];
    let mut v = vec![0.0_f64; n + 1];
    let mut row_of = vec![0_usize; n + 1]; // 0 = unassigned
    let mut way = vec![0_usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0_usize;
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0_usize;
            for j in 1..=n {
                if !used[j] {
                    let reduced = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if reduced < min_to[j] {
                        min_to[j] = reduced;
                        way[j] = j0;
                    }
                    if min_to[j] < delta {
                        delta = min_to[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        // Walk the augmenting path back to the virtual column.
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| row_of[j] - 1).collect()
}

/// Best candidate seen so far: (cardinality, cost, pairs).
type Candidate = (usize, f64, Vec<(usize, usize)>);

/// Exhaustive oracle: enumerates every partial pairing of rows to
/// columns over finite cells and keeps the maximum-cardinality,
/// minimum-cost one. Limited to `max(rows, cols) <= 8`.
pub fn brute_force_min_cost(m: &CostMatrix) -> Result<Assignment> {
    const LIMIT: usize = 8;
    let biggest = m.rows.max(m.cols);
    if biggest > LIMIT {
        return Err(Error::DimensionLimit {
            limit: LIMIT,
            got: biggest,
        });
    }
    let mut best: Option<Candidate> = None;
    let mut used_cols = vec![false; m.cols];
    let mut current: Vec<(usize, usize)> = Vec::new();
    enumerate(m, 0, 0.0, &mut used_cols, &mut current, &mut best);
    let (_, _, pairs) = best.expect("the empty pairing is always a candidate");
    Ok(Assignment::from_pairs(m, pairs))
}

fn enumerate(
    m: &CostMatrix,
    row: usize,
    cost_so_far: f64,
    used_cols: &mut Vec<bool>,
    current: &mut Vec<(usize, usize)>,
    best: &mut Option<Candidate>,
) {
    if row == m.rows {
        let candidate = (current.len(), cost_so_far);
        let better = match best {
            None => true,
            Some((card, cost, _)) => {
                candidate.0 > *card || (candidate.0 == *card && candidate.1 < *cost)
            }
        };
        if better {
            *best = Some((candidate.0, candidate.1, current.clone()));
        }
        return;
    }
    // Leave this row unmatched.
    enumerate(m, row + 1, cost_so_far, used_cols, current, best);
    for col in 0..m.cols {
        let c = m.get(row, col);
        if !used_cols[col] && c.is_finite() {
            used_cols[col] = true;
            current.push((row, col));
            enumerate(m, row + 1, cost_so_far + c, used_cols, current, best);
            current.pop();
            used_cols[col] = false;
        }
    }
}
