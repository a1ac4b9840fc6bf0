//! Rectangular minimum-cost assignment.
//!
//! The matrix is padded to a square with zero-cost dummies and solved with
//! the shortest-augmenting-path Hungarian method, which also yields optimal
//! dual potentials. Every optimal assignment uses only edges that are tight
//! under those potentials, so a greedy pass row by row, trying columns in
//! ascending order and keeping the tight subgraph perfectly matchable,
//! picks the lexicographically smallest optimal pair set.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Dense row-major cost matrix.
pub(super) struct Dense<'a> {
    pub rows: usize,
    pub cols: usize,
    pub values: &'a [f64],
}

impl Dense<'_> {
    fn padded(&self, n: usize, i: usize, j: usize) -> f64 {
        debug_assert!(i < n && j < n);
        if i < self.rows && j < self.cols {
            self.values[i * self.cols + j]
        } else {
            0.0
        }
    }
}

/// Solves the square padded problem, returning `(row_to_col, u, v)`.
fn hungarian(m: &Dense, n: usize) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    // 1-based arrays with a virtual column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        col_owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = m.padded(n, i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[col_owner[j] - 1] = j - 1;
    }
    (row_to_col, u[1..].to_vec(), v[1..].to_vec())
}

/// Tight-edge graph with a perfect matching that is edited in place.
struct TightMatching {
    n: usize,
    tight: Vec<bool>,
    row_to_col: Vec<usize>,
    col_to_row: Vec<usize>,
    fixed_row: Vec<bool>,
    fixed_col: Vec<bool>,
}

impl TightMatching {
    fn is_tight(&self, i: usize, j: usize) -> bool {
        self.tight[i * self.n + j]
    }

    /// Forces `(row, col)` into the matching if the remaining free rows and
    /// columns can still be perfectly matched on tight edges.
    fn try_fix(&mut self, row: usize, col: usize) -> bool {
        if !self.is_tight(row, col) || self.fixed_col[col] {
            return false;
        }
        let old_col = self.row_to_col[row];
        if old_col == col {
            self.fixed_row[row] = true;
            self.fixed_col[col] = true;
            return true;
        }
        let displaced = self.col_to_row[col];
        // alternating path from `displaced` to `old_col` in the unfixed part,
        // with `row` and `col` removed
        let n = self.n;
        let mut prev_row_of_col = vec![usize::MAX; n];
        let mut seen_row = vec![false; n];
        let mut queue = VecDeque::from([displaced]);
        seen_row[displaced] = true;
        seen_row[row] = true;
        let mut found = false;
        'bfs: while let Some(r) = queue.pop_front() {
            #[allow(clippy::needless_range_loop)]
            for c in 0..n {
                if c == col || self.fixed_col[c] || prev_row_of_col[c] != usize::MAX || !self.is_tight(r, c) {
                    continue;
                }
                prev_row_of_col[c] = r;
                if c == old_col {
                    found = true;
                    break 'bfs;
                }
                let next = self.col_to_row[c];
                if !seen_row[next] && !self.fixed_row[next] {
                    seen_row[next] = true;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            return false;
        }
        let mut c = old_col;
        loop {
            let r = prev_row_of_col[c];
            let next_c = self.row_to_col[r];
            self.row_to_col[r] = c;
            self.col_to_row[c] = r;
            if r == displaced {
                break;
            }
            c = next_c;
        }
        self.row_to_col[row] = col;
        self.col_to_row[col] = row;
        self.fixed_row[row] = true;
        self.fixed_col[col] = true;
        true
    }
}

/// Optimal pairs `(row, col)` sorted by row, `min(rows, cols)` of them.
pub(super) fn solve(m: &Dense) -> Result<Vec<(usize, usize)>> {
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::EmptyInput("cost matrix has no rows or columns"));
    }
    if m.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("cost matrix entries must be finite"));
    }
    let n = m.rows.max(m.cols);
    let (row_to_col, u, v) = hungarian(m, n);

    let scale = m.values.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
    let eps = 1e-9 * scale;
    let mut tight = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            tight[i * n + j] = (m.padded(n, i, j) - u[i] - v[j]).abs() <= eps;
        }
    }
    let mut col_to_row = vec![0; n];
    for (i, &j) in row_to_col.iter().enumerate() {
        col_to_row[j] = i;
    }
    let mut tm = TightMatching {
        n,
        tight,
        row_to_col,
        col_to_row,
        fixed_row: vec![false; n],
        fixed_col: vec![false; n],
    };

    // Real rows in order; for each, real columns ascending, then "unmatched"
    // (any dummy column) last.
    for i in 0..m.rows {
        let mut done = false;
        for j in 0..m.cols {
            if tm.try_fix(i, j) {
                done = true;
                break;
            }
        }
        if !done {
            for j in m.cols..n {
                if tm.try_fix(i, j) {
                    done = true;
                    break;
                }
            }
        }
        debug_assert!(done, "current matching keeps row {i} matchable");
    }
    Ok((0..m.rows)
        .filter_map(|i| {
            let j = tm.row_to_col[i];
            (j < m.cols).then_some((i, j))
        })
        .collect())
}
