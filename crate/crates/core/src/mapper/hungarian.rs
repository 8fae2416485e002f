//! Linear assignment by shortest augmenting paths (Jonker-Volgenant).
//!
//! Costs are `f64`; `f64::INFINITY` marks a forbidden pairing. Matrices may
//! be rectangular with `rows <= cols`; every row gets a column, surplus
//! columns stay free. The solver is deterministic: rows are processed in
//! order and column scans run in ascending index order with strict
//! improvement, so ties always resolve toward low column indices.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignmentError {
    /// No matching that covers every row with finite total cost exists.
    Infeasible,
}

impl fmt::Display for AssignmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentError::Infeasible => {
                write!(f, "assignment has no finite-cost row-complete matching")
            }
        }
    }
}

impl core::error::Error for AssignmentError {}

/// Cost matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn zeros(rows: usize, cols: usize) -> CostMatrix {
        CostMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Square matrix from explicit rows.
    pub fn from_rows(rows: &[&[f64]]) -> CostMatrix {
        let n = rows.len();
        let mut m = CostMatrix::zeros(n, n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "row {i} is not length {n}");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
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
        debug_assert!(!cost.is_nan());
        self.data[row * self.cols + col] = cost;
    }

    fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }
}

/// A minimum-cost matching covering every row.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `col_of[row]` is the column matched to `row`.
    pub col_of: Vec<usize>,
    pub total_cost: f64,
}

pub fn solve(m: &CostMatrix) -> Result<Assignment, AssignmentError> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows > cols {
        return Err(AssignmentError::Infeasible);
    }
    // Row and column potentials; reduced cost is m[i][j] - u[i] - v[j].
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    // row_of[j] = row matched to column j; column `cols` is the virtual
    // start column holding the row being inserted; `rows` means free.
    let mut row_of = vec![rows; cols + 1];
    // way[j] = previous column on the alternating path that reached j.
    let mut way = vec![cols; cols + 1];
    let mut minv = vec![0.0f64; cols + 1];
    let mut used = vec![false; cols + 1];

    for row in 0..rows {
        row_of[cols] = row;
        minv[..cols].fill(f64::INFINITY);
        used.fill(false);
        let mut j0 = cols;
        // Grow the shortest-path tree over columns until a free column is hit.
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let costs = m.row(i0);
            let mut delta = f64::INFINITY;
            let mut j1 = cols;
            for j in 0..cols {
                if used[j] {
                    continue;
                }
                let cur = costs[j] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if j1 == cols {
                // Every remaining column is unreachable.
                return Err(AssignmentError::Infeasible);
            }
            for j in 0..=cols {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == rows {
                break;
            }
        }
        // Augment along the recorded path back to the virtual column.
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == cols {
                break;
            }
        }
    }

    let mut col_of = vec![cols; rows];
    for j in 0..cols {
        if row_of[j] != rows {
            col_of[row_of[j]] = j;
        }
    }
    let total_cost = (0..rows).map(|r| m.get(r, col_of[r])).sum();
    if !f64::is_finite(total_cost) {
        return Err(AssignmentError::Infeasible);
    }
    Ok(Assignment { col_of, total_cost })
}
