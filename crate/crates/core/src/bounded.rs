//! Feasibility and construction of non-negative integer matrices with
//! prescribed row sums, column sums, and a uniform per-entry cap — the
//! adjustment matrices added to a rescaled JDM.
//!
//! Feasibility uses a prefix criterion (a bounded-entry variant of the
//! Gale–Ryser condition): with column sums sorted descending, every prefix of
//! columns must be coverable by the rows, where a row can give at most
//! `min(row_sum, prefix_len * cap)` to the prefix. The criterion is validated
//! against exhaustive enumeration in the test suite rather than trusted on
//! paper.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row sums, column sums, and the uniform entry cap the matrix must respect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedMatrixInstance {
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub cap: u64,
}

impl BoundedMatrixInstance {
    pub fn new(row_sums: Vec<u64>, col_sums: Vec<u64>, cap: u64) -> Self {
        Self { row_sums, col_sums, cap }
    }
}

/// Outcome of the feasibility test, carrying a witness on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphicalVerdict {
    Feasible,
    /// Total supply and demand differ; no assignment can conserve mass.
    SumMismatch { row_total: u64, col_total: u64 },
    /// The `prefix` largest columns demand more than the rows can give them.
    PrefixViolation { prefix: usize, demand: u64, capacity: u64 },
}

impl GraphicalVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, GraphicalVerdict::Feasible)
    }
}

/// Decides whether a matrix with the prescribed line sums and cap exists.
pub fn graphical(inst: &BoundedMatrixInstance) -> GraphicalVerdict {
    let row_total: u128 = inst.row_sums.iter().map(|&r| r as u128).sum();
    let col_total: u128 = inst.col_sums.iter().map(|&c| c as u128).sum();
    if row_total != col_total {
        return GraphicalVerdict::SumMismatch {
            row_total: row_total as u64,
            col_total: col_total as u64,
        };
    }

    let mut cols = inst.col_sums.clone();
    cols.sort_unstable_by(|a, b| b.cmp(a));
    let mut demand: u128 = 0;
    for (idx, &c) in cols.iter().enumerate() {
        let t = idx + 1;
        demand += c as u128;
        let capacity: u128 = inst
            .row_sums
            .iter()
            .map(|&r| (r as u128).min(t as u128 * inst.cap as u128))
            .sum();
        if demand > capacity {
            return GraphicalVerdict::PrefixViolation {
                prefix: t,
                demand: demand as u64,
                capacity: capacity as u64,
            };
        }
    }
    GraphicalVerdict::Feasible
}

/// A constructed adjustment matrix; zero entries are stored implicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustmentMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), u64>,
}

impl AdjustmentMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: BTreeMap::new() }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries.get(&(r, c)).copied().unwrap_or(0)
    }

    /// Non-zero entries in ascending position order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut out = alloc::vec![alloc::vec![0; self.cols]; self.rows];
        for (&(r, c), &v) in &self.entries {
            out[r][c] = v;
        }
        out
    }

    fn set(&mut self, r: usize, c: usize, v: u64) {
        if v > 0 {
            self.entries.insert((r, c), v);
        }
    }
}

/// Builds a matrix realizing a feasible instance.
///
/// Greedy fill: rows in descending sum order; within a row, every column
/// first receives its mandatory floor — the part of its residual that the
/// remaining rows cannot cover, each later row supplying a column at most
/// `min(cap, its row sum)` — then the remainder goes to columns in
/// descending residual order (ties by ascending index) up to
/// `min(cap, column residual)` per cell. The output is re-checked against
/// the instance on every call; a post-check failure indicates a bug, not an
/// infeasible input.
pub fn construct(inst: &BoundedMatrixInstance) -> Result<AdjustmentMatrix> {
    if !graphical(inst).is_feasible() {
        return Err(Error::InfeasibleInstance);
    }

    let mut d = AdjustmentMatrix::zero(inst.row_sums.len(), inst.col_sums.len());
    let mut col_residual = inst.col_sums.clone();

    let mut row_order: Vec<usize> = (0..inst.row_sums.len()).collect();
    row_order.sort_by_key(|&r| (core::cmp::Reverse(inst.row_sums[r]), r));

    // suffix_supply[pos]: how much any single column can still receive from
    // rows strictly after position `pos`.
    let mut suffix_supply = alloc::vec![0u64; row_order.len() + 1];
    for pos in (0..row_order.len()).rev() {
        suffix_supply[pos] =
            suffix_supply[pos + 1] + inst.cap.min(inst.row_sums[row_order[pos]]);
    }

    let breach = || Error::InvariantBreach("construction invariant breach".into());
    for (pos, &r) in row_order.iter().enumerate() {
        // After this row, each column must still be coverable by the rows
        // left. Reserve that mandatory floor first — a purely greedy fill can
        // strand a high-demand column.
        let headroom = suffix_supply[pos + 1];
        let mut assign: Vec<u64> =
            col_residual.iter().map(|&c| c.saturating_sub(headroom)).collect();
        let base: u64 = assign.iter().sum();
        let mut extra = inst.row_sums[r].checked_sub(base).ok_or_else(breach)?;

        let mut col_order: Vec<usize> = (0..col_residual.len()).collect();
        col_order.sort_by_key(|&c| (core::cmp::Reverse(col_residual[c]), c));
        for &c in &col_order {
            if extra == 0 {
                break;
            }
            let q = extra.min(inst.cap.min(col_residual[c]).saturating_sub(assign[c]));
            assign[c] += q;
            extra -= q;
        }
        if extra != 0 {
            return Err(breach());
        }
        for (c, &q) in assign.iter().enumerate() {
            if q > 0 {
                d.set(r, c, q);
                col_residual[c] -= q;
            }
        }
    }

    verify_construction(inst, &d)?;
    Ok(d)
}

fn verify_construction(inst: &BoundedMatrixInstance, d: &AdjustmentMatrix) -> Result<()> {
    let breach = || Error::InvariantBreach("construction invariant breach".into());
    let mut row_sums = alloc::vec![0u64; inst.row_sums.len()];
    let mut col_sums = alloc::vec![0u64; inst.col_sums.len()];
    for ((r, c), v) in d.iter() {
        if v > inst.cap {
            return Err(breach());
        }
        row_sums[r] += v;
        col_sums[c] += v;
    }
    if row_sums != inst.row_sums || col_sums != inst.col_sums {
        return Err(breach());
    }
    Ok(())
}

/// Brute-force existence check by exhausting every entry assignment; the test
/// oracle for [`graphical`]. Refuses instances whose nominal search space
/// `(cap+1)^(rows*cols)` exceeds `10^7`.
pub fn enumerate_feasible(inst: &BoundedMatrixInstance) -> Result<bool> {
    let cells = inst.row_sums.len() * inst.col_sums.len();
    let mut budget: u128 = 1;
    for _ in 0..cells {
        budget = budget.saturating_mul(inst.cap as u128 + 1);
        if budget > 10_000_000 {
            return Err(Error::InstanceTooLarge);
        }
    }

    if inst.row_sums.is_empty() || inst.col_sums.is_empty() {
        let all_zero =
            inst.row_sums.iter().all(|&r| r == 0) && inst.col_sums.iter().all(|&c| c == 0);
        return Ok(all_zero);
    }

    let mut col_residual = inst.col_sums.clone();
    Ok(search(inst, 0, 0, inst.row_sums[0], &mut col_residual))
}

// Walks cells in row-major order trying every admissible value; admissibility
// pruning (cap, row residual, column residual) discards only assignments that
// already violate a constraint, so the search remains exhaustive over
// candidate matrices.
fn search(
    inst: &BoundedMatrixInstance,
    r: usize,
    c: usize,
    row_residual: u64,
    col_residual: &mut Vec<u64>,
) -> bool {
    if c == inst.col_sums.len() {
        if row_residual != 0 {
            return false;
        }
        let next = r + 1;
        if next == inst.row_sums.len() {
            return col_residual.iter().all(|&cr| cr == 0);
        }
        return search(inst, next, 0, inst.row_sums[next], col_residual);
    }
    let max_here = inst.cap.min(row_residual).min(col_residual[c]);
    for v in 0..=max_here {
        col_residual[c] -= v;
        let ok = search(inst, r, c + 1, row_residual - v, col_residual);
        col_residual[c] += v;
        if ok {
            return true;
        }
    }
    false
}
