//! Joint-degree and degree-correlation matrices, their line sums, consistency
//! checks, and sparsity statistics.
//!
//! A joint-degree matrix (JDM) counts edges by the (source out-degree, target
//! in-degree) pattern; a degree-correlation matrix (DCM) counts nodes by their
//! (out-degree, in-degree) pair. Both are stored sparsely: zero entries are
//! structurally absent. JDM indices start at 1 (an edge's source has out-degree
//! at least 1), DCM indices start at 0.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Jdm,
    Dcm,
}

impl MatrixKind {
    /// Smallest degree index a matrix of this kind may carry.
    pub fn min_index(self) -> u64 {
        match self {
            MatrixKind::Jdm => 1,
            MatrixKind::Dcm => 0,
        }
    }
}

/// A non-negative integer matrix keyed by degree values, with zero entries
/// absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseDegreeMatrix {
    kind: MatrixKind,
    entries: BTreeMap<(u64, u64), u64>,
}

impl SparseDegreeMatrix {
    pub fn new(kind: MatrixKind) -> Self {
        Self { kind, entries: BTreeMap::new() }
    }

    /// Builds a matrix from `((row, col), count)` pairs. Zero counts are
    /// skipped; JDM entries with a zero index are rejected.
    pub fn from_entries<I>(kind: MatrixKind, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((u64, u64), u64)>,
    {
        let mut m = Self::new(kind);
        for ((row, col), count) in entries {
            m.add(row, col, count)?;
        }
        Ok(m)
    }

    /// Adds `count` to entry `(row, col)`.
    pub fn add(&mut self, row: u64, col: u64, count: u64) -> Result<()> {
        if self.kind == MatrixKind::Jdm && (row == 0 || col == 0) {
            return Err(Error::InvalidJdmIndex { row, col });
        }
        if count > 0 {
            *self.entries.entry((row, col)).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn get(&self, row: u64, col: u64) -> u64 {
        self.entries.get(&(row, col)).copied().unwrap_or(0)
    }

    /// Entries in ascending `(row, col)` order; all counts are positive.
    pub fn iter(&self) -> impl Iterator<Item = ((u64, u64), u64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// Number of structurally non-zero entries.
    pub fn nnz(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all entries: |E| for a JDM, |V| for a DCM.
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn max_row_index(&self) -> Option<u64> {
        self.entries.keys().map(|&(i, _)| i).max()
    }

    pub fn max_col_index(&self) -> Option<u64> {
        self.entries.keys().map(|&(_, j)| j).max()
    }

    /// Logical (row count, column count) when the matrix is read as a dense
    /// array over its kind's index range: `min_index()..=max index present`.
    /// `None` for an empty matrix.
    pub fn logical_dims(&self) -> Option<(u64, u64)> {
        let rows = self.max_row_index()? + 1 - self.kind.min_index();
        let cols = self.max_col_index()? + 1 - self.kind.min_index();
        Some((rows, cols))
    }

    pub fn row_support(&self) -> BTreeSet<u64> {
        self.entries.keys().map(|&(i, _)| i).collect()
    }

    pub fn col_support(&self) -> BTreeSet<u64> {
        self.entries.keys().map(|&(_, j)| j).collect()
    }
}

/// Row and column sums of a sparse degree matrix. Absent degrees sum to zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LineSums {
    rows: BTreeMap<u64, u64>,
    cols: BTreeMap<u64, u64>,
}

impl LineSums {
    pub fn row(&self, i: u64) -> u64 {
        self.rows.get(&i).copied().unwrap_or(0)
    }

    pub fn col(&self, j: u64) -> u64 {
        self.cols.get(&j).copied().unwrap_or(0)
    }

    pub fn rows(&self) -> &BTreeMap<u64, u64> {
        &self.rows
    }

    pub fn cols(&self) -> &BTreeMap<u64, u64> {
        &self.cols
    }

    pub fn row_total(&self) -> u64 {
        self.rows.values().sum()
    }

    pub fn col_total(&self) -> u64 {
        self.cols.values().sum()
    }
}

/// Extracts the joint-degree matrix: entry `(i, j)` counts edges whose source
/// has out-degree `i` and whose target has in-degree `j`. Totals to |E|.
pub fn extract_jdm(g: &DirectedGraph) -> SparseDegreeMatrix {
    let degrees = g.degrees();
    let mut m = SparseDegreeMatrix::new(MatrixKind::Jdm);
    for (u, v) in g.edges() {
        let i = degrees.out_degree(u);
        let j = degrees.in_degree(v);
        m.add(i, j, 1).expect("edge endpoints have positive out/in degree");
    }
    m
}

/// Extracts the degree-correlation matrix: entry `(i, j)` counts nodes with
/// out-degree `i` and in-degree `j`. Totals to |V|.
pub fn extract_dcm(g: &DirectedGraph) -> SparseDegreeMatrix {
    let mut m = SparseDegreeMatrix::new(MatrixKind::Dcm);
    for (_, out, inn) in g.degrees().iter() {
        m.add(out, inn, 1).expect("DCM accepts any indices");
    }
    m
}

pub fn line_sums(m: &SparseDegreeMatrix) -> LineSums {
    let mut sums = LineSums::default();
    for ((i, j), count) in m.iter() {
        *sums.rows.entry(i).or_insert(0) += count;
        *sums.cols.entry(j).or_insert(0) += count;
    }
    sums
}

/// Line-sum consistency between a JDM and a DCM extracted from the same
/// graph: for every out-degree `i >= 1` the JDM row sum must equal `i` times
/// the DCM row sum, and symmetrically for columns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConsistencyReport {
    /// `row sum of A - i * row sum of B` per out-degree with a non-zero residual.
    pub row_residuals: BTreeMap<u64, i64>,
    /// `col sum of A - j * col sum of B` per in-degree with a non-zero residual.
    pub col_residuals: BTreeMap<u64, i64>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.row_residuals.is_empty() && self.col_residuals.is_empty()
    }

    pub fn violations(&self) -> usize {
        self.row_residuals.len() + self.col_residuals.len()
    }
}

pub fn consistency_check(a: &SparseDegreeMatrix, b: &SparseDegreeMatrix) -> ConsistencyReport {
    debug_assert_eq!(a.kind(), MatrixKind::Jdm);
    debug_assert_eq!(b.kind(), MatrixKind::Dcm);
    let a_sums = line_sums(a);
    let b_sums = line_sums(b);
    let mut report = ConsistencyReport::default();

    let rows: BTreeSet<u64> = a_sums
        .rows()
        .keys()
        .chain(b_sums.rows().keys())
        .copied()
        .filter(|&i| i >= 1)
        .collect();
    for i in rows {
        let residual = a_sums.row(i) as i64 - (i * b_sums.row(i)) as i64;
        if residual != 0 {
            report.row_residuals.insert(i, residual);
        }
    }

    let cols: BTreeSet<u64> = a_sums
        .cols()
        .keys()
        .chain(b_sums.cols().keys())
        .copied()
        .filter(|&j| j >= 1)
        .collect();
    for j in cols {
        let residual = a_sums.col(j) as i64 - (j * b_sums.col(j)) as i64;
        if residual != 0 {
            report.col_residuals.insert(j, residual);
        }
    }
    report
}

/// How sparse the two degree matrices of a graph are, relative to its size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityReport {
    pub nodes: u64,
    pub edges: u64,
    pub nnz_dcm: u64,
    pub nnz_jdm: u64,
}

impl SparsityReport {
    /// `nnz_dcm / nodes`, exact.
    pub fn pct_dcm(&self) -> BigRational {
        BigRational::new(BigInt::from(self.nnz_dcm), BigInt::from(self.nodes))
    }

    /// `nnz_jdm / edges`, exact.
    pub fn pct_jdm(&self) -> BigRational {
        BigRational::new(BigInt::from(self.nnz_jdm), BigInt::from(self.edges))
    }
}

/// Counts non-zero entries of both degree matrices. Errors on a graph with no
/// nodes or no edges, where the percentages are undefined.
pub fn sparsity_report(g: &DirectedGraph) -> Result<SparsityReport> {
    if g.node_count() == 0 || g.edge_count() == 0 {
        return Err(Error::UndefinedPercentages);
    }
    Ok(SparsityReport {
        nodes: g.node_count(),
        edges: g.edge_count(),
        nnz_dcm: extract_dcm(g).nnz(),
        nnz_jdm: extract_jdm(g).nnz(),
    })
}

/// Per-line zero fractions of a matrix read against its logical dense extent.
///
/// The coefficient of a line is the fraction of its logical cells that hold
/// zero, so denser lines score lower. Rows or columns with no entries at all
/// score 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityCoefficients {
    row_count: u64,
    col_count: u64,
    nnz_by_row: BTreeMap<u64, u64>,
    nnz_by_col: BTreeMap<u64, u64>,
}

impl SparsityCoefficients {
    /// Logical (rows, cols) of the underlying matrix.
    pub fn dims(&self) -> (u64, u64) {
        (self.row_count, self.col_count)
    }

    pub fn nonzero_in_row(&self, i: u64) -> u64 {
        self.nnz_by_row.get(&i).copied().unwrap_or(0)
    }

    pub fn nonzero_in_col(&self, j: u64) -> u64 {
        self.nnz_by_col.get(&j).copied().unwrap_or(0)
    }

    /// Fraction of zero cells in row `i`.
    pub fn s_row(&self, i: u64) -> BigRational {
        BigRational::new(
            BigInt::from(self.col_count - self.nonzero_in_row(i)),
            BigInt::from(self.col_count),
        )
    }

    /// Fraction of zero cells in column `j`.
    pub fn s_col(&self, j: u64) -> BigRational {
        BigRational::new(
            BigInt::from(self.row_count - self.nonzero_in_col(j)),
            BigInt::from(self.row_count),
        )
    }

    /// Rows with at least one entry, ascending.
    pub fn present_rows(&self) -> Vec<u64> {
        self.nnz_by_row.keys().copied().collect()
    }

    pub fn present_cols(&self) -> Vec<u64> {
        self.nnz_by_col.keys().copied().collect()
    }
}

/// Computes per-row and per-column sparsity coefficients. Errors on an empty
/// matrix, whose logical extent is zero.
pub fn sparsity_coefficients(m: &SparseDegreeMatrix) -> Result<SparsityCoefficients> {
    let (row_count, col_count) = m.logical_dims().ok_or(Error::EmptyMatrix)?;
    let mut nnz_by_row = BTreeMap::new();
    let mut nnz_by_col = BTreeMap::new();
    for ((i, j), _) in m.iter() {
        *nnz_by_row.entry(i).or_insert(0) += 1;
        *nnz_by_col.entry(j).or_insert(0) += 1;
    }
    Ok(SparsityCoefficients { row_count, col_count, nnz_by_row, nnz_by_col })
}
