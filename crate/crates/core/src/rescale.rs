//! Linear rescaling of the degree matrices and derivation of the adjustment
//! problem.
//!
//! Dividing the JDM and DCM by a coefficient `k` gives rational matrices
//! whose entries must be integerized before a graph can realize them: JDM
//! entries are rounded down, DCM entries up. Rounding in opposite directions
//! breaks the line-sum coupling between the two matrices; the shortfall per
//! degree (`row_delta`, `col_delta`) and the per-entry headroom (`cap_matrix`,
//! minimized into the uniform cap) describe the adjustment matrix that
//! restores it.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrices::{consistency_check, line_sums, MatrixKind, SparseDegreeMatrix};

/// How each matrix is integerized after division by `k`.
///
/// `FloorCeil` (JDM down, DCM up) is the default and the only mode whose
/// adjustment deltas are guaranteed non-negative; the others are exposed for
/// experimentation and may fail with [`Error::NegativeDelta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    FloorCeil,
    FloorFloor,
    CeilCeil,
    RoundRound,
}

impl Rounding {
    fn apply_jdm(self, v: &BigRational) -> BigInt {
        match self {
            Rounding::FloorCeil | Rounding::FloorFloor => v.floor().to_integer(),
            Rounding::CeilCeil => v.ceil().to_integer(),
            Rounding::RoundRound => v.round().to_integer(),
        }
    }

    fn apply_dcm(self, v: &BigRational) -> BigInt {
        match self {
            Rounding::FloorCeil | Rounding::CeilCeil => v.ceil().to_integer(),
            Rounding::FloorFloor => v.floor().to_integer(),
            Rounding::RoundRound => v.round().to_integer(),
        }
    }
}

/// A sparse matrix of exact non-negative rationals, keyed like
/// [`SparseDegreeMatrix`]. Holds the un-rounded rescaled values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    kind: MatrixKind,
    entries: BTreeMap<(u64, u64), BigRational>,
}

impl RationalMatrix {
    /// Builds a matrix from `((row, col), value)` pairs; zero values are
    /// dropped.
    pub fn from_entries<I>(kind: MatrixKind, entries: I) -> Self
    where
        I: IntoIterator<Item = ((u64, u64), BigRational)>,
    {
        Self {
            kind,
            entries: entries.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn get(&self, row: u64, col: u64) -> BigRational {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u64, u64), &BigRational)> + '_ {
        self.entries.iter()
    }

    pub fn nnz(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn total(&self) -> BigRational {
        self.entries.values().fold(BigRational::zero(), |acc, v| acc + v)
    }

    pub fn contains(&self, row: u64, col: u64) -> bool {
        self.entries.contains_key(&(row, col))
    }

    /// Logical dense dimensions, as in [`SparseDegreeMatrix::logical_dims`].
    pub fn logical_dims(&self) -> Option<(u64, u64)> {
        let rows = self.entries.keys().map(|&(i, _)| i).max()? + 1 - self.kind.min_index();
        let cols = self.entries.keys().map(|&(_, j)| j).max()? + 1 - self.kind.min_index();
        Some((rows, cols))
    }

    /// Count of non-zero entries in row `i`.
    pub fn nnz_in_row(&self, i: u64) -> u64 {
        self.entries.keys().filter(|&&(r, _)| r == i).count() as u64
    }

    /// Count of non-zero entries in column `j`.
    pub fn nnz_in_col(&self, j: u64) -> u64 {
        self.entries.keys().filter(|&&(_, c)| c == j).count() as u64
    }
}

/// Output of the rescale stage: integerized matrices plus the exact rational
/// values they were rounded from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RescaledMatrices {
    pub a_prime: SparseDegreeMatrix,
    pub b_prime: SparseDegreeMatrix,
    pub a_ring: RationalMatrix,
    pub b_ring: RationalMatrix,
    pub k: BigRational,
    pub rounding: Rounding,
}

/// Divides both matrices by `k` and integerizes the quotients.
///
/// JDM entries that round to zero are dropped from the sparse result (their
/// exact values remain in `a_ring`); originally-zero entries stay zero.
pub fn rescale(
    a: &SparseDegreeMatrix,
    b: &SparseDegreeMatrix,
    k: &BigRational,
    rounding: Rounding,
) -> Result<RescaledMatrices> {
    if !k.is_positive() {
        return Err(Error::InvalidCoefficient(k.to_string()));
    }
    let report = consistency_check(a, b);
    if !report.is_consistent() {
        return Err(Error::InconsistentInput { violations: report.violations() });
    }

    let mut a_ring = RationalMatrix { kind: MatrixKind::Jdm, entries: BTreeMap::new() };
    let mut a_prime = SparseDegreeMatrix::new(MatrixKind::Jdm);
    for ((i, j), count) in a.iter() {
        let exact = BigRational::from(BigInt::from(count)) / k;
        let rounded = rounding.apply_jdm(&exact);
        a_prime.add(i, j, big_to_u64(&rounded)?)?;
        a_ring.entries.insert((i, j), exact);
    }

    let mut b_ring = RationalMatrix { kind: MatrixKind::Dcm, entries: BTreeMap::new() };
    let mut b_prime = SparseDegreeMatrix::new(MatrixKind::Dcm);
    for ((i, j), count) in b.iter() {
        let exact = BigRational::from(BigInt::from(count)) / k;
        let rounded = rounding.apply_dcm(&exact);
        b_prime.add(i, j, big_to_u64(&rounded)?)?;
        b_ring.entries.insert((i, j), exact);
    }

    Ok(RescaledMatrices { a_prime, b_prime, a_ring, b_ring, k: k.clone(), rounding })
}

fn big_to_u64(v: &BigInt) -> Result<u64> {
    v.to_u64().ok_or_else(|| Error::InvariantBreach("rounded entry exceeds u64".into()))
}

/// The adjustment problem: how much each degree's stub count fell short after
/// rounding, and how much headroom each class pair has for extra edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustmentProblem {
    /// Out-stub shortfall per out-degree `i >= 1`: `i * row_sum(B') - row_sum(A')`.
    /// Degrees whose shortfall is zero are retained so the adjustment matrix
    /// aligns with the rescaled JDM.
    pub row_delta: BTreeMap<u64, u64>,
    /// In-stub shortfall per in-degree `j >= 1`.
    pub col_delta: BTreeMap<u64, u64>,
    /// Headroom `l_ij = row_sum(B', i) * col_sum(B', j) - b'_ij` per class
    /// pair in the positive-degree support of `B'`.
    pub cap_matrix: BTreeMap<(u64, u64), u64>,
    /// Uniform entry cap: minimum over `cap_matrix` of `l_ij - a'_ij`.
    /// Zero for an empty support.
    pub cap: u64,
    /// The class pair attaining the cap, if the support is non-empty.
    pub cap_argmin: Option<(u64, u64)>,
}

/// Computes stub deltas, the headroom matrix, and the uniform cap.
///
/// Fails with [`Error::NegativeDelta`] when a rounding mode other than the
/// default leaves a degree oversupplied, and with [`Error::NegativeCap`] when
/// some class pair lacks room for even its rounded edge count.
pub fn derive_adjustment(rm: &RescaledMatrices) -> Result<AdjustmentProblem> {
    let a_sums = line_sums(&rm.a_prime);
    let b_sums = line_sums(&rm.b_prime);

    let mut row_delta = BTreeMap::new();
    let rows: BTreeSet<u64> = a_sums
        .rows()
        .keys()
        .chain(b_sums.rows().keys())
        .copied()
        .filter(|&i| i >= 1)
        .collect();
    for i in rows {
        let value = (i as i128) * (b_sums.row(i) as i128) - (a_sums.row(i) as i128);
        if value < 0 {
            return Err(Error::NegativeDelta { axis: 'r', degree: i, value: value as i64 });
        }
        row_delta.insert(i, value as u64);
    }

    let mut col_delta = BTreeMap::new();
    let cols: BTreeSet<u64> = a_sums
        .cols()
        .keys()
        .chain(b_sums.cols().keys())
        .copied()
        .filter(|&j| j >= 1)
        .collect();
    for j in cols {
        let value = (j as i128) * (b_sums.col(j) as i128) - (a_sums.col(j) as i128);
        if value < 0 {
            return Err(Error::NegativeDelta { axis: 'c', degree: j, value: value as i64 });
        }
        col_delta.insert(j, value as u64);
    }

    // Headroom is tracked over every class pair edges could occupy in the
    // sample — the positive-degree row/column support of B' — not just where
    // A' already has entries, because the adjustment may place edges anywhere.
    let b_rows: BTreeSet<u64> =
        rm.b_prime.row_support().into_iter().filter(|&i| i >= 1).collect();
    let b_cols: BTreeSet<u64> =
        rm.b_prime.col_support().into_iter().filter(|&j| j >= 1).collect();

    let mut cap_matrix = BTreeMap::new();
    let mut cap: Option<(i128, (u64, u64))> = None;
    for &i in &b_rows {
        for &j in &b_cols {
            let l = (b_sums.row(i) as i128) * (b_sums.col(j) as i128)
                - rm.b_prime.get(i, j) as i128;
            cap_matrix.insert((i, j), l as u64);
            let slack = l - rm.a_prime.get(i, j) as i128;
            if cap.is_none_or(|(best, _)| slack < best) {
                cap = Some((slack, (i, j)));
            }
        }
    }

    match cap {
        Some((slack, at)) if slack < 0 => {
            Err(Error::NegativeCap { row: at.0, col: at.1, cap: slack as i64 })
        }
        Some((slack, at)) => Ok(AdjustmentProblem {
            row_delta,
            col_delta,
            cap_matrix,
            cap: slack as u64,
            cap_argmin: Some(at),
        }),
        None => Ok(AdjustmentProblem {
            row_delta,
            col_delta,
            cap_matrix,
            cap: 0,
            cap_argmin: None,
        }),
    }
}

/// Parses a sample coefficient given as an integer (`"3"`), a fraction
/// (`"5/2"`), or a decimal (`"2.5"`), converting exactly. Rejects
/// non-positive values.
pub fn parse_coefficient(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidCoefficient(String::from(text));
    let t = text.trim();
    // Only positive values are ever valid; rejecting the sign up front also
    // sidesteps the "-0.5" decimal case, where parsing "-0" loses the sign.
    if t.starts_with('-') {
        return Err(bad());
    }
    let value = if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        BigRational::new(num, den)
    } else if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int_part: BigInt = if int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        BigRational::new(&int_part * &scale + frac, scale)
    } else {
        let int: BigInt = t.parse().map_err(|_| bad())?;
        BigRational::from(int)
    };
    if !value.is_positive() {
        return Err(bad());
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;
    use crate::matrices::{extract_dcm, extract_jdm};
    use alloc::vec::Vec;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn jdm(entries: &[((u64, u64), u64)]) -> SparseDegreeMatrix {
        SparseDegreeMatrix::from_entries(MatrixKind::Jdm, entries.iter().copied()).unwrap()
    }

    fn dcm(entries: &[((u64, u64), u64)]) -> SparseDegreeMatrix {
        SparseDegreeMatrix::from_entries(MatrixKind::Dcm, entries.iter().copied()).unwrap()
    }

    /// Wraps already-integerized matrices so adjustment derivation can be
    /// exercised on post-rounding states that no consistent input produces.
    fn premade(a_prime: SparseDegreeMatrix, b_prime: SparseDegreeMatrix) -> RescaledMatrices {
        let a_ring = RationalMatrix {
            kind: MatrixKind::Jdm,
            entries: a_prime
                .iter()
                .map(|(key, v)| (key, BigRational::from(BigInt::from(v))))
                .collect(),
        };
        let b_ring = RationalMatrix {
            kind: MatrixKind::Dcm,
            entries: b_prime
                .iter()
                .map(|(key, v)| (key, BigRational::from(BigInt::from(v))))
                .collect(),
        };
        RescaledMatrices {
            a_prime,
            b_prime,
            a_ring,
            b_ring,
            k: rat(2, 1),
            rounding: Rounding::FloorCeil,
        }
    }

    #[test]
    fn floor_and_ceiling_by_two() {
        // Line-sum-consistent pair (one out-5 class, one in-5 class, 5 edges);
        // rescaling never asks whether the pair is realizable as a graph.
        let a = jdm(&[((5, 5), 5)]);
        let b = dcm(&[((5, 0), 1), ((0, 5), 1)]);
        let rm = rescale(&a, &b, &rat(2, 1), Rounding::FloorCeil).unwrap();
        assert_eq!(rm.a_prime.get(5, 5), 2); // floor(5/2)
        assert_eq!(rm.b_prime.get(5, 0), 1); // ceil(1/2)
        assert_eq!(rm.a_ring.get(5, 5), rat(5, 2));
        assert_eq!(rm.b_ring.get(0, 5), rat(1, 2));
    }

    #[test]
    fn ceiling_of_five_halves_is_three() {
        let b = dcm(&[((1, 0), 5), ((0, 1), 5)]);
        let a = jdm(&[((1, 1), 5)]);
        let rm = rescale(&a, &b, &rat(2, 1), Rounding::FloorCeil).unwrap();
        assert_eq!(rm.b_prime.get(1, 0), 3);
        assert_eq!(rm.a_prime.get(1, 1), 2);
    }

    #[test]
    fn identity_at_k_one() {
        let g = parse_edge_list("1 2\n2 3\n1 3\n").unwrap().0;
        let (a, b) = (extract_jdm(&g), extract_dcm(&g));
        let rm = rescale(&a, &b, &rat(1, 1), Rounding::FloorCeil).unwrap();
        assert_eq!(rm.a_prime, a);
        assert_eq!(rm.b_prime, b);
    }

    #[test]
    fn exact_rational_three_over_three_halves() {
        let a = jdm(&[((1, 3), 3)]);
        let b = dcm(&[((1, 0), 3), ((0, 3), 1)]);
        let rm = rescale(&a, &b, &rat(3, 2), Rounding::FloorCeil).unwrap();
        assert_eq!(rm.a_ring.get(1, 3), rat(2, 1)); // 3 / (3/2) is exactly 2
        assert_eq!(rm.a_prime.get(1, 3), 2);
    }

    #[test]
    fn entries_flooring_to_zero_leave_the_support() {
        let a = jdm(&[((1, 1), 1)]);
        let b = dcm(&[((1, 0), 1), ((0, 1), 1)]);
        let rm = rescale(&a, &b, &rat(2, 1), Rounding::FloorCeil).unwrap();
        assert!(rm.a_prime.is_empty());
        assert_eq!(rm.a_ring.get(1, 1), rat(1, 2)); // exact value retained
        // B support is preserved: ceilings of positive values stay positive.
        assert_eq!(rm.b_prime.get(1, 0), 1);
        assert_eq!(rm.b_prime.get(0, 1), 1);
    }

    #[test]
    fn rejects_bad_coefficient_and_inconsistent_pair() {
        let a = jdm(&[((1, 1), 1)]);
        let b = dcm(&[((1, 0), 1), ((0, 1), 1)]);
        assert!(matches!(
            rescale(&a, &b, &rat(0, 1), Rounding::FloorCeil),
            Err(Error::InvalidCoefficient(_))
        ));
        assert!(matches!(
            rescale(&a, &b, &rat(-2, 1), Rounding::FloorCeil),
            Err(Error::InvalidCoefficient(_))
        ));
        let a_bad = jdm(&[((1, 1), 2)]);
        assert_eq!(
            rescale(&a_bad, &b, &rat(2, 1), Rounding::FloorCeil),
            Err(Error::InconsistentInput { violations: 2 })
        );
    }

    #[test]
    fn rounding_mode_matrix() {
        let a = jdm(&[((5, 5), 5)]);
        let b = dcm(&[((5, 0), 1), ((0, 5), 1)]);
        let k = rat(2, 1);
        let rm = rescale(&a, &b, &k, Rounding::FloorFloor).unwrap();
        assert_eq!((rm.a_prime.get(5, 5), rm.b_prime.get(5, 0)), (2, 0));
        let rm = rescale(&a, &b, &k, Rounding::CeilCeil).unwrap();
        assert_eq!((rm.a_prime.get(5, 5), rm.b_prime.get(5, 0)), (3, 1));
        let rm = rescale(&a, &b, &k, Rounding::RoundRound).unwrap();
        // 5/2 rounds half away from zero to 3; 1/2 likewise to 1.
        assert_eq!((rm.a_prime.get(5, 5), rm.b_prime.get(5, 0)), (3, 1));
    }

    #[test]
    fn adjustment_with_positive_cap() {
        let rm = premade(jdm(&[((1, 1), 1)]), dcm(&[((1, 1), 2)]));
        let adj = derive_adjustment(&rm).unwrap();
        assert_eq!(adj.row_delta, BTreeMap::from([(1, 1)])); // 1*2 - 1
        assert_eq!(adj.col_delta, BTreeMap::from([(1, 1)]));
        assert_eq!(adj.cap_matrix, BTreeMap::from([((1, 1), 2)])); // 2*2 - 2
        assert_eq!(adj.cap, 1); // 2 - 1
        assert_eq!(adj.cap_argmin, Some((1, 1)));
    }

    #[test]
    fn adjustment_with_zero_cap() {
        let rm = premade(jdm(&[((1, 1), 1)]), dcm(&[((1, 0), 1), ((0, 1), 1)]));
        let adj = derive_adjustment(&rm).unwrap();
        assert_eq!(adj.row_delta, BTreeMap::from([(1, 0)])); // 1*1 - 1
        assert_eq!(adj.col_delta, BTreeMap::from([(1, 0)]));
        assert_eq!(adj.cap_matrix, BTreeMap::from([((1, 1), 1)])); // 1*1 - 0
        assert_eq!(adj.cap, 0); // forces an all-zero adjustment
    }

    #[test]
    fn adjustment_is_zero_at_k_one() {
        let g = parse_edge_list("1 2\n2 3\n1 3\n4 1\n").unwrap().0;
        let rm = rescale(
            &extract_jdm(&g),
            &extract_dcm(&g),
            &rat(1, 1),
            Rounding::FloorCeil,
        )
        .unwrap();
        let adj = derive_adjustment(&rm).unwrap();
        assert!(adj.row_delta.values().all(|&v| v == 0));
        assert!(adj.col_delta.values().all(|&v| v == 0));
    }

    #[test]
    fn pipeline_trace_three_disjoint_edges_halved() {
        let a = jdm(&[((1, 1), 3)]);
        let b = dcm(&[((1, 0), 3), ((0, 1), 3)]);
        let rm = rescale(&a, &b, &rat(2, 1), Rounding::FloorCeil).unwrap();
        assert_eq!(rm.a_prime.get(1, 1), 1);
        assert_eq!(rm.b_prime.get(1, 0), 2);
        assert_eq!(rm.b_prime.get(0, 1), 2);
        let adj = derive_adjustment(&rm).unwrap();
        assert_eq!(adj.row_delta, BTreeMap::from([(1, 1)])); // 1*2 - 1
        assert_eq!(adj.col_delta, BTreeMap::from([(1, 1)]));
        assert_eq!(adj.cap_matrix.get(&(1, 1)), Some(&4)); // 2*2 - 0
        assert_eq!(adj.cap, 3); // 4 - 1
    }

    #[test]
    fn negative_delta_under_floor_floor() {
        // Three sources of out-degree 2 into six sinks. Flooring B halves the
        // source class to 1 node (2 out-stubs) while A' keeps 3 edges.
        let a = jdm(&[((2, 1), 6)]);
        let b = dcm(&[((2, 0), 3), ((0, 1), 6)]);
        let rm = rescale(&a, &b, &rat(2, 1), Rounding::FloorFloor).unwrap();
        assert_eq!(rm.a_prime.get(2, 1), 3);
        assert_eq!(rm.b_prime.get(2, 0), 1);
        assert_eq!(
            derive_adjustment(&rm),
            Err(Error::NegativeDelta { axis: 'r', degree: 2, value: -1 })
        );
    }

    #[test]
    fn zero_preservation() {
        let g = parse_edge_list("1 2\n1 3\n1 4\n2 1\n3 4\n").unwrap().0;
        let (a, b) = (extract_jdm(&g), extract_dcm(&g));
        let rm = rescale(&a, &b, &rat(5, 3), Rounding::FloorCeil).unwrap();
        for (key, _) in rm.a_prime.iter() {
            assert!(a.get(key.0, key.1) > 0);
        }
        let b_support: Vec<_> = b.iter().map(|(key, _)| key).collect();
        let bp_support: Vec<_> = rm.b_prime.iter().map(|(key, _)| key).collect();
        assert_eq!(b_support, bp_support);
    }

    #[test]
    fn empty_matrices_yield_empty_adjustment() {
        let rm = premade(
            SparseDegreeMatrix::new(MatrixKind::Jdm),
            SparseDegreeMatrix::new(MatrixKind::Dcm),
        );
        let adj = derive_adjustment(&rm).unwrap();
        assert!(adj.row_delta.is_empty());
        assert!(adj.cap_matrix.is_empty());
        assert_eq!(adj.cap, 0);
        assert_eq!(adj.cap_argmin, None);
    }

    #[test]
    fn coefficient_parsing() {
        assert_eq!(parse_coefficient("5/2").unwrap(), rat(5, 2));
        assert_eq!(parse_coefficient("2.5").unwrap(), rat(5, 2));
        assert_eq!(parse_coefficient("3").unwrap(), rat(3, 1));
        assert_eq!(parse_coefficient(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_coefficient("10/4").unwrap(), rat(5, 2));
        assert_eq!(parse_coefficient(" 2 ").unwrap(), rat(2, 1));
        for bad in ["0", "-1", "0/3", "1/0", "abc", "1.2.3", "2.", "", "1e3", "-0.5"] {
            assert!(parse_coefficient(bad).is_err(), "{bad:?} should be rejected");
        }
    }
}
