//! Degree distributions, deviation bounds for rescaled samples, and
//! distribution distances.
//!
//! Rounding during rescale perturbs the sample's degree-correlation and
//! joint-degree distributions by a bounded amount. The bounds are computed
//! from the exact (un-rounded) rescaled values: for a degree-correlation
//! entry `b̊` the achieved probability lies in
//! `( b̊/(Σb̊ + M − 1), (b̊ + 1)/(Σb̊ + 1) )`, and for a joint-degree entry `å`
//! with adjustment cap `p` in
//! `( (å − 1)/(Σå + Mp − p − 1), (å + p)/(Σå + p − M + 1) )`,
//! where `M` counts the matrix cells that can deviate: all `m·n` logical
//! cells, or, refined, only the non-zero cells in the entry's row and column
//! (zero entries are never perturbed, so sparsity tightens the bounds).
//! Everything is exact rational arithmetic; boundary equality counts as
//! inside.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::matrices::{extract_dcm, extract_jdm, line_sums, SparseDegreeMatrix};
use crate::rescale::RationalMatrix;

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The four degree distributions of a graph, as exact fractions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionSet {
    /// Fraction of nodes with each in-degree.
    pub in_degree: BTreeMap<u64, BigRational>,
    /// Fraction of nodes with each out-degree.
    pub out_degree: BTreeMap<u64, BigRational>,
    /// Fraction of nodes in each (out-degree, in-degree) class.
    pub degree_correlation: BTreeMap<(u64, u64), BigRational>,
    /// Fraction of edges in each (source out-degree, target in-degree) class;
    /// empty for a graph without edges.
    pub joint_degree: BTreeMap<(u64, u64), BigRational>,
    pub node_count: u64,
    pub edge_count: u64,
}

/// Computes all four distributions. Errors on an empty graph, where the
/// node-based distributions are undefined.
pub fn distributions(g: &DirectedGraph) -> Result<DistributionSet> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let e = g.edge_count();

    let mut in_degree: BTreeMap<u64, u64> = BTreeMap::new();
    let mut out_degree: BTreeMap<u64, u64> = BTreeMap::new();
    for (_, out, inn) in g.degrees().iter() {
        *out_degree.entry(out).or_insert(0) += 1;
        *in_degree.entry(inn).or_insert(0) += 1;
    }

    let scale_nodes = |counts: BTreeMap<u64, u64>| {
        counts.into_iter().map(|(key, c)| (key, ratio(c, n))).collect()
    };

    let degree_correlation = extract_dcm(g)
        .iter()
        .map(|(key, c)| (key, ratio(c, n)))
        .collect();
    let joint_degree = if e == 0 {
        BTreeMap::new()
    } else {
        extract_jdm(g).iter().map(|(key, c)| (key, ratio(c, e))).collect()
    };

    Ok(DistributionSet {
        in_degree: scale_nodes(in_degree),
        out_degree: scale_nodes(out_degree),
        degree_correlation,
        joint_degree,
        node_count: n,
        edge_count: e,
    })
}

/// Marginals of a degree-correlation matrix: the out- and in-degree
/// distributions of any graph realizing it.
pub fn correlation_marginals(
    b: &SparseDegreeMatrix,
) -> (BTreeMap<u64, BigRational>, BTreeMap<u64, BigRational>) {
    let sums = line_sums(b);
    let total = b.total();
    let scale = |m: &BTreeMap<u64, u64>| {
        m.iter().map(|(&degree, &c)| (degree, ratio(c, total))).collect()
    };
    (scale(sums.rows()), scale(sums.cols()))
}

/// Which distribution a bound entry constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Correlation,
    Joint,
}

/// Containment verdict for one bound entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Inside,
    Outside,
    /// The interval collapsed (empty interval or non-positive denominator);
    /// containment is not evaluable.
    Degenerate,
    /// The sample carries mass at a class pair outside the bound support —
    /// the adjustment placed edges where the rescaled value was zero.
    Unbounded,
}

/// One per-entry deviation interval, optionally with the achieved value and
/// its verdict once verified against a sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundEntry {
    pub distribution: Distribution,
    pub row: u64,
    pub col: u64,
    /// The exact rescaled value the interval is built from.
    pub ring_value: BigRational,
    /// `(lower, upper)`; `None` when the bound is degenerate. Lower bounds
    /// are clamped at zero (probabilities cannot be negative, and clamping
    /// keeps refined intervals nested inside unrefined ones).
    pub interval: Option<(BigRational, BigRational)>,
    /// Effective row-count factor of `M` (non-zero entries in column `col`
    /// when refined, the full logical row count otherwise).
    pub m_eff: u64,
    /// Effective column-count factor of `M`.
    pub n_eff: u64,
    pub achieved: Option<BigRational>,
    pub verdict: Option<Verdict>,
}

/// Deviation intervals for every supported entry of both rescaled matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationReport {
    /// Correlation entries (ascending), then joint entries (ascending).
    pub entries: Vec<BoundEntry>,
    pub refined: bool,
    /// The adjustment cap `p` the joint bounds assume.
    pub cap: u64,
    /// Logical dimensions of the rescaled JDM grid.
    pub a_dims: (u64, u64),
    /// Logical dimensions of the rescaled DCM grid (zero rows/columns count).
    pub b_dims: (u64, u64),
}

/// Computes the per-entry deviation intervals from the exact rescaled
/// matrices. `cap` is the adjustment cap `p`; `refined` switches `M` from the
/// full grid size to the per-entry non-zero counts.
pub fn deviation_bounds(
    a_ring: &RationalMatrix,
    b_ring: &RationalMatrix,
    cap: u64,
    refined: bool,
) -> DeviationReport {
    let one = || BigRational::from(BigInt::from(1));
    let mut entries = Vec::new();

    let b_dims = b_ring.logical_dims().unwrap_or((0, 0));
    let b_total = b_ring.total();
    for (&(i, j), value) in b_ring.iter() {
        let (m_eff, n_eff) = if refined {
            (b_ring.nnz_in_col(j), b_ring.nnz_in_row(i))
        } else {
            b_dims
        };
        let m_big = BigRational::from(BigInt::from(m_eff * n_eff));
        let lower_den = &b_total + &m_big - one();
        let upper_den = &b_total + one();
        let interval = if lower_den.is_zero()
            || lower_den < BigRational::zero()
            || upper_den <= BigRational::zero()
        {
            None
        } else {
            let lower = value / &lower_den;
            let upper = (value + one()) / &upper_den;
            if lower >= upper {
                None
            } else {
                Some((lower, upper))
            }
        };
        entries.push(BoundEntry {
            distribution: Distribution::Correlation,
            row: i,
            col: j,
            ring_value: value.clone(),
            interval,
            m_eff,
            n_eff,
            achieved: None,
            verdict: None,
        });
    }

    let a_dims = a_ring.logical_dims().unwrap_or((0, 0));
    let a_total = a_ring.total();
    let cap_big = BigRational::from(BigInt::from(cap));
    for (&(i, j), value) in a_ring.iter() {
        let (m_eff, n_eff) = if refined {
            (a_ring.nnz_in_col(j), a_ring.nnz_in_row(i))
        } else {
            a_dims
        };
        let m_big = BigRational::from(BigInt::from(m_eff * n_eff));
        let lower_den = &a_total + &m_big * &cap_big - &cap_big - one();
        let upper_den = &a_total + &cap_big - &m_big + one();
        let interval = if lower_den <= BigRational::zero() || upper_den <= BigRational::zero() {
            None
        } else {
            let lower = ((value - one()) / &lower_den).max(BigRational::zero());
            let upper = (value + &cap_big) / &upper_den;
            if lower >= upper {
                None
            } else {
                Some((lower, upper))
            }
        };
        entries.push(BoundEntry {
            distribution: Distribution::Joint,
            row: i,
            col: j,
            ring_value: value.clone(),
            interval,
            m_eff,
            n_eff,
            achieved: None,
            verdict: None,
        });
    }

    DeviationReport { entries, refined, cap, a_dims, b_dims }
}

/// Fills achieved values from a sample's distributions and marks each entry
/// inside, outside, or degenerate. Sample entries with no bound — class pairs
/// the adjustment invented — are appended with the `Unbounded` verdict.
pub fn verify_bounds(sample: &DistributionSet, report: &DeviationReport) -> DeviationReport {
    let mut out = report.clone();
    for entry in &mut out.entries {
        let achieved = match entry.distribution {
            Distribution::Correlation => sample.degree_correlation.get(&(entry.row, entry.col)),
            Distribution::Joint => sample.joint_degree.get(&(entry.row, entry.col)),
        }
        .cloned()
        .unwrap_or_else(BigRational::zero);
        entry.verdict = Some(match &entry.interval {
            None => Verdict::Degenerate,
            Some((lower, upper)) => {
                if *lower <= achieved && achieved <= *upper {
                    Verdict::Inside
                } else {
                    Verdict::Outside
                }
            }
        });
        entry.achieved = Some(achieved);
    }

    let bounded: alloc::collections::BTreeSet<(u8, u64, u64)> = out
        .entries
        .iter()
        .map(|e| (e.distribution as u8, e.row, e.col))
        .collect();
    let mut extras = Vec::new();
    let mut append = |distribution: Distribution, map: &BTreeMap<(u64, u64), BigRational>| {
        for (&(i, j), achieved) in map {
            if achieved.is_zero() || bounded.contains(&(distribution as u8, i, j)) {
                continue;
            }
            extras.push(BoundEntry {
                distribution,
                row: i,
                col: j,
                ring_value: BigRational::zero(),
                interval: None,
                m_eff: 0,
                n_eff: 0,
                achieved: Some(achieved.clone()),
                verdict: Some(Verdict::Unbounded),
            });
        }
    };
    append(Distribution::Correlation, &sample.degree_correlation);
    append(Distribution::Joint, &sample.joint_degree);
    out.entries.extend(extras);
    out
}

/// L1 distances between two distribution sets, one value per distribution,
/// taken over the union of supports. Total variation is half the L1 value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceReport {
    pub in_degree_l1: BigRational,
    pub out_degree_l1: BigRational,
    pub correlation_l1: BigRational,
    pub joint_l1: BigRational,
}

impl DistanceReport {
    pub fn all_zero(&self) -> bool {
        self.in_degree_l1.is_zero()
            && self.out_degree_l1.is_zero()
            && self.correlation_l1.is_zero()
            && self.joint_l1.is_zero()
    }
}

fn l1<K: Ord + Copy>(
    d1: &BTreeMap<K, BigRational>,
    d2: &BTreeMap<K, BigRational>,
) -> BigRational {
    let mut keys: alloc::collections::BTreeSet<K> = d1.keys().copied().collect();
    keys.extend(d2.keys().copied());
    let zero = BigRational::zero;
    keys.into_iter()
        .map(|k| {
            let a = d1.get(&k).cloned().unwrap_or_else(zero);
            let b = d2.get(&k).cloned().unwrap_or_else(zero);
            if a >= b {
                a - b
            } else {
                b - a
            }
        })
        .fold(BigRational::zero(), |acc, term| acc + term)
}

pub fn distribution_distance(d1: &DistributionSet, d2: &DistributionSet) -> DistanceReport {
    DistanceReport {
        in_degree_l1: l1(&d1.in_degree, &d2.in_degree),
        out_degree_l1: l1(&d1.out_degree, &d2.out_degree),
        correlation_l1: l1(&d1.degree_correlation, &d2.degree_correlation),
        joint_l1: l1(&d1.joint_degree, &d2.joint_degree),
    }
}
