//! End-to-end sampling: extract, rescale, derive the adjustment, test
//! feasibility, construct the adjustment matrix, assemble targets, and build
//! the sample graph.
//!
//! Infeasibility is a first-class outcome, not an error: the run reports
//! which stage rejected the instance and with what witness, so callers
//! sweeping over sample coefficients can classify results programmatically.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_rational::BigRational;

use crate::bounded::{construct, graphical, BoundedMatrixInstance, GraphicalVerdict};
use crate::d2k::{check_d2k, construct_graph, TargetPair};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::matrices::{extract_dcm, extract_jdm, SparseDegreeMatrix};
use crate::metrics::{deviation_bounds, distributions, verify_bounds, DeviationReport};
use crate::rescale::{derive_adjustment, rescale, AdjustmentProblem, RescaledMatrices, Rounding};

/// Knobs for one sampling run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleOptions {
    pub k: BigRational,
    pub seed: u64,
    pub rounding: Rounding,
    /// Use the sparsity-refined deviation bounds (the default) instead of the
    /// full-grid ones.
    pub refined_bounds: bool,
}

impl SampleOptions {
    pub fn new(k: BigRational) -> Self {
        Self { k, seed: 0, rounding: Rounding::default(), refined_bounds: true }
    }
}

/// A completed run with its full provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSuccess {
    pub graph: DirectedGraph,
    pub rescaled: RescaledMatrices,
    pub adjustment: AdjustmentProblem,
    /// The constructed adjustment matrix, keyed by degree pair; zero entries
    /// omitted.
    pub d: BTreeMap<(u64, u64), u64>,
    /// Final JDM target: rescaled JDM plus the adjustment.
    pub a_target: SparseDegreeMatrix,
    /// Final DCM target: the rescaled DCM unchanged.
    pub b_target: SparseDegreeMatrix,
    /// Deviation bounds with achieved values and verdicts filled in.
    pub deviation: DeviationReport,
}

/// Why a run was rejected, and at which stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Infeasibility {
    /// Some class pair has less headroom than its rescaled edge count; no
    /// non-negative adjustment exists.
    NegativeCap { row: u64, col: u64, cap: i64 },
    /// A degree ended up oversupplied with edges after rounding. Only
    /// reachable under non-default rounding modes.
    NegativeDelta { axis: char, degree: u64, value: i64 },
    /// Rounding perturbed out-stub and in-stub totals differently, so the
    /// adjustment line sums cannot balance.
    StubImbalance { row_total: u64, col_total: u64 },
    /// Line sums balance but the `prefix` most demanding columns exceed what
    /// the rows can supply under the cap.
    PrefixViolation { prefix: usize, demand: u64, capacity: u64 },
}

/// Outcome of a sampling run: a sample with provenance, or a diagnosis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Success(Box<SampleSuccess>),
    Infeasible(Infeasibility),
}

impl RunOutcome {
    pub fn success(&self) -> Option<&SampleSuccess> {
        match self {
            RunOutcome::Success(s) => Some(s),
            RunOutcome::Infeasible(_) => None,
        }
    }

    pub fn infeasibility(&self) -> Option<&Infeasibility> {
        match self {
            RunOutcome::Success(_) => None,
            RunOutcome::Infeasible(i) => Some(i),
        }
    }
}

/// Runs the full sampling pipeline on a matrix pair.
pub fn sample(
    a: &SparseDegreeMatrix,
    b: &SparseDegreeMatrix,
    opts: &SampleOptions,
) -> Result<RunOutcome> {
    let rm = rescale(a, b, &opts.k, opts.rounding)?;

    let adjustment = match derive_adjustment(&rm) {
        Ok(adj) => adj,
        Err(Error::NegativeCap { row, col, cap }) => {
            return Ok(RunOutcome::Infeasible(Infeasibility::NegativeCap { row, col, cap }));
        }
        Err(Error::NegativeDelta { axis, degree, value }) => {
            return Ok(RunOutcome::Infeasible(Infeasibility::NegativeDelta {
                axis,
                degree,
                value,
            }));
        }
        Err(e) => return Err(e),
    };

    let row_degrees: Vec<u64> = adjustment.row_delta.keys().copied().collect();
    let col_degrees: Vec<u64> = adjustment.col_delta.keys().copied().collect();
    let instance = BoundedMatrixInstance::new(
        adjustment.row_delta.values().copied().collect(),
        adjustment.col_delta.values().copied().collect(),
        adjustment.cap,
    );

    match graphical(&instance) {
        GraphicalVerdict::Feasible => {}
        GraphicalVerdict::SumMismatch { row_total, col_total } => {
            return Ok(RunOutcome::Infeasible(Infeasibility::StubImbalance {
                row_total,
                col_total,
            }));
        }
        GraphicalVerdict::PrefixViolation { prefix, demand, capacity } => {
            return Ok(RunOutcome::Infeasible(Infeasibility::PrefixViolation {
                prefix,
                demand,
                capacity,
            }));
        }
    }

    let d_matrix = construct(&instance)?;
    let mut d = BTreeMap::new();
    let mut a_target = rm.a_prime.clone();
    for ((r, c), v) in d_matrix.iter() {
        let (i, j) = (row_degrees[r], col_degrees[c]);
        d.insert((i, j), v);
        a_target.add(i, j, v)?;
    }
    let b_target = rm.b_prime.clone();

    // Feasibility of the adjustment is supposed to imply realizability of the
    // targets; a violation here is a bug upstream, never a samplable state.
    let targets = TargetPair { a_target, b_target };
    let violations = check_d2k(&targets);
    if !violations.is_empty() {
        return Err(Error::InvariantBreach(
            "adjusted targets fail the realizability check".into(),
        ));
    }

    let graph = construct_graph(&targets, opts.seed)?;

    let report = deviation_bounds(&rm.a_ring, &rm.b_ring, adjustment.cap, opts.refined_bounds);
    let deviation = if graph.is_empty() {
        report
    } else {
        verify_bounds(&distributions(&graph)?, &report)
    };

    Ok(RunOutcome::Success(Box::new(SampleSuccess {
        graph,
        rescaled: rm,
        adjustment,
        d,
        a_target: targets.a_target,
        b_target: targets.b_target,
        deviation,
    })))
}

/// Extracts the degree matrices of `g` and runs the pipeline on them.
pub fn sample_graph_input(g: &DirectedGraph, opts: &SampleOptions) -> Result<RunOutcome> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    sample(&extract_jdm(g), &extract_dcm(g), opts)
}
