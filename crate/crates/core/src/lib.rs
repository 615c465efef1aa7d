//! Sampling of large simple directed graphs by linear rescaling of their
//! joint-degree matrix (JDM) and degree-correlation matrix (DCM).
//!
//! The two matrices together pin down a directed graph's degree structure:
//! the JDM counts edges by (source out-degree, target in-degree) and the DCM
//! counts nodes by (out-degree, in-degree). Dividing both by a coefficient
//! `k > 1` and rounding — entries of the JDM down, entries of the DCM up —
//! yields targets for a graph roughly `k` times smaller. The rounding breaks
//! the exact line-sum relation between the two matrices, so a small
//! adjustment matrix with prescribed row/column sums and a per-entry cap is
//! added back to the JDM before a graph is materialised from the pair.
//!
//! The crate is `no_std` (with `alloc`): everything here is exact integer and
//! rational arithmetic plus deterministic, seedable sampling. File formats,
//! serialization and the command-line front end live in the companion `std`
//! crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounded;
pub mod d2k;
pub mod error;
pub mod graph;
pub mod matrices;
pub mod metrics;
pub mod pipeline;
pub mod rescale;
pub mod synth;

pub use bounded::{
    construct, enumerate_feasible, graphical, AdjustmentMatrix, BoundedMatrixInstance,
    GraphicalVerdict,
};
pub use d2k::{check_d2k, construct_graph, D2kViolation, TargetPair};
pub use error::{Error, Result};
pub use graph::{parse_edge_list, write_edge_list, DegreeTable, DirectedGraph, IngestStats, NodeId};
pub use matrices::{
    consistency_check, extract_dcm, extract_jdm, line_sums, sparsity_coefficients,
    sparsity_report, ConsistencyReport, LineSums, MatrixKind, SparseDegreeMatrix,
    SparsityCoefficients, SparsityReport,
};
pub use metrics::{
    correlation_marginals, deviation_bounds, distribution_distance, distributions, verify_bounds,
    BoundEntry, DeviationReport, DistanceReport, Distribution, DistributionSet, Verdict,
};
pub use pipeline::{
    sample, sample_graph_input, Infeasibility, RunOutcome, SampleOptions, SampleSuccess,
};
pub use rescale::{
    derive_adjustment, parse_coefficient, rescale, AdjustmentProblem, RationalMatrix,
    RescaledMatrices, Rounding,
};
pub use synth::{heavy_tailed_digraph, random_simple_digraph, CLASS_BLOCK};

// Re-exported so downstream users handle the exact-arithmetic types without
// pinning their own copy of these crates.
pub use num_bigint;
pub use num_rational;
pub use num_traits;
