use alloc::string::String;
use core::fmt;

/// Errors raised by the sampling library.
///
/// Infeasibility of a sampling run is *not* an error; it is reported as a
/// first-class outcome by the pipeline (see [`crate::pipeline::Infeasibility`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An edge-list line whose first two tokens are not non-negative integers.
    Parse { line: usize, message: String },
    /// A self-loop was handed to a constructor that does not sanitize input.
    SelfLoop { node: u64 },
    /// A duplicate ordered edge was handed to a strict constructor.
    DuplicateEdge { source: u64, target: u64 },
    /// A joint-degree matrix entry with a zero row or column index.
    InvalidJdmIndex { row: u64, col: u64 },
    /// The operation needs a non-empty graph.
    EmptyGraph,
    /// Percentages are undefined for a graph without nodes or edges.
    UndefinedPercentages,
    /// Sparsity coefficients are undefined for a matrix with no logical extent.
    EmptyMatrix,
    /// The sample coefficient must be a positive rational.
    InvalidCoefficient(String),
    /// The joint-degree and degree-correlation matrices disagree on line sums.
    InconsistentInput { violations: usize },
    /// A rescale delta came out negative; only possible under non-default
    /// rounding modes. `axis` is `'r'` for rows, `'c'` for columns.
    NegativeDelta { axis: char, degree: u64, value: i64 },
    /// The uniform cap for the adjustment matrix is negative at `(row, col)`;
    /// no non-negative adjustment can respect the class-pair capacities.
    NegativeCap { row: u64, col: u64, cap: i64 },
    /// `construct` was called on an instance that fails the feasibility test.
    InfeasibleInstance,
    /// `enumerate_feasible` refuses instances beyond its search budget.
    InstanceTooLarge,
    /// Target matrices violate the realizability condition.
    UnrealizableTargets { violations: usize },
    /// An internal postcondition failed. Always a bug, never an expected outcome.
    InvariantBreach(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            Error::DuplicateEdge { source, target } => {
                write!(f, "duplicate edge ({source}, {target})")
            }
            Error::InvalidJdmIndex { row, col } => {
                write!(f, "joint-degree matrix index ({row}, {col}) out of range: both must be >= 1")
            }
            Error::EmptyGraph => write!(f, "operation undefined on an empty graph"),
            Error::UndefinedPercentages => {
                write!(f, "undefined percentages: graph has no nodes or no edges")
            }
            Error::EmptyMatrix => write!(f, "matrix has no logical rows or columns"),
            Error::InvalidCoefficient(text) => {
                write!(f, "invalid sample coefficient {text:?}: expected a positive rational")
            }
            Error::InconsistentInput { violations } => write!(
                f,
                "joint-degree and degree-correlation matrices are inconsistent ({violations} line-sum violations)"
            ),
            Error::NegativeDelta { axis, degree, value } => {
                write!(f, "negative {axis}-delta {value} at degree {degree}")
            }
            Error::NegativeCap { row, col, cap } => {
                write!(f, "adjustment cap negative at ({row}, {col}): {cap}")
            }
            Error::InfeasibleInstance => {
                write!(f, "construct called on an infeasible instance")
            }
            Error::InstanceTooLarge => {
                write!(f, "instance too large for exhaustive enumeration")
            }
            Error::UnrealizableTargets { violations } => {
                write!(f, "target matrices are not realizable ({violations} violations)")
            }
            Error::InvariantBreach(what) => write!(f, "invariant breach: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
