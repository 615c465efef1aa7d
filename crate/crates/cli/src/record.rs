//! The run record: a single JSON document carrying everything needed to
//! re-derive a sample's deviation bounds offline — content hashes of the
//! graphs, the exact rescaled matrices, the adjustment, and the final
//! targets. Rationals are stored as exact `numer/denom` strings; only the
//! human-facing bound values are rendered as decimals.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use dksample_core::num_rational::BigRational;
use dksample_core::{
    parse_coefficient, BoundEntry, DeviationReport, Distribution, Infeasibility, MatrixKind,
    RationalMatrix, Rounding, SampleSuccess, SparseDegreeMatrix, Verdict,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::render::{decimal_sig, fraction, SIG_DIGITS};

pub const SCHEMA_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub command: String,
    pub input: GraphRef,
    /// The sampling coefficient as an exact fraction.
    pub k: String,
    pub rounding: String,
    pub seed: u64,
    pub refined_bounds: bool,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<InfeasibilityDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<GraphRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_ring: Option<Vec<RationalCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_ring: Option<Vec<RationalCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<Vec<IntCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_prime: Option<Vec<IntCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row_delta: Option<Vec<DeltaCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col_delta: Option<Vec<DeltaCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<IntCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_target: Option<Vec<IntCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_target: Option<Vec<IntCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphRef {
    pub sha256: String,
    pub nodes: u64,
    pub edges: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IntCell {
    pub i: u64,
    pub j: u64,
    pub count: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RationalCell {
    pub i: u64,
    pub j: u64,
    /// Exact `numer/denom`.
    pub value: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DeltaCell {
    pub degree: u64,
    pub value: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InfeasibilityDoc {
    pub stage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row_total: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col_total: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demand: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DeviationDoc {
    pub refined: bool,
    pub cap: u64,
    pub entries: Vec<DeviationEntryDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DeviationEntryDoc {
    pub i: u64,
    pub j: u64,
    pub distribution: String,
    /// Decimal bounds at 12 significant digits; `null` when degenerate.
    pub lower: Option<serde_json::Number>,
    pub upper: Option<serde_json::Number>,
    pub achieved: Option<serde_json::Number>,
    pub verdict: String,
}

fn number(r: &BigRational) -> serde_json::Number {
    decimal_sig(r, SIG_DIGITS).parse().expect("decimal renders as a JSON number")
}

pub fn rounding_name(r: Rounding) -> &'static str {
    match r {
        Rounding::FloorCeil => "floor-ceil",
        Rounding::FloorFloor => "floor-floor",
        Rounding::CeilCeil => "ceil-ceil",
        Rounding::RoundRound => "round-round",
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Inside => "inside",
        Verdict::Outside => "outside",
        Verdict::Degenerate => "degenerate",
        Verdict::Unbounded => "unbounded",
    }
}

pub fn distribution_name(d: Distribution) -> &'static str {
    match d {
        Distribution::Correlation => "correlation",
        Distribution::Joint => "joint",
    }
}

pub fn int_cells(m: &SparseDegreeMatrix) -> Vec<IntCell> {
    m.iter().map(|((i, j), count)| IntCell { i, j, count }).collect()
}

pub fn int_cells_from_map(m: &BTreeMap<(u64, u64), u64>) -> Vec<IntCell> {
    m.iter().map(|(&(i, j), &count)| IntCell { i, j, count }).collect()
}

pub fn rational_cells(m: &RationalMatrix) -> Vec<RationalCell> {
    m.iter().map(|(&(i, j), v)| RationalCell { i, j, value: fraction(v) }).collect()
}

pub fn delta_cells(m: &BTreeMap<u64, u64>) -> Vec<DeltaCell> {
    m.iter().map(|(&degree, &value)| DeltaCell { degree, value }).collect()
}

pub fn deviation_doc(report: &DeviationReport) -> DeviationDoc {
    DeviationDoc {
        refined: report.refined,
        cap: report.cap,
        entries: report.entries.iter().map(entry_doc).collect(),
    }
}

pub fn entry_doc(e: &BoundEntry) -> DeviationEntryDoc {
    DeviationEntryDoc {
        i: e.row,
        j: e.col,
        distribution: distribution_name(e.distribution).into(),
        lower: e.interval.as_ref().map(|(lo, _)| number(lo)),
        upper: e.interval.as_ref().map(|(_, hi)| number(hi)),
        achieved: e.achieved.as_ref().map(number),
        verdict: e
            .verdict
            .map(verdict_name)
            .unwrap_or("unevaluated")
            .into(),
    }
}

pub fn infeasibility_doc(inf: &Infeasibility) -> InfeasibilityDoc {
    let mut doc = InfeasibilityDoc {
        stage: String::new(),
        i: None,
        j: None,
        cap: None,
        axis: None,
        degree: None,
        value: None,
        row_total: None,
        col_total: None,
        prefix: None,
        demand: None,
        capacity: None,
    };
    match *inf {
        Infeasibility::NegativeCap { row, col, cap } => {
            doc.stage = "negative-cap".into();
            doc.i = Some(row);
            doc.j = Some(col);
            doc.cap = Some(cap);
        }
        Infeasibility::NegativeDelta { axis, degree, value } => {
            doc.stage = "negative-delta".into();
            doc.axis = Some(axis.to_string());
            doc.degree = Some(degree);
            doc.value = Some(value);
        }
        Infeasibility::StubImbalance { row_total, col_total } => {
            doc.stage = "stub-imbalance".into();
            doc.row_total = Some(row_total);
            doc.col_total = Some(col_total);
        }
        Infeasibility::PrefixViolation { prefix, demand, capacity } => {
            doc.stage = "prefix-violation".into();
            doc.prefix = Some(prefix);
            doc.demand = Some(demand);
            doc.capacity = Some(capacity);
        }
    }
    doc
}

pub struct RecordInputs<'a> {
    pub input: GraphRef,
    pub k: &'a BigRational,
    pub rounding: Rounding,
    pub seed: u64,
    pub refined_bounds: bool,
}

pub fn success_record(base: RecordInputs, s: &SampleSuccess, sample_ref: GraphRef) -> RunRecord {
    RunRecord {
        schema_version: SCHEMA_VERSION,
        command: "sample".into(),
        input: base.input,
        k: fraction(base.k),
        rounding: rounding_name(base.rounding).into(),
        seed: base.seed,
        refined_bounds: base.refined_bounds,
        outcome: "success".into(),
        infeasibility: None,
        sample: Some(sample_ref),
        cap: Some(s.adjustment.cap),
        a_ring: Some(rational_cells(&s.rescaled.a_ring)),
        b_ring: Some(rational_cells(&s.rescaled.b_ring)),
        a_prime: Some(int_cells(&s.rescaled.a_prime)),
        b_prime: Some(int_cells(&s.rescaled.b_prime)),
        row_delta: Some(delta_cells(&s.adjustment.row_delta)),
        col_delta: Some(delta_cells(&s.adjustment.col_delta)),
        d: Some(int_cells_from_map(&s.d)),
        a_target: Some(int_cells(&s.a_target)),
        b_target: Some(int_cells(&s.b_target)),
        deviation: Some(deviation_doc(&s.deviation)),
    }
}

pub fn infeasible_record(base: RecordInputs, inf: &Infeasibility) -> RunRecord {
    RunRecord {
        schema_version: SCHEMA_VERSION,
        command: "sample".into(),
        input: base.input,
        k: fraction(base.k),
        rounding: rounding_name(base.rounding).into(),
        seed: base.seed,
        refined_bounds: base.refined_bounds,
        outcome: "infeasible".into(),
        infeasibility: Some(infeasibility_doc(inf)),
        sample: None,
        cap: None,
        a_ring: None,
        b_ring: None,
        a_prime: None,
        b_prime: None,
        row_delta: None,
        col_delta: None,
        d: None,
        a_target: None,
        b_target: None,
        deviation: None,
    }
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("record serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct VersionProbe {
            schema_version: u32,
        }
        let probe: VersionProbe =
            serde_json::from_str(text).context("run record is not valid JSON")?;
        if probe.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported run-record schema_version {} (expected {})",
                probe.schema_version,
                SCHEMA_VERSION
            );
        }
        serde_json::from_str(text).context("run record is not valid JSON")
    }

    /// Rebuilds the exact rescaled matrices stored in the record.
    pub fn ring_matrices(&self) -> Result<(RationalMatrix, RationalMatrix)> {
        let a = ring_matrix(MatrixKind::Jdm, self.a_ring.as_deref())?;
        let b = ring_matrix(MatrixKind::Dcm, self.b_ring.as_deref())?;
        Ok((a, b))
    }

    pub fn target_matrices(&self) -> Result<(SparseDegreeMatrix, SparseDegreeMatrix)> {
        let a = target_matrix(MatrixKind::Jdm, self.a_target.as_deref())
            .context("record carries no JDM target")?;
        let b = target_matrix(MatrixKind::Dcm, self.b_target.as_deref())
            .context("record carries no DCM target")?;
        Ok((a, b))
    }
}

fn ring_matrix(kind: MatrixKind, cells: Option<&[RationalCell]>) -> Result<RationalMatrix> {
    let cells = cells.unwrap_or(&[]);
    let mut entries = Vec::with_capacity(cells.len());
    for c in cells {
        let v = parse_coefficient(&c.value)
            .with_context(|| format!("bad rational at ({}, {}): {:?}", c.i, c.j, c.value))?;
        entries.push(((c.i, c.j), v));
    }
    Ok(RationalMatrix::from_entries(kind, entries))
}

fn target_matrix(kind: MatrixKind, cells: Option<&[IntCell]>) -> Result<SparseDegreeMatrix> {
    let cells = cells.context("missing matrix section")?;
    let mut m = SparseDegreeMatrix::new(kind);
    for c in cells {
        m.add(c.i, c.j, c.count)
            .with_context(|| format!("bad entry at ({}, {})", c.i, c.j))?;
    }
    Ok(m)
}
