//! Report rendering for the inspection commands. Every format is
//! deterministic: map-backed data is emitted in key order and numbers go
//! through the exact decimal renderer.

use dksample_core::num_rational::BigRational;
use dksample_core::{DistanceReport, SparseDegreeMatrix, SparsityReport};
use serde::Serialize;

use crate::record::{DeviationEntryDoc, GraphRef, SCHEMA_VERSION};
use crate::render::{decimal_sig, percent2, SIG_DIGITS};

fn pct_number(r: &BigRational) -> serde_json::Number {
    percent2(r).parse().expect("percentage renders as a JSON number")
}

#[derive(Serialize)]
struct StatsDoc {
    schema_version: u32,
    nodes: u64,
    edges: u64,
    nnz_dcm: u64,
    nnz_jdm: u64,
    pct_dcm: serde_json::Number,
    pct_jdm: serde_json::Number,
}

pub fn stats_json(r: &SparsityReport) -> String {
    let doc = StatsDoc {
        schema_version: SCHEMA_VERSION,
        nodes: r.nodes,
        edges: r.edges,
        nnz_dcm: r.nnz_dcm,
        nnz_jdm: r.nnz_jdm,
        pct_dcm: pct_number(&r.pct_dcm()),
        pct_jdm: pct_number(&r.pct_jdm()),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("stats serialize");
    out.push('\n');
    out
}

pub fn stats_tsv(r: &SparsityReport) -> String {
    format!(
        "nodes\tedges\tnnz_dcm\tnnz_jdm\tpct_dcm\tpct_jdm\n{}\t{}\t{}\t{}\t{}\t{}\n",
        r.nodes,
        r.edges,
        r.nnz_dcm,
        r.nnz_jdm,
        percent2(&r.pct_dcm()),
        percent2(&r.pct_jdm()),
    )
}

pub fn stats_text(r: &SparsityReport) -> String {
    let headers = ["nodes", "edges", "nnz_dcm", "nnz_jdm", "pct_dcm", "pct_jdm"];
    let values = [
        r.nodes.to_string(),
        r.edges.to_string(),
        r.nnz_dcm.to_string(),
        r.nnz_jdm.to_string(),
        format!("{}%", percent2(&r.pct_dcm())),
        format!("{}%", percent2(&r.pct_jdm())),
    ];
    let mut head = String::new();
    let mut row = String::new();
    for (h, v) in headers.iter().zip(&values) {
        let w = h.len().max(v.len());
        if !head.is_empty() {
            head.push_str("  ");
            row.push_str("  ");
        }
        head.push_str(&format!("{h:>w$}"));
        row.push_str(&format!("{v:>w$}"));
    }
    format!("{head}\n{row}\n")
}

#[derive(Serialize)]
struct MatricesDoc {
    schema_version: u32,
    dcm: Vec<crate::record::IntCell>,
    jdm: Vec<crate::record::IntCell>,
}

pub fn matrices_json(jdm: &SparseDegreeMatrix, dcm: &SparseDegreeMatrix) -> String {
    let doc = MatricesDoc {
        schema_version: SCHEMA_VERSION,
        dcm: crate::record::int_cells(dcm),
        jdm: crate::record::int_cells(jdm),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("matrices serialize");
    out.push('\n');
    out
}

pub fn matrices_tsv(jdm: &SparseDegreeMatrix, dcm: &SparseDegreeMatrix) -> String {
    let mut out = String::from("matrix\ti\tj\tcount\n");
    for ((i, j), count) in dcm.iter() {
        out.push_str(&format!("dcm\t{i}\t{j}\t{count}\n"));
    }
    for ((i, j), count) in jdm.iter() {
        out.push_str(&format!("jdm\t{i}\t{j}\t{count}\n"));
    }
    out
}

/// One `i<TAB>j<TAB>count` line per entry, sorted.
pub fn matrix_tsv(m: &SparseDegreeMatrix) -> String {
    let mut out = String::from("i\tj\tcount\n");
    for ((i, j), count) in m.iter() {
        out.push_str(&format!("{i}\t{j}\t{count}\n"));
    }
    out
}

#[derive(Serialize)]
pub struct MatrixDiff {
    pub matrix: String,
    pub i: u64,
    pub j: u64,
    pub expected: u64,
    pub found: u64,
}

/// Entry-wise differences, keyed over the union of supports.
pub fn diff_matrices(name: &str, expected: &SparseDegreeMatrix, found: &SparseDegreeMatrix) -> Vec<MatrixDiff> {
    let mut keys: Vec<(u64, u64)> = expected.iter().map(|(k, _)| k).collect();
    keys.extend(found.iter().map(|(k, _)| k));
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .filter_map(|(i, j)| {
            let e = expected.get(i, j);
            let f = found.get(i, j);
            (e != f).then(|| MatrixDiff { matrix: name.into(), i, j, expected: e, found: f })
        })
        .collect()
}

#[derive(Serialize)]
pub struct DistancePair {
    pub l1: serde_json::Number,
    pub tv: serde_json::Number,
}

#[derive(Serialize)]
pub struct DistancesDoc {
    pub in_degree: DistancePair,
    pub out_degree: DistancePair,
    pub degree_correlation: DistancePair,
    pub joint_degree: DistancePair,
}

fn distance_pair(l1: &BigRational) -> DistancePair {
    let two = BigRational::from(dksample_core::num_bigint::BigInt::from(2));
    let tv = l1 / two;
    DistancePair {
        l1: decimal_sig(l1, SIG_DIGITS).parse().expect("l1 renders"),
        tv: decimal_sig(&tv, SIG_DIGITS).parse().expect("tv renders"),
    }
}

pub fn distances_doc(d: &DistanceReport) -> DistancesDoc {
    DistancesDoc {
        in_degree: distance_pair(&d.in_degree_l1),
        out_degree: distance_pair(&d.out_degree_l1),
        degree_correlation: distance_pair(&d.correlation_l1),
        joint_degree: distance_pair(&d.joint_l1),
    }
}

#[derive(Serialize)]
pub struct VerifySideDoc {
    pub sha256: String,
    pub matches_record: bool,
}

#[derive(Serialize)]
pub struct VerifyDoc {
    pub schema_version: u32,
    pub original: VerifySideDoc,
    pub sample: VerifySideDoc,
    pub jdm_matches_targets: bool,
    pub dcm_matches_targets: bool,
    pub mismatches: Vec<MatrixDiff>,
    pub deviation: Vec<DeviationEntryDoc>,
    pub distances: DistancesDoc,
    pub verified: bool,
}

pub fn verify_json(doc: &VerifyDoc) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("verify serialize");
    out.push('\n');
    out
}

pub fn verify_text(doc: &VerifyDoc) -> String {
    let mut out = String::new();
    let yesno = |b: bool| if b { "ok" } else { "MISMATCH" };
    out.push_str(&format!("original  {}  {}\n", doc.original.sha256, yesno(doc.original.matches_record)));
    out.push_str(&format!("sample    {}  {}\n", doc.sample.sha256, yesno(doc.sample.matches_record)));
    out.push_str(&format!("jdm vs targets: {}\n", yesno(doc.jdm_matches_targets)));
    out.push_str(&format!("dcm vs targets: {}\n", yesno(doc.dcm_matches_targets)));
    for m in &doc.mismatches {
        out.push_str(&format!(
            "  {} ({}, {}): expected {}, found {}\n",
            m.matrix, m.i, m.j, m.expected, m.found
        ));
    }
    let mut counts = std::collections::BTreeMap::new();
    for e in &doc.deviation {
        *counts.entry(e.verdict.as_str()).or_insert(0u64) += 1;
    }
    let summary: Vec<String> =
        counts.iter().map(|(verdict, n)| format!("{n} {verdict}")).collect();
    out.push_str(&format!("bounds: {}\n", summary.join(", ")));
    for e in &doc.deviation {
        if e.verdict != "inside" {
            let fmt = |n: &Option<serde_json::Number>| {
                n.as_ref().map(|n| n.to_string()).unwrap_or_else(|| "-".into())
            };
            out.push_str(&format!(
                "  {} ({}, {}): {} in ({}, {})  {}\n",
                e.distribution,
                e.i,
                e.j,
                fmt(&e.achieved),
                fmt(&e.lower),
                fmt(&e.upper),
                e.verdict
            ));
        }
    }
    let dist = |name: &str, p: &DistancePair| format!("{name} l1={} tv={}\n", p.l1, p.tv);
    out.push_str(&dist("distance in_degree          ", &doc.distances.in_degree));
    out.push_str(&dist("distance out_degree         ", &doc.distances.out_degree));
    out.push_str(&dist("distance degree_correlation ", &doc.distances.degree_correlation));
    out.push_str(&dist("distance joint_degree       ", &doc.distances.joint_degree));
    out.push_str(if doc.verified { "verified\n" } else { "verification FAILED\n" });
    out
}

pub fn graph_ref(sha256: String, g: &dksample_core::DirectedGraph) -> GraphRef {
    GraphRef { sha256, nodes: g.node_count(), edges: g.edge_count() }
}
