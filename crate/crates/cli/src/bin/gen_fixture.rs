//! Generates the vendored trust-network fixture at `data/filmtrust_trust.tsv`.
//!
//! The build environment has no network access, so the fixture is synthesized
//! rather than fetched: a degree-correlation matrix and joint-degree matrix
//! are designed to reproduce the published summary statistics of the
//! FilmTrust trust network — 874 nodes, 1853 edges, 102 distinct node degree
//! pairs, 413 distinct edge degree pairs — and a graph realizing the pair
//! exactly is constructed and written out. Deterministic: same output every
//! run.
//!
//! Usage: `gen-fixture [OUT_PATH]` (default `data/filmtrust_trust.tsv`).

use std::collections::BTreeMap;
use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use dksample_core::{
    check_d2k, construct_graph, sparsity_report, write_edge_list, MatrixKind,
    SparseDegreeMatrix, TargetPair,
};

const NODES: u64 = 874;
const EDGES: u64 = 1853;
const NNZ_DCM: usize = 102;
const NNZ_JDM: usize = 413;

/// Positive out-degree classes and their node counts. Heavy-tailed: most
/// active sources have degree 1 or 2, thin five-node classes carry the tail.
const OUT_CLASSES: [(u64, u64); 21] = [
    (1, 363),
    (2, 70),
    (3, 5),
    (4, 5),
    (5, 5),
    (6, 5),
    (7, 5),
    (8, 5),
    (9, 5),
    (10, 5),
    (11, 5),
    (12, 5),
    (13, 5),
    (14, 5),
    (15, 5),
    (17, 5),
    (19, 5),
    (22, 5),
    (26, 5),
    (31, 5),
    (38, 5),
];

/// Positive in-degree classes; the in-side tail reaches higher (a few nodes
/// are trusted by many).
const IN_CLASSES: [(u64, u64); 21] = [
    (1, 303),
    (2, 45),
    (3, 5),
    (4, 5),
    (5, 5),
    (6, 5),
    (7, 5),
    (8, 5),
    (9, 5),
    (10, 5),
    (11, 5),
    (12, 5),
    (13, 5),
    (14, 5),
    (15, 5),
    (18, 5),
    (21, 5),
    (25, 5),
    (30, 5),
    (36, 5),
    (45, 5),
];

/// Cells excluded from the JDM support, chosen so every JDM line can hold at
/// least one edge per remaining cell (lines with small totals get relief) and
/// the count lands at exactly 441 - 28 = 413.
const JDM_HOLES: [(u64, u64); 28] = [
    (3, 18),
    (3, 21),
    (3, 25),
    (3, 30),
    (3, 36),
    (3, 45),
    (4, 45),
    (17, 3),
    (19, 3),
    (22, 3),
    (26, 3),
    (31, 3),
    (38, 3),
    (38, 4),
    (19, 36),
    (19, 45),
    (22, 30),
    (22, 36),
    (22, 45),
    (26, 25),
    (26, 30),
    (26, 36),
    (26, 45),
    (31, 21),
    (31, 25),
    (31, 30),
    (31, 36),
    (31, 45),
];

type Cells = BTreeMap<(u64, u64), u64>;

fn main() -> ExitCode {
    let out_path = env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data/filmtrust_trust.tsv"));

    let b = build_dcm();
    let a = build_jdm(&b);
    let tp = TargetPair { a_target: to_matrix(MatrixKind::Jdm, &a), b_target: to_matrix(MatrixKind::Dcm, &b) };
    let violations = check_d2k(&tp);
    assert!(violations.is_empty(), "designed pair not realizable: {violations:?}");

    let graph = construct_graph(&tp, 0x1853).expect("construction failed");
    let report = sparsity_report(&graph).expect("empty fixture graph");
    assert_eq!(
        (report.nodes, report.edges, report.nnz_dcm, report.nnz_jdm),
        (NODES, EDGES, NNZ_DCM as u64, NNZ_JDM as u64),
        "realized graph misses the target statistics"
    );
    // The two sparsity percentages must render as 11.67% and 22.29% under
    // two-decimal round-half-away formatting.
    assert_eq!((report.nnz_dcm * 10000 + NODES / 2) / NODES, 1167);
    assert_eq!((report.nnz_jdm * 10000 + EDGES / 2) / EDGES, 2229);

    if let Some(dir) = out_path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).expect("creating output directory");
        }
    }
    fs::write(&out_path, write_edge_list(&graph)).expect("writing fixture");
    println!(
        "{}: {} nodes, {} edges, {} dcm cells, {} jdm cells",
        out_path.display(),
        report.nodes,
        report.edges,
        report.nnz_dcm,
        report.nnz_jdm
    );
    ExitCode::SUCCESS
}

/// Lays out the 874 nodes over degree-class pairs: zero-out-degree nodes fill
/// the low in-classes, zero-in-degree nodes the low out-classes, the overlap
/// goes corner-to-corner, and 1-unit rotations then split cells until the
/// support size is exactly `NNZ_DCM`. Rotations preserve both marginals.
fn build_dcm() -> Cells {
    let out_total: u64 = OUT_CLASSES.iter().map(|&(_, n)| n).sum();
    let in_total: u64 = IN_CLASSES.iter().map(|&(_, m)| m).sum();
    let z_out = NODES - out_total; // nodes with out-degree 0
    let z_in = NODES - in_total; // nodes with in-degree 0
    assert!(z_out + z_in <= NODES, "classes too thin: isolated nodes forced");

    let mut b: Cells = BTreeMap::new();
    let mut row_need: BTreeMap<u64, u64> = OUT_CLASSES.iter().copied().collect();
    let mut col_need: BTreeMap<u64, u64> = IN_CLASSES.iter().copied().collect();

    // Out-degree-0 nodes take in-classes from the bottom up.
    let mut rem = z_out;
    for &(j, _) in IN_CLASSES.iter() {
        if rem == 0 {
            break;
        }
        let take = rem.min(col_need[&j]);
        if take > 0 {
            b.insert((0, j), take);
            *col_need.get_mut(&j).unwrap() -= take;
            rem -= take;
        }
    }
    assert_eq!(rem, 0);

    // In-degree-0 nodes take out-classes from the bottom up.
    let mut rem = z_in;
    for &(i, _) in OUT_CLASSES.iter() {
        if rem == 0 {
            break;
        }
        let take = rem.min(row_need[&i]);
        if take > 0 {
            b.insert((i, 0), take);
            *row_need.get_mut(&i).unwrap() -= take;
            rem -= take;
        }
    }
    assert_eq!(rem, 0);

    // Remaining nodes are active both ways; pair leftovers corner-to-corner.
    let mut rows: Vec<(u64, u64)> =
        row_need.into_iter().filter(|&(_, n)| n > 0).collect();
    let mut cols: Vec<(u64, u64)> =
        col_need.into_iter().filter(|&(_, m)| m > 0).collect();
    rows.reverse();
    cols.reverse();
    let (mut r, mut c) = (0, 0);
    while r < rows.len() && c < cols.len() {
        let take = rows[r].1.min(cols[c].1);
        *b.entry((rows[r].0, cols[c].0)).or_insert(0) += take;
        rows[r].1 -= take;
        cols[c].1 -= take;
        if rows[r].1 == 0 {
            r += 1;
        }
        if cols[c].1 == 0 {
            c += 1;
        }
    }
    assert!(r == rows.len() && c == cols.len());

    // Split cells one unit at a time until the support reaches NNZ_DCM.
    while b.len() < NNZ_DCM {
        let need = NNZ_DCM - b.len();
        let mut donors: Vec<((u64, u64), u64)> =
            b.iter().filter(|&(_, &v)| v >= 2).map(|(&k, &v)| (k, v)).collect();
        donors.sort_by_key(|&((i, j), v)| (std::cmp::Reverse(v), i, j));
        let mut applied = false;
        'scan: for (x, &((r1, c1), _)) in donors.iter().enumerate() {
            for &((r2, c2), _) in donors.iter().skip(x + 1) {
                if r1 == r2 || c1 == c2 {
                    continue;
                }
                let (t1, t2) = ((r1, c2), (r2, c1));
                if t1 == (0, 0) || t2 == (0, 0) {
                    continue;
                }
                let gain = !b.contains_key(&t1) as usize + !b.contains_key(&t2) as usize;
                if gain == 0 || gain > need.min(2) {
                    continue;
                }
                *b.get_mut(&(r1, c1)).unwrap() -= 1;
                *b.get_mut(&(r2, c2)).unwrap() -= 1;
                *b.entry(t1).or_insert(0) += 1;
                *b.entry(t2).or_insert(0) += 1;
                applied = true;
                break 'scan;
            }
        }
        assert!(applied, "no split available at {} cells", b.len());
    }

    assert_eq!(b.len(), NNZ_DCM);
    assert_eq!(b.values().sum::<u64>(), NODES);
    assert!(!b.contains_key(&(0, 0)));
    for &(i, n) in OUT_CLASSES.iter() {
        assert_eq!(line_total(&b, i, true), n, "out-class {i}");
    }
    for &(j, m) in IN_CLASSES.iter() {
        assert_eq!(line_total(&b, j, false), m, "in-class {j}");
    }
    b
}

/// Builds the JDM on the full positive class grid minus `JDM_HOLES`: one edge
/// in every allowed cell, then the remaining mass corner-to-corner through
/// the leftover line sums, capped per cell so `a + b` never exceeds the
/// ordered node pairs available to the class pair.
fn build_jdm(b: &Cells) -> Cells {
    let n: BTreeMap<u64, u64> = OUT_CLASSES.iter().copied().collect();
    let m: BTreeMap<u64, u64> = IN_CLASSES.iter().copied().collect();
    let holes: std::collections::BTreeSet<(u64, u64)> = JDM_HOLES.iter().copied().collect();
    assert_eq!(holes.len(), JDM_HOLES.len());

    let mut a: Cells = BTreeMap::new();
    for &(i, _) in OUT_CLASSES.iter() {
        for &(j, _) in IN_CLASSES.iter() {
            if !holes.contains(&(i, j)) {
                a.insert((i, j), 1);
            }
        }
    }
    assert_eq!(a.len(), NNZ_JDM);

    let mut row_extra: Vec<(u64, u64)> = OUT_CLASSES
        .iter()
        .map(|&(i, ni)| (i, i * ni - line_total(&a, i, true)))
        .collect();
    let mut col_extra: Vec<(u64, u64)> = IN_CLASSES
        .iter()
        .map(|&(j, mj)| (j, j * mj - line_total(&a, j, false)))
        .collect();
    // Largest lines first so the bulk lands where capacity is effectively
    // unlimited and the capped corner cells only see a trickle.
    row_extra.sort_by_key(|&(i, e)| (std::cmp::Reverse(e), i));
    col_extra.sort_by_key(|&(j, e)| (std::cmp::Reverse(e), j));
    assert_eq!(
        row_extra.iter().map(|&(_, e)| e).sum::<u64>(),
        col_extra.iter().map(|&(_, e)| e).sum::<u64>()
    );

    for &(i, mut extra) in row_extra.iter() {
        for &mut (j, ref mut col_rem) in col_extra.iter_mut() {
            if extra == 0 {
                break;
            }
            if *col_rem == 0 || holes.contains(&(i, j)) {
                continue;
            }
            let cell = a.get_mut(&(i, j)).unwrap();
            let cap = n[&i] * m[&j] - b.get(&(i, j)).copied().unwrap_or(0);
            let take = extra.min(*col_rem).min(cap - *cell);
            *cell += take;
            *col_rem -= take;
            extra -= take;
        }
        assert_eq!(extra, 0, "row {i} could not place its edges");
    }

    assert_eq!(a.len(), NNZ_JDM);
    assert_eq!(a.values().sum::<u64>(), EDGES);
    for (&(i, j), &v) in a.iter() {
        assert!(v + b.get(&(i, j)).copied().unwrap_or(0) <= n[&i] * m[&j]);
    }
    for &(i, ni) in OUT_CLASSES.iter() {
        assert_eq!(line_total(&a, i, true), i * ni);
    }
    for &(j, mj) in IN_CLASSES.iter() {
        assert_eq!(line_total(&a, j, false), j * mj);
    }
    a
}

fn line_total(cells: &Cells, idx: u64, row: bool) -> u64 {
    cells
        .iter()
        .filter(|&(&(i, j), _)| if row { i == idx } else { j == idx })
        .map(|(_, &v)| v)
        .sum()
}

fn to_matrix(kind: MatrixKind, cells: &Cells) -> SparseDegreeMatrix {
    let mut m = SparseDegreeMatrix::new(kind);
    for (&(i, j), &v) in cells.iter() {
        m.add(i, j, v).expect("bad cell index");
    }
    m
}
