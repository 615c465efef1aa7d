//! Acceptance suite: eight numbered criteria, each emitting a single
//! `criterion N: PASS/FAIL` line (run with `--nocapture` to see them on
//! success). Tolerances and time budgets are pinned here and must not be
//! loosened; a red criterion is a defect, not a flaky test.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use dksample_core::num_bigint::BigInt;
use dksample_core::num_rational::BigRational;
use dksample_core::{
    check_d2k, construct, construct_graph, correlation_marginals, distribution_distance,
    distributions, enumerate_feasible, extract_dcm, extract_jdm, graphical, heavy_tailed_digraph,
    random_simple_digraph, sample_graph_input, write_edge_list,
    BoundedMatrixInstance, DirectedGraph, Error, Rounding, RunOutcome, SampleOptions, TargetPair,
    Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rational(n: u64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

fn options(k: BigRational, seed: u64) -> SampleOptions {
    SampleOptions { k, seed, rounding: Rounding::FloorCeil, refined_bounds: true }
}

fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/filmtrust_trust.tsv")
}

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dksample"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn dksample")
}

/// Prints the verdict line and fails the test on a red criterion or a blown
/// time budget.
fn report(criterion: u32, passed: bool, budget: Duration, elapsed: Duration, detail: &str) {
    let in_time = elapsed <= budget;
    let verdict = if passed && in_time { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion}: {verdict} — {detail} ({:.2?} of {:.0?} budget)",
        elapsed, budget
    );
    assert!(passed, "criterion {criterion} failed: {detail}");
    assert!(
        in_time,
        "criterion {criterion} exceeded its {budget:?} budget: took {elapsed:?}"
    );
}

fn non_empty_digraph(n_max: u64, num: u32, den: u32, rng: &mut ChaCha8Rng) -> DirectedGraph {
    loop {
        let n = rng.random_range(2..=n_max);
        let g = random_simple_digraph(n, num, den, rng);
        if g.edge_count() > 0 {
            return g;
        }
    }
}

#[test]
fn criterion_1_identity_sampling_is_exact() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC01);
    let probs = [(1u32, 20u32), (1, 5), (1, 2)];
    let mut checked = 0u32;
    for case in 0..200u64 {
        let (num, den) = probs[case as usize % 3];
        let g = non_empty_digraph(50, num, den, &mut rng);
        let outcome = sample_graph_input(&g, &options(rational(1), case)).expect("pipeline error");
        let s = match outcome {
            RunOutcome::Success(s) => s,
            RunOutcome::Infeasible(inf) => panic!("identity run infeasible: {inf:?}"),
        };
        assert!(s.d.is_empty(), "identity run produced a non-zero adjustment");
        assert_eq!(s.a_target, extract_jdm(&g));
        assert_eq!(s.b_target, extract_dcm(&g));
        assert_eq!(extract_jdm(&s.graph), s.a_target);
        assert_eq!(extract_dcm(&s.graph), s.b_target);
        let dist = distribution_distance(
            &distributions(&g).unwrap(),
            &distributions(&s.graph).unwrap(),
        );
        assert!(dist.all_zero(), "a distribution moved under k=1");
        checked += 1;
    }
    report(
        1,
        checked == 200,
        Duration::from_secs(10),
        start.elapsed(),
        &format!("{checked}/200 identity runs exact, adjustment always zero"),
    );
}

#[test]
fn criterion_2_table_row_reproduction() {
    let fixture = fixture_path();
    let start = Instant::now();
    let out = cli(&["stats", fixture.to_str().unwrap(), "--format", "json"], fixture.parent().unwrap());
    let elapsed = start.elapsed();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let counts_ok = doc["nodes"] == 874
        && doc["edges"] == 1853
        && doc["nnz_dcm"] == 102
        && doc["nnz_jdm"] == 413;
    let pct_dcm: f64 = doc["pct_dcm"].as_f64().unwrap();
    let pct_jdm: f64 = doc["pct_jdm"].as_f64().unwrap();
    let pct_ok = (pct_dcm - 11.67).abs() <= 0.005 && (pct_jdm - 22.29).abs() <= 0.005;
    report(
        2,
        counts_ok && pct_ok,
        Duration::from_secs(1),
        elapsed,
        &format!(
            "N=874 E=1853 nnz=102/413, pct {pct_dcm:.2}%/{pct_jdm:.2}% within ±0.005pp"
        ),
    );
}

/// Every row/column-sum vector of length 1..=3 with entries 0..=6, by
/// odometer enumeration.
fn sum_vectors() -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for len in 1..=3usize {
        let mut v = vec![0u64; len];
        'odometer: loop {
            out.push(v.clone());
            for pos in (0..len).rev() {
                if v[pos] < 6 {
                    v[pos] += 1;
                    for x in v[pos + 1..].iter_mut() {
                        *x = 0;
                    }
                    continue 'odometer;
                }
            }
            break;
        }
    }
    out
}

#[test]
fn criterion_3_graphical_matches_brute_force() {
    let start = Instant::now();
    let vectors = sum_vectors();
    assert_eq!(vectors.len(), 7 + 49 + 343);

    // Feasibility is invariant under line permutations, so the exhaustive
    // oracle is memoized on the sorted instance; a deterministic subsample
    // re-runs the oracle on the raw instance to guard that assumption.
    let mut memo: HashMap<(Vec<u64>, Vec<u64>, u64), bool> = HashMap::new();
    let mut total = 0u64;
    let mut agreed = 0u64;
    for rows in &vectors {
        for cols in &vectors {
            for cap in 0..=3u64 {
                let inst = BoundedMatrixInstance::new(rows.clone(), cols.clone(), cap);
                let fast = graphical(&inst).is_feasible();
                let mut key_rows = rows.clone();
                let mut key_cols = cols.clone();
                key_rows.sort_unstable();
                key_cols.sort_unstable();
                let oracle = *memo
                    .entry((key_rows, key_cols, cap))
                    .or_insert_with(|| enumerate_feasible(&inst).expect("within budget"));
                if total % 97 == 0 {
                    assert_eq!(
                        enumerate_feasible(&inst).unwrap(),
                        oracle,
                        "oracle disagrees with its permuted memo on {inst:?}"
                    );
                }
                assert_eq!(fast, oracle, "disagreement on {inst:?}");
                total += 1;
                agreed += 1;
            }
        }
    }
    report(
        3,
        total == 636_804 && agreed == total,
        Duration::from_secs(60),
        start.elapsed(),
        &format!("{agreed}/{total} instances agree with exhaustive enumeration"),
    );
}

fn verify_construction(inst: &BoundedMatrixInstance, dense: &[Vec<u64>]) {
    for (r, row) in dense.iter().enumerate() {
        assert!(row.iter().all(|&v| v <= inst.cap), "cap exceeded");
        assert_eq!(row.iter().sum::<u64>(), inst.row_sums[r], "row sum off");
    }
    for (c, &want) in inst.col_sums.iter().enumerate() {
        let got: u64 = dense.iter().map(|row| row[c]).sum();
        assert_eq!(got, want, "column sum off");
    }
}

#[test]
fn criterion_4_construct_is_sound_on_feasible_instances() {
    let start = Instant::now();
    let vectors = sum_vectors();
    let mut built = 0u64;

    // Every feasible instance from the criterion-3 sweep.
    for rows in &vectors {
        for cols in &vectors {
            for cap in 0..=3u64 {
                let inst = BoundedMatrixInstance::new(rows.clone(), cols.clone(), cap);
                if !graphical(&inst).is_feasible() {
                    continue;
                }
                let d = construct(&inst).expect("feasible instance must construct");
                verify_construction(&inst, &d.to_dense());
                built += 1;
            }
        }
    }
    let exhaustive = built;

    // Plus 1000 random feasible instances: dimensions <= 8, line sums <= 40,
    // cap <= 10. Columns are drawn as a composition of the row total so the
    // sums always match; infeasible draws are rejected.
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC04);
    let mut random_built = 0u64;
    let mut draws = 0u64;
    while random_built < 1000 {
        draws += 1;
        assert!(draws < 200_000, "rejection sampling stalled");
        let r = rng.random_range(1..=8usize);
        let c = rng.random_range(1..=8usize);
        let rows: Vec<u64> = (0..r).map(|_| rng.random_range(0..=12)).collect();
        let total: u64 = rows.iter().sum();
        if total > 40 * c as u64 {
            continue;
        }
        let mut cols = Vec::with_capacity(c);
        let mut rem = total;
        for pos in 0..c {
            let left = (c - pos - 1) as u64;
            let lo = rem.saturating_sub(40 * left);
            let hi = rem.min(40);
            let v = rng.random_range(lo..=hi);
            cols.push(v);
            rem -= v;
        }
        if rem != 0 {
            continue;
        }
        let cap = rng.random_range(0..=10u64);
        let inst = BoundedMatrixInstance::new(rows, cols, cap);
        if !graphical(&inst).is_feasible() {
            continue;
        }
        let d = construct(&inst).expect("feasible instance must construct");
        verify_construction(&inst, &d.to_dense());
        random_built += 1;
    }

    report(
        4,
        random_built == 1000,
        Duration::from_secs(30),
        start.elapsed(),
        &format!("{exhaustive} exhaustive + {random_built}/1000 random instances constructed"),
    );
}

#[test]
fn criterion_5_d2k_round_trips() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC05);
    let probs = [(1u32, 10u32), (1, 4), (1, 2)];
    let mut round_trips = 0u64;
    for case in 0..100 {
        let (num, den) = probs[case % 3];
        let n = rng.random_range(2..=40);
        let g = random_simple_digraph(n, num, den, &mut rng);
        let tp = TargetPair { a_target: extract_jdm(&g), b_target: extract_dcm(&g) };
        assert!(check_d2k(&tp).is_empty(), "extracted pair failed its own check");
        for seed in [11u64, 22, 33] {
            let rebuilt = construct_graph(&tp, seed).expect("construction failed");
            assert_eq!(extract_jdm(&rebuilt), tp.a_target, "JDM drifted");
            assert_eq!(extract_dcm(&rebuilt), tp.b_target, "DCM drifted");
            round_trips += 1;
        }
    }
    report(
        5,
        round_trips == 300,
        Duration::from_secs(60),
        start.elapsed(),
        &format!("{round_trips}/300 reconstructions reproduced both matrices exactly"),
    );
}

#[test]
fn criterion_6_realizability_assertions_never_fire() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC06);
    let ks = [rational(1), rational(2), rational(3), BigRational::new(BigInt::from(5), BigInt::from(2))];
    let mut runs = 0u64;
    let mut successes = 0u64;
    let mut infeasible = 0u64;
    for case in 0..150u64 {
        let g = non_empty_digraph(60, 1, 4, &mut rng);
        for (ki, k) in ks.iter().enumerate() {
            runs += 1;
            match sample_graph_input(&g, &options(k.clone(), case * 10 + ki as u64)) {
                Ok(RunOutcome::Success(s)) => {
                    // Restate the invariant externally: targets built from a
                    // feasible adjustment must pass the realizability check.
                    let tp = TargetPair {
                        a_target: s.a_target.clone(),
                        b_target: s.b_target.clone(),
                    };
                    assert!(check_d2k(&tp).is_empty(), "realized targets fail the check");
                    successes += 1;
                }
                Ok(RunOutcome::Infeasible(_)) => infeasible += 1,
                Err(Error::InvariantBreach(msg)) => {
                    panic!("realizability assertion fired: {msg}")
                }
                Err(e) => panic!("unexpected pipeline error: {e}"),
            }
        }
    }
    report(
        6,
        runs == 600,
        Duration::from_secs(60),
        start.elapsed(),
        &format!(
            "{successes} successes + {infeasible} infeasible of {runs} runs, zero realizability violations"
        ),
    );
}

#[test]
fn criterion_7_deviation_bounds_contain_achieved_frequencies() {
    let start = Instant::now();
    let mut successes = 0u64;
    let mut infeasible = 0u64;
    let mut outside_entries = 0u64;
    let mut flagged = 0u64;
    for case in 0..20u64 {
        let n = 120 + 30 * (case % 13);
        let mut rng = ChaCha8Rng::seed_from_u64(0x00C7_0000 + case);
        let g = heavy_tailed_digraph(n, &mut rng).expect("generator failed");
        for (ki, k) in [2u64, 3, 5].into_iter().enumerate() {
            let opts = options(rational(k), 7000 + case * 3 + ki as u64);
            match sample_graph_input(&g, &opts).expect("pipeline error") {
                RunOutcome::Infeasible(_) => infeasible += 1,
                RunOutcome::Success(s) => {
                    assert!(s.deviation.refined, "bounds must be the refined ones");
                    for entry in &s.deviation.entries {
                        match entry.verdict {
                            Some(Verdict::Outside) => outside_entries += 1,
                            Some(Verdict::Degenerate) | Some(Verdict::Unbounded) | None => {
                                flagged += 1
                            }
                            Some(Verdict::Inside) => {}
                        }
                    }
                    // Marginal degree distributions must equal the node
                    // matrix's marginals exactly.
                    let (out_marginal, in_marginal) = correlation_marginals(&s.b_target);
                    let dist = distributions(&s.graph).unwrap();
                    assert_eq!(dist.out_degree, out_marginal, "out-degree marginal drifted");
                    assert_eq!(dist.in_degree, in_marginal, "in-degree marginal drifted");
                    successes += 1;
                }
            }
        }
    }
    report(
        7,
        successes >= 10 && outside_entries == 0,
        Duration::from_secs(300),
        start.elapsed(),
        &format!(
            "{successes}/60 runs succeeded ({infeasible} infeasible, excluded); 0 entries outside refined bounds, {flagged} flagged degenerate/unbounded"
        ),
    );
}

#[test]
fn criterion_8_reruns_are_byte_identical() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_path_buf();
    let fixture = fixture_path();
    let fixture = fixture.to_str().unwrap();

    // A feasible mid-size input for the success path.
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC08);
    let g = heavy_tailed_digraph(150, &mut rng).unwrap();
    fs::write(dir.join("g.tsv"), write_edge_list(&g)).unwrap();

    let mut compared = 0u32;
    let rerun = |compared: &mut u32, args: &[&str]| {
        let first = cli(args, &dir);
        let second = cli(args, &dir);
        assert_eq!(first.status.code(), second.status.code(), "exit codes differ: {args:?}");
        assert_eq!(first.stdout, second.stdout, "stdout differs: {args:?}");
        *compared += 1;
        first
    };

    rerun(&mut compared, &["stats", fixture]);
    rerun(&mut compared, &["stats", fixture, "--format", "json"]);
    rerun(&mut compared, &["matrices", fixture]);
    // Infeasible diagnosis on the vendored fixture is part of the contract.
    let diag = rerun(&mut compared, &["sample", fixture, "--k", "3"]);
    assert_eq!(diag.status.code(), Some(2));

    let s1 = cli(&["sample", "g.tsv", "--k", "2", "--seed", "11", "--out", "s1.tsv"], &dir);
    let s2 = cli(&["sample", "g.tsv", "--k", "2", "--seed", "11", "--out", "s2.tsv"], &dir);
    assert_eq!(s1.status.code(), Some(0), "{}", String::from_utf8_lossy(&s1.stderr));
    assert_eq!(s2.status.code(), Some(0));
    let read = |n: &str| fs::read(dir.join(n)).unwrap();
    assert_eq!(read("s1.tsv"), read("s2.tsv"), "sample edge lists differ");
    assert_eq!(
        read("s1.tsv.record.json"),
        read("s2.tsv.record.json"),
        "run records differ"
    );
    compared += 1;

    rerun(&mut compared, &["verify", "g.tsv", "s1.tsv", "s1.tsv.record.json"]);
    rerun(&mut compared, &["verify", "g.tsv", "s1.tsv", "s1.tsv.record.json", "--format", "json"]);

    report(
        8,
        compared == 7,
        Duration::from_secs(120),
        start.elapsed(),
        &format!("{compared} command re-runs byte-identical (stats, matrices, sample, diagnosis, verify)"),
    );
}
