//! `dksample` — sample a large simple directed graph down to a smaller one
//! that preserves its degree structure.
//!
//! The pipeline extracts the graph's joint-degree and degree-correlation
//! matrices, divides them by the coefficient `k`, integerizes, tops the edge
//! matrix up with a bounded adjustment so the pair stays realizable, and
//! constructs a fresh simple digraph realizing the adjusted pair exactly.
//! Degree distributions carry over exactly; the correlation and joint
//! distributions deviate only within computable bounds, which are written
//! into a run record for offline verification.
//!
//! Exit codes: 0 success, 1 usage or I/O errors, 2 infeasible rescale.

mod record;
mod render;
mod reports;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dksample_core::{
    deviation_bounds, distribution_distance, distributions, extract_dcm, extract_jdm,
    parse_coefficient, parse_edge_list, sample_graph_input, sparsity_report, verify_bounds,
    DirectedGraph, Infeasibility, Rounding, RunOutcome, SampleOptions, SampleSuccess,
    write_edge_list,
};

use record::{
    infeasible_record, sha256_hex, success_record, RecordInputs, RunRecord,
};
use render::fraction;
use reports::graph_ref;

#[derive(Parser)]
#[command(name = "dksample", version, about = "Degree-structure-preserving digraph sampler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degree-matrix sparsity summary of an edge list.
    Stats {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extracted joint-degree and degree-correlation matrices.
    Matrices {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rescale by k and construct a sample graph.
    Sample {
        input: PathBuf,
        /// Sampling coefficient: a fraction ("5/2") or decimal ("2.5"),
        /// parsed exactly. Must be positive.
        #[arg(long)]
        k: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = RoundingArg::FloorCeil)]
        rounding: RoundingArg,
        /// Tighten deviation bounds with per-entry sparsity coefficients.
        #[arg(long, value_enum, default_value_t = Toggle::On)]
        refined_bounds: Toggle,
        /// Directory for the rescaled matrices, deltas, and adjustment as TSV.
        #[arg(long)]
        dump_intermediates: Option<PathBuf>,
        /// Sample edge list destination (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run-record JSON destination (default: `<out>.record.json` when
        /// --out is given; on infeasibility without any destination, the
        /// diagnosis goes to stdout).
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Check a sample and its run record against the original graph.
    Verify {
        original: PathBuf,
        sample: PathBuf,
        record: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundingArg {
    /// Floor the edge matrix, ceil the node matrix (the default contract).
    #[value(alias = "paper")]
    FloorCeil,
    FloorFloor,
    CeilCeil,
    RoundRound,
}

impl From<RoundingArg> for Rounding {
    fn from(r: RoundingArg) -> Self {
        match r {
            RoundingArg::FloorCeil => Rounding::FloorCeil,
            RoundingArg::FloorFloor => Rounding::FloorFloor,
            RoundingArg::CeilCeil => Rounding::CeilCeil,
            RoundingArg::RoundRound => Rounding::RoundRound,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version print to stdout and are not failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Stats { input, format, out } => cmd_stats(&input, format, out.as_deref()),
        Command::Matrices { input, format, out } => cmd_matrices(&input, format, out.as_deref()),
        Command::Sample {
            input,
            k,
            seed,
            rounding,
            refined_bounds,
            dump_intermediates,
            out,
            record,
        } => cmd_sample(
            &input,
            &k,
            seed,
            rounding,
            refined_bounds == Toggle::On,
            dump_intermediates.as_deref(),
            out.as_deref(),
            record.as_deref(),
        ),
        Command::Verify { original, sample, record, format, out } => {
            cmd_verify(&original, &sample, &record, format, out.as_deref())
        }
    }
}

fn read_graph(path: &Path) -> Result<(DirectedGraph, String)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hash = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .with_context(|| format!("{} is not valid UTF-8", path.display()))?;
    let (graph, stats) =
        parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))?;
    if stats.self_loops_dropped > 0 || stats.duplicates_collapsed > 0 {
        eprintln!(
            "note: {} dropped {} self-loop(s), collapsed {} duplicate edge(s)",
            path.display(),
            stats.self_loops_dropped,
            stats.duplicates_collapsed
        );
    }
    Ok((graph, hash))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_stats(input: &Path, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let (graph, _) = read_graph(input)?;
    let report = sparsity_report(&graph)?;
    let text = match format {
        Format::Json => reports::stats_json(&report),
        Format::Tsv => reports::stats_tsv(&report),
        Format::Text => reports::stats_text(&report),
    };
    emit(&text, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_matrices(input: &Path, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let (graph, _) = read_graph(input)?;
    let jdm = extract_jdm(&graph);
    let dcm = extract_dcm(&graph);
    let text = match format {
        Format::Json => reports::matrices_json(&jdm, &dcm),
        Format::Tsv | Format::Text => reports::matrices_tsv(&jdm, &dcm),
    };
    emit(&text, out)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    input: &Path,
    k_text: &str,
    seed: u64,
    rounding: RoundingArg,
    refined: bool,
    dump: Option<&Path>,
    out: Option<&Path>,
    record_path: Option<&Path>,
) -> Result<ExitCode> {
    let (graph, input_hash) = read_graph(input)?;
    let k = parse_coefficient(k_text)?;
    let opts = SampleOptions {
        k: k.clone(),
        seed,
        rounding: rounding.into(),
        refined_bounds: refined,
    };
    let outcome = sample_graph_input(&graph, &opts)?;

    let base = RecordInputs {
        input: graph_ref(input_hash, &graph),
        k: &k,
        rounding: rounding.into(),
        seed,
        refined_bounds: refined,
    };
    // --record defaults next to --out so a sample never silently loses its
    // provenance when written to a file.
    let derived_record: Option<PathBuf> = record_path
        .map(Path::to_path_buf)
        .or_else(|| out.map(|o| PathBuf::from(format!("{}.record.json", o.display()))));

    match outcome {
        RunOutcome::Success(s) => {
            let sample_text = write_edge_list(&s.graph);
            let sample_hash = sha256_hex(sample_text.as_bytes());
            let record = success_record(base, &s, graph_ref(sample_hash, &s.graph));
            emit(&sample_text, out)?;
            if let Some(path) = &derived_record {
                emit(&record.to_json(), Some(path))?;
            }
            if let Some(dir) = dump {
                dump_intermediates(dir, &s)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        RunOutcome::Infeasible(inf) => {
            let record = infeasible_record(base, &inf);
            match &derived_record {
                Some(path) => emit(&record.to_json(), Some(path))?,
                None => emit(&record.to_json(), None)?,
            }
            eprintln!("infeasible at k = {}: {}", fraction(&k), describe_infeasibility(&inf));
            Ok(ExitCode::from(2))
        }
    }
}

fn describe_infeasibility(inf: &Infeasibility) -> String {
    match *inf {
        Infeasibility::NegativeCap { row, col, cap } => format!(
            "class pair ({row}, {col}) has adjustment headroom {cap}; the rescaled matrices leave no room for a non-negative adjustment"
        ),
        Infeasibility::NegativeDelta { axis, degree, value } => {
            let side = if axis == 'r' { "out" } else { "in" };
            format!("{side}-degree {degree} is oversupplied after rounding (shortfall {value})")
        }
        Infeasibility::StubImbalance { row_total, col_total } => format!(
            "rounding left {row_total} missing out-stub(s) vs {col_total} in-stub(s); the adjustment cannot balance"
        ),
        Infeasibility::PrefixViolation { prefix, demand, capacity } => format!(
            "the {prefix} most demanding column(s) need {demand} adjustment edge(s) but rows can supply {capacity}"
        ),
    }
}

fn dump_intermediates(dir: &Path, s: &SampleSuccess) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    };

    let rational_tsv = |m: &dksample_core::RationalMatrix| {
        let mut out = String::from("i\tj\tvalue\n");
        for (&(i, j), v) in m.iter() {
            out.push_str(&format!("{i}\t{j}\t{}\n", fraction(v)));
        }
        out
    };
    write("a_ring.tsv", rational_tsv(&s.rescaled.a_ring))?;
    write("b_ring.tsv", rational_tsv(&s.rescaled.b_ring))?;
    write("a_prime.tsv", reports::matrix_tsv(&s.rescaled.a_prime))?;
    write("b_prime.tsv", reports::matrix_tsv(&s.rescaled.b_prime))?;
    write("a_target.tsv", reports::matrix_tsv(&s.a_target))?;
    write("b_target.tsv", reports::matrix_tsv(&s.b_target))?;

    let mut d_tsv = String::from("i\tj\tcount\n");
    for (&(i, j), &count) in &s.d {
        d_tsv.push_str(&format!("{i}\t{j}\t{count}\n"));
    }
    write("d.tsv", d_tsv)?;

    let mut deltas = String::from("axis\tdegree\tvalue\n");
    for (&degree, &value) in &s.adjustment.row_delta {
        deltas.push_str(&format!("r\t{degree}\t{value}\n"));
    }
    for (&degree, &value) in &s.adjustment.col_delta {
        deltas.push_str(&format!("c\t{degree}\t{value}\n"));
    }
    write("deltas.tsv", deltas)?;
    write("cap.txt", format!("{}\n", s.adjustment.cap))
}

fn cmd_verify(
    original: &Path,
    sample: &Path,
    record: &Path,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let record_text =
        fs::read_to_string(record).with_context(|| format!("reading {}", record.display()))?;
    let rec = RunRecord::from_json(&record_text)
        .with_context(|| format!("parsing {}", record.display()))?;

    let (orig_graph, orig_hash) = read_graph(original)?;
    if orig_hash != rec.input.sha256 {
        bail!(
            "record does not match inputs: original {} hashes to {}, record expects {}",
            original.display(),
            orig_hash,
            rec.input.sha256
        );
    }
    if rec.outcome != "success" {
        bail!("record describes an infeasible run; there is no sample to verify");
    }
    let sample_rec = rec.sample.as_ref().context("success record lacks a sample reference")?;

    let (sample_graph, sample_hash) = read_graph(sample)?;
    let sample_matches = sample_hash == sample_rec.sha256;

    let (a_target, b_target) = rec.target_matrices()?;
    let mut mismatches = reports::diff_matrices("jdm", &a_target, &extract_jdm(&sample_graph));
    let dcm_diffs = reports::diff_matrices("dcm", &b_target, &extract_dcm(&sample_graph));
    let jdm_matches = mismatches.is_empty();
    let dcm_matches = dcm_diffs.is_empty();
    mismatches.extend(dcm_diffs);

    let orig_dist = distributions(&orig_graph)?;
    let sample_dist = distributions(&sample_graph)?;
    let (a_ring, b_ring) = rec.ring_matrices()?;
    let bounds = deviation_bounds(&a_ring, &b_ring, rec.cap.unwrap_or(0), rec.refined_bounds);
    let checked = verify_bounds(&sample_dist, &bounds);
    let distances = distribution_distance(&orig_dist, &sample_dist);

    let verified = sample_matches && jdm_matches && dcm_matches;
    let doc = reports::VerifyDoc {
        schema_version: record::SCHEMA_VERSION,
        original: reports::VerifySideDoc { sha256: orig_hash, matches_record: true },
        sample: reports::VerifySideDoc { sha256: sample_hash, matches_record: sample_matches },
        jdm_matches_targets: jdm_matches,
        dcm_matches_targets: dcm_matches,
        mismatches,
        deviation: checked.entries.iter().map(record::entry_doc).collect(),
        distances: reports::distances_doc(&distances),
        verified,
    };
    let text = match format {
        Format::Json => reports::verify_json(&doc),
        Format::Tsv | Format::Text => reports::verify_text(&doc),
    };
    emit(&text, out)?;
    if verified {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: record does not match inputs");
        Ok(ExitCode::from(1))
    }
}
