//! Seeded random graph generators for tests and experiments.
//!
//! `random_simple_digraph` is a directed Erdős–Rényi sampler.
//! `heavy_tailed_digraph` realizes a graph from a designed degree profile:
//! out-degrees follow a truncated quadratic power law and in-degrees
//! water-fill two adjacent levels so stub totals balance exactly. All class
//! and class-pair counts come in blocks of [`CLASS_BLOCK`] nodes, which buys
//! two things at once: entrywise rescaling by small coefficients divides the
//! correlation matrix exactly (no ceiling drift between out- and in-stub
//! totals), and no class is small enough to saturate its block and force the
//! adjustment headroom to zero.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

/// Samples each ordered pair `(u, v)`, `u != v`, as an edge with probability
/// `prob_num / prob_den`. Nodes are `1..=n`; isolated nodes are kept.
pub fn random_simple_digraph<R: Rng + ?Sized>(
    n: u64,
    prob_num: u32,
    prob_den: u32,
    rng: &mut R,
) -> DirectedGraph {
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in 1..=n {
            if u != v && rng.random_ratio(prob_num, prob_den) {
                edges.push((u, v));
            }
        }
    }
    DirectedGraph::from_parts(1..=n, edges).expect("generated pairs are distinct and loop-free")
}

/// Granularity of the designed degree classes. Every degree-class and
/// class-pair count is a multiple of this, so dividing by 2, 3, 5, 6, 10,
/// 15, or 30 — or any rational whose numerator divides 30 — is exact.
pub const CLASS_BLOCK: u64 = 30;

/// Out-degree class sizes in units of [`CLASS_BLOCK`]: degrees `1..=d_max`
/// with unit counts proportional to `1 / d^2`, at least one unit each,
/// summing to `units` exactly.
fn out_degree_units(units: u64) -> Vec<u64> {
    let d_max = (units / 2).clamp(2, 7);
    let mut counts = vec![1u64; d_max as usize];
    let mut rest = units - d_max;
    let weights: Vec<u64> = (1..=d_max).map(|d| 64 * d_max * d_max / (d * d)).collect();
    let total: u64 = weights.iter().sum();
    let mut assigned = 0;
    for (c, &w) in counts.iter_mut().zip(&weights) {
        let share = rest * w / total;
        *c += share;
        assigned += share;
    }
    rest -= assigned;
    // Leftover units go to the head, keeping the tail untouched.
    let mut d = 0;
    while rest > 0 {
        counts[d] += 1;
        rest -= 1;
        d = (d + 1) % counts.len();
    }
    counts
}

/// Generates a simple digraph on nodes `1..=n` with heavy-tailed out-degrees
/// and in-degrees on two adjacent levels. `n` must be a positive multiple of
/// [`CLASS_BLOCK`], at least 120. Out- and in-degree values are paired
/// blockwise, so the degree-correlation matrix is fixed by the design; the
/// wiring itself is random. Realized by shuffled stub matching with local
/// edge rewiring to clear self-loops and duplicates; restarts with fresh
/// shuffles if a rewiring dead-ends.
pub fn heavy_tailed_digraph<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Result<DirectedGraph> {
    assert!(
        n >= 4 * CLASS_BLOCK && n % CLASS_BLOCK == 0,
        "the block design needs n >= 120 in blocks of 30"
    );
    let out_units = out_degree_units(n / CLASS_BLOCK);
    let edge_total: u64 = out_units
        .iter()
        .enumerate()
        .map(|(idx, &u)| (idx as u64 + 1) * u * CLASS_BLOCK)
        .sum();

    // Water-fill in-degrees in whole blocks: every node gets `base`, and
    // `extra` whole units get one more, matching the out-stub total exactly.
    let base = edge_total / n;
    let mut extra = (edge_total - base * n) / CLASS_BLOCK;
    debug_assert_eq!(edge_total - base * n, extra * CLASS_BLOCK);

    // Spread the `base + 1` blocks across out-classes round-robin so the
    // correlation matrix stays close to a product form.
    let mut hi_units = vec![0u64; out_units.len()];
    while extra > 0 {
        for (hi, &cap) in hi_units.iter_mut().zip(&out_units) {
            if *hi < cap && extra > 0 {
                *hi += 1;
                extra -= 1;
            }
        }
    }

    let mut out_degrees: Vec<u64> = Vec::with_capacity(n as usize);
    let mut in_degrees: Vec<u64> = Vec::with_capacity(n as usize);
    for (idx, (&u, &hi)) in out_units.iter().zip(&hi_units).enumerate() {
        let d = idx as u64 + 1;
        for slot in 0..u * CLASS_BLOCK {
            out_degrees.push(d);
            in_degrees.push(if slot < hi * CLASS_BLOCK { base + 1 } else { base });
        }
    }
    debug_assert_eq!(in_degrees.iter().sum::<u64>(), edge_total);

    'restart: for _ in 0..20 {
        let mut out_stubs: Vec<NodeId> = Vec::new();
        let mut in_stubs: Vec<NodeId> = Vec::new();
        for idx in 0..n as usize {
            let id = idx as NodeId + 1;
            out_stubs.extend(core::iter::repeat_n(id, out_degrees[idx] as usize));
            in_stubs.extend(core::iter::repeat_n(id, in_degrees[idx] as usize));
        }
        out_stubs.shuffle(rng);
        in_stubs.shuffle(rng);

        let mut edges: HashSet<(NodeId, NodeId)> = HashSet::new();
        let mut edge_list: Vec<(NodeId, NodeId)> = Vec::new();
        let mut deferred: Vec<(NodeId, NodeId)> = Vec::new();
        for (&u, &v) in out_stubs.iter().zip(&in_stubs) {
            if u != v && !edges.contains(&(u, v)) {
                edges.insert((u, v));
                edge_list.push((u, v));
            } else {
                deferred.push((u, v));
            }
        }

        // Each deferred stub pair steals the endpoints of a random placed
        // edge: (x, y) becomes (u, y) and (x, v), consuming u's out-stub and
        // v's in-stub without touching x's or y's degrees.
        for &(u, v) in &deferred {
            let mut placed = false;
            for _ in 0..400 {
                if edge_list.is_empty() {
                    break;
                }
                let slot = rng.random_range(0..edge_list.len());
                let (x, y) = edge_list[slot];
                if x == u || y == v {
                    continue;
                }
                if u != y && x != v && !edges.contains(&(u, y)) && !edges.contains(&(x, v)) {
                    edges.remove(&(x, y));
                    edge_list.swap_remove(slot);
                    edges.insert((u, y));
                    edge_list.push((u, y));
                    edges.insert((x, v));
                    edge_list.push((x, v));
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }

        return DirectedGraph::from_parts(1..=n, edge_list)
            .map_err(|_| Error::InvariantBreach("generator produced a non-simple graph".into()));
    }
    Err(Error::InvariantBreach("stub matching exhausted its restarts".into()))
}
