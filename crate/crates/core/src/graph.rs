//! Simple directed graphs, edge-list text exchange, and degree tables.
//!
//! Graphs are immutable after construction. Edge membership is backed by a
//! hash set so `contains_edge` is O(1) expected, which the graph builder in
//! [`crate::d2k`] relies on.
//!
//! The edge-list text format is the usual network-dataset layout: one
//! whitespace-separated `source target` pair per line, `%` or `#` comment
//! lines, trailing fields (weights, timestamps) ignored. Isolated nodes have
//! no representation in this format; a graph that contains them loses them on
//! a write/parse round trip.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use hashbrown::HashSet;

use crate::error::{Error, Result};

pub type NodeId = u64;

/// A simple directed graph: no self-loops, no duplicate ordered pairs.
/// Antiparallel pairs `(u, v)` and `(v, u)` may coexist. Isolated nodes are
/// kept in the node set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectedGraph {
    nodes: BTreeSet<NodeId>,
    edges: HashSet<(NodeId, NodeId)>,
}

/// What `parse_edge_list` had to discard to keep the graph simple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestStats {
    pub self_loops_dropped: u64,
    pub duplicates_collapsed: u64,
}

impl DirectedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from explicit parts, rejecting self-loops and duplicate
    /// edges. Edge endpoints are added to the node set automatically; `nodes`
    /// only needs to carry ids that might otherwise be isolated.
    pub fn from_parts<N, E>(nodes: N, edges: E) -> Result<Self>
    where
        N: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = DirectedGraph {
            nodes: nodes.into_iter().collect(),
            edges: HashSet::new(),
        };
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop { node: u });
            }
            if !g.edges.insert((u, v)) {
                return Err(Error::DuplicateEdge { source: u, target: v });
            }
            g.nodes.insert(u);
            g.nodes.insert(v);
        }
        Ok(g)
    }

    /// Builds a graph from raw ordered pairs, dropping self-loops and
    /// collapsing duplicates instead of rejecting them. Returns what was
    /// discarded so data loss is visible to callers.
    pub fn sanitized_from_pairs<E>(pairs: E) -> (Self, IngestStats)
    where
        E: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = DirectedGraph::new();
        let mut stats = IngestStats::default();
        for (u, v) in pairs {
            if u == v {
                stats.self_loops_dropped += 1;
                g.nodes.insert(u);
                continue;
            }
            if g.edges.insert((u, v)) {
                g.nodes.insert(u);
                g.nodes.insert(v);
            } else {
                stats.duplicates_collapsed += 1;
            }
        }
        (g, stats)
    }

    pub fn node_count(&self) -> u64 {
        self.nodes.len() as u64
    }

    pub fn edge_count(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.nodes.contains(&v)
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains(&(u, v))
    }

    /// Node ids in ascending order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    /// Edges in unspecified order. Use [`DirectedGraph::sorted_edges`] where
    /// ordering matters.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn sorted_edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut edges: Vec<_> = self.edges.iter().copied().collect();
        edges.sort_unstable();
        edges
    }

    /// Out- and in-degree of every node, including isolated nodes at (0, 0).
    pub fn degrees(&self) -> DegreeTable {
        let mut per_node: BTreeMap<NodeId, (u64, u64)> =
            self.nodes.iter().map(|&v| (v, (0, 0))).collect();
        for &(u, v) in &self.edges {
            per_node.get_mut(&u).expect("edge endpoint in node set").0 += 1;
            per_node.get_mut(&v).expect("edge endpoint in node set").1 += 1;
        }
        DegreeTable { per_node }
    }
}

/// Per-node (out-degree, in-degree) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeTable {
    per_node: BTreeMap<NodeId, (u64, u64)>,
}

impl DegreeTable {
    pub fn out_degree(&self, v: NodeId) -> u64 {
        self.per_node.get(&v).map_or(0, |d| d.0)
    }

    pub fn in_degree(&self, v: NodeId) -> u64 {
        self.per_node.get(&v).map_or(0, |d| d.1)
    }

    /// `(node, out_degree, in_degree)` in ascending node order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, u64, u64)> + '_ {
        self.per_node.iter().map(|(&v, &(o, i))| (v, o, i))
    }

    pub fn len(&self) -> usize {
        self.per_node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_node.is_empty()
    }

    pub fn total_out(&self) -> u64 {
        self.per_node.values().map(|d| d.0).sum()
    }

    pub fn total_in(&self) -> u64 {
        self.per_node.values().map(|d| d.1).sum()
    }
}

/// Parses edge-list text into a simple directed graph.
///
/// Comment lines (`%` or `#` after optional leading whitespace) and blank
/// lines are skipped. Each remaining line must start with two non-negative
/// integer tokens; anything after them is ignored. Self-loops and duplicate
/// edges are sanitized, not rejected, and counted in the returned stats.
/// Empty input yields an empty graph.
pub fn parse_edge_list(text: &str) -> Result<(DirectedGraph, IngestStats)> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let u = parse_node_token(tokens.next(), idx + 1)?;
        let v = parse_node_token(tokens.next(), idx + 1)?;
        pairs.push((u, v));
    }
    Ok(DirectedGraph::sanitized_from_pairs(pairs))
}

fn parse_node_token(token: Option<&str>, line: usize) -> Result<NodeId> {
    let token = token.ok_or(Error::Parse {
        line,
        message: "expected two node ids".to_string(),
    })?;
    token.parse::<NodeId>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a non-negative integer node id, found {token:?}"),
    })
}

/// Serializes a graph as one `u<TAB>v` line per edge, sorted by `(u, v)` so
/// the output is deterministic. Isolated nodes are not representable in this
/// format and are omitted.
pub fn write_edge_list(g: &DirectedGraph) -> String {
    let mut out = String::new();
    for (u, v) in g.sorted_edges() {
        out.push_str(&u.to_string());
        out.push('\t');
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_plain_edges() {
        let (g, stats) = parse_edge_list("1 2\n2 3\n1 3\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(stats, IngestStats::default());
        assert!(g.contains_edge(1, 2));
        assert!(g.contains_edge(2, 3));
        assert!(g.contains_edge(1, 3));
    }

    #[test]
    fn parse_sanitizes_and_counts() {
        let (g, stats) = parse_edge_list("% comment\n1 1\n1 2\n1 2\n").unwrap();
        assert_eq!(g.nodes().collect::<Vec<_>>(), [1, 2]);
        assert_eq!(g.sorted_edges(), [(1, 2)]);
        assert_eq!(stats.self_loops_dropped, 1);
        assert_eq!(stats.duplicates_collapsed, 1);
    }

    #[test]
    fn parse_empty_input() {
        let (g, stats) = parse_edge_list("").unwrap();
        assert!(g.is_empty());
        assert_eq!(g.edge_count(), 0);
        assert_eq!(stats, IngestStats::default());
    }

    #[test]
    fn parse_skips_comments_and_extra_fields() {
        let (g, _) = parse_edge_list("# header\n 7 9 1.5 1111111111\n\n% trailer\n").unwrap();
        assert_eq!(g.sorted_edges(), [(7, 9)]);
    }

    #[test]
    fn parse_rejects_bad_tokens() {
        let err = parse_edge_list("1 2\nx 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_edge_list("1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_edge_list("-1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn degrees_hand_count() {
        let (g, _) = parse_edge_list("1 2\n2 3\n1 3\n").unwrap();
        let d = g.degrees();
        assert_eq!((d.out_degree(1), d.in_degree(1)), (2, 0));
        assert_eq!((d.out_degree(2), d.in_degree(2)), (1, 1));
        assert_eq!((d.out_degree(3), d.in_degree(3)), (0, 2));
        assert_eq!(d.total_out(), g.edge_count());
        assert_eq!(d.total_in(), g.edge_count());
    }

    #[test]
    fn degrees_empty_and_single_edge() {
        assert!(DirectedGraph::new().degrees().is_empty());
        let g = DirectedGraph::from_parts([], [(7, 9)]).unwrap();
        let d = g.degrees();
        assert_eq!((d.out_degree(7), d.in_degree(7)), (1, 0));
        assert_eq!((d.out_degree(9), d.in_degree(9)), (0, 1));
    }

    #[test]
    fn degrees_include_isolated_nodes() {
        let g = DirectedGraph::from_parts([5], [(1, 2)]).unwrap();
        let d = g.degrees();
        assert_eq!((d.out_degree(5), d.in_degree(5)), (0, 0));
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn write_sorts_edges() {
        let g = DirectedGraph::from_parts([], [(2, 1), (1, 2)]).unwrap();
        assert_eq!(write_edge_list(&g), "1\t2\n2\t1\n");
        assert_eq!(write_edge_list(&DirectedGraph::new()), "");
    }

    #[test]
    fn strict_constructor_rejects() {
        assert!(matches!(
            DirectedGraph::from_parts([], [(1, 1)]),
            Err(Error::SelfLoop { node: 1 })
        ));
        assert!(matches!(
            DirectedGraph::from_parts([], [(1, 2), (1, 2)]),
            Err(Error::DuplicateEdge { source: 1, target: 2 })
        ));
    }
}
