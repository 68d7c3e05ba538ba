//! Labeled undirected simple graphs and the generators used throughout the
//! simulations.
//!
//! A [`Graph`] is immutable after construction: dynamics and interventions
//! never mutate a graph in place, they build new ones. That makes it safe to
//! share one graph across concurrently running replicates.

mod generate;
mod io;
mod stats;

pub use generate::{cycle_power, erdos_renyi, eta_rewired_c2, eta_rewired_c2_coupled};
pub(crate) use generate::{pair_count, pair_from_index};
pub use io::{load_edge_list, write_edge_list, LoadedGraph};
pub use stats::{graph_stats, GraphStats};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index in `[0, n)`.
pub type NodeId = u32;

/// Provenance of an edge. The dynamics can restrict sub-threshold adoptions
/// to a subset of labels, so every edge carries exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeLabel {
    /// Hop-distance-1 edge on the base cycle.
    Cycle1,
    /// Hop-distance 2..k edge of a cycle-power graph.
    CycleExtra,
    /// Random long tie.
    Random,
    /// Edge read from an empirical edge list.
    Empirical,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 4] = [
        EdgeLabel::Cycle1,
        EdgeLabel::CycleExtra,
        EdgeLabel::Random,
        EdgeLabel::Empirical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::Cycle1 => "cycle1",
            EdgeLabel::CycleExtra => "cycle-extra",
            EdgeLabel::Random => "random",
            EdgeLabel::Empirical => "empirical",
        }
    }

    pub fn parse(token: &str) -> Option<EdgeLabel> {
        match token.to_ascii_lowercase().as_str() {
            "cycle1" => Some(EdgeLabel::Cycle1),
            "cycle-extra" | "cycleextra" => Some(EdgeLabel::CycleExtra),
            "random" => Some(EdgeLabel::Random),
            "empirical" => Some(EdgeLabel::Empirical),
            _ => None,
        }
    }

    /// Precedence when a union produces the same pair twice: cycle labels
    /// win over long ties so that "q along the cycle" keeps its meaning.
    fn precedence(self) -> u8 {
        match self {
            EdgeLabel::Cycle1 => 3,
            EdgeLabel::CycleExtra => 2,
            EdgeLabel::Empirical => 1,
            EdgeLabel::Random => 0,
        }
    }
}

/// Small set of edge labels, used to restrict which edges carry
/// sub-threshold adoptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet(u8);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);
    pub const ALL: LabelSet = LabelSet(0b1111);
    pub const CYCLE1: LabelSet = LabelSet(1);

    fn bit(label: EdgeLabel) -> u8 {
        match label {
            EdgeLabel::Cycle1 => 1,
            EdgeLabel::CycleExtra => 2,
            EdgeLabel::Random => 4,
            EdgeLabel::Empirical => 8,
        }
    }

    pub fn single(label: EdgeLabel) -> LabelSet {
        LabelSet(Self::bit(label))
    }

    pub fn with(self, label: EdgeLabel) -> LabelSet {
        LabelSet(self.0 | Self::bit(label))
    }

    pub fn contains(self, label: EdgeLabel) -> bool {
        self.0 & Self::bit(label) != 0
    }

    pub fn is_all(self) -> bool {
        self == Self::ALL
    }
}

impl FromIterator<EdgeLabel> for LabelSet {
    fn from_iter<I: IntoIterator<Item = EdgeLabel>>(iter: I) -> Self {
        iter.into_iter().fold(LabelSet::EMPTY, LabelSet::with)
    }
}

/// Labeled undirected edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub label: EdgeLabel,
}

/// Immutable labeled undirected simple graph.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(NodeId, EdgeLabel)>>,
}

impl Graph {
    /// Build a graph from labeled pairs. Pairs are normalized to `u < v`;
    /// self-loops and duplicate pairs are construction errors here (the
    /// edge-list loader is the one place that forgives them).
    pub fn from_labeled_edges<I>(n: usize, pairs: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId, EdgeLabel)>,
    {
        let mut edges = Vec::new();
        for (a, b, label) in pairs {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if a as usize >= n {
                return Err(Error::NodeOutOfRange { node: a, n });
            }
            if b as usize >= n {
                return Err(Error::NodeOutOfRange { node: b, n });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            edges.push(Edge { u, v, label });
        }
        edges.sort_unstable_by_key(|e| (e.u, e.v));
        for w in edges.windows(2) {
            if w[0].u == w[1].u && w[0].v == w[1].v {
                return Err(Error::DuplicateEdge(w[0].u, w[0].v));
            }
        }
        Ok(Self::from_sorted_edges(n, edges))
    }

    /// `edges` must be normalized, sorted and duplicate-free.
    pub(crate) fn from_sorted_edges(n: usize, edges: Vec<Edge>) -> Graph {
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u as usize].push((e.v, e.label));
            adj[e.v as usize].push((e.u, e.label));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(v, _)| v);
        }
        Graph { n, edges, adj }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(u, v)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, EdgeLabel)] {
        &self.adj[u as usize]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u as usize].len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.label_of(a, b).is_some()
    }

    pub fn label_of(&self, a: NodeId, b: NodeId) -> Option<EdgeLabel> {
        if a == b {
            return None;
        }
        // Search from the lower-degree endpoint.
        let (from, to) = if self.degree(a) <= self.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        let list = &self.adj[from as usize];
        list.binary_search_by_key(&to, |&(v, _)| v)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn count_label(&self, label: EdgeLabel) -> usize {
        self.edges.iter().filter(|e| e.label == label).count()
    }

    /// Union of two graphs on the same node set. When both contain a pair,
    /// the higher-precedence label is kept (cycle labels win).
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        // Both edge vectors are sorted by (u, v): merge.
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() && j < other.edges.len() {
            let (a, b) = (self.edges[i], other.edges[j]);
            match (a.u, a.v).cmp(&(b.u, b.v)) {
                std::cmp::Ordering::Less => {
                    edges.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    edges.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let label = if a.label.precedence() >= b.label.precedence() {
                        a.label
                    } else {
                        b.label
                    };
                    edges.push(Edge { label, ..a });
                    i += 1;
                    j += 1;
                }
            }
        }
        edges.extend_from_slice(&self.edges[i..]);
        edges.extend_from_slice(&other.edges[j..]);
        Ok(Graph::from_sorted_edges(self.n, edges))
    }

    /// Non-edge count, i.e. `n(n-1)/2 - m`.
    pub fn non_edge_count(&self) -> usize {
        let total = self.n * (self.n.saturating_sub(1)) / 2;
        total - self.edges.len()
    }

    /// Sanity check of the structural invariants; used by tests.
    pub fn check_invariants(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.u == e.v {
                return Err(Error::SelfLoop(e.u));
            }
            if e.u > e.v || e.v as usize >= self.n {
                return Err(Error::InvalidParameters(format!(
                    "edge ({}, {}) not normalized or out of range",
                    e.u, e.v
                )));
            }
            if !seen.insert((e.u, e.v)) {
                return Err(Error::DuplicateEdge(e.u, e.v));
            }
        }
        let mut degree_sum = 0usize;
        for u in 0..self.n as NodeId {
            degree_sum += self.degree(u);
            for &(v, label) in self.neighbors(u) {
                if self.label_of(v, u) != Some(label) {
                    return Err(Error::InvalidParameters(format!(
                        "adjacency asymmetric at ({u}, {v})"
                    )));
                }
            }
        }
        if degree_sum != 2 * self.edges.len() {
            return Err(Error::InvalidParameters(
                "adjacency inconsistent with edge set".into(),
            ));
        }
        Ok(())
    }
}
