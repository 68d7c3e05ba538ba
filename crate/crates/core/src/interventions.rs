//! Structural interventions: uniform rewiring, uniform edge additions, and
//! triad-closing edge additions. All of them are pure functions of
//! `(graph, spec, rng)` and return a new graph.

use std::collections::{HashMap, HashSet};

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterventionKind {
    Rewire,
    AddRandom,
    AddTriadClosing,
}

/// How triad-closing additions are weighted: once against the original
/// graph, or recomputed after every accepted edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriadWeighting {
    #[default]
    Batch,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterventionSpec {
    pub kind: InterventionKind,
    /// Fraction of the existing edge count |E|; the affected edge count is
    /// round-half-up of `fraction * |E|`.
    pub fraction: f64,
    #[serde(default)]
    pub triad_weighting: TriadWeighting,
}

impl InterventionSpec {
    pub fn new(kind: InterventionKind, fraction: f64) -> Self {
        InterventionSpec {
            kind,
            fraction,
            triad_weighting: TriadWeighting::Batch,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fraction < 0.0 || !self.fraction.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "intervention fraction must be finite and >= 0, got {}",
                self.fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct InterventionOutcome {
    pub graph: Graph,
    /// Triad-closing additions that fell back to uniform non-edges because
    /// the weighted candidate set ran out.
    pub fallback_added: usize,
}

/// Apply an intervention, dispatching on its kind.
pub fn apply<R: Rng + ?Sized>(
    graph: &Graph,
    spec: &InterventionSpec,
    rng: &mut R,
) -> Result<InterventionOutcome> {
    spec.validate()?;
    match spec.kind {
        InterventionKind::Rewire => Ok(InterventionOutcome {
            graph: rewire(graph, spec.fraction, rng)?,
            fallback_added: 0,
        }),
        InterventionKind::AddRandom => Ok(InterventionOutcome {
            graph: add_random(graph, spec.fraction, rng)?,
            fallback_added: 0,
        }),
        InterventionKind::AddTriadClosing => {
            add_triad_closing(graph, spec.fraction, spec.triad_weighting, rng)
        }
    }
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

fn edge_budget(graph: &Graph, fraction: f64) -> usize {
    round_half_up(fraction * graph.edge_count() as f64)
}

/// |N(u) ∩ N(v)| — the number of triads an edge {u, v} would close.
pub fn common_neighbor_count(graph: &Graph, u: NodeId, v: NodeId) -> usize {
    debug_assert_ne!(u, v);
    let (a, b) = (graph.neighbors(u), graph.neighbors(v));
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Draw `m` distinct non-edges of `graph`, excluding `banned` pairs
/// (`banned` must itself consist of non-edges), each set equally likely.
/// Rejection sampling on sparse graphs, full enumeration otherwise.
fn sample_non_edges<R: Rng + ?Sized>(
    graph: &Graph,
    banned: &HashSet<(NodeId, NodeId)>,
    m: usize,
    rng: &mut R,
) -> Result<Vec<(NodeId, NodeId)>> {
    let available = graph.non_edge_count() - banned.len();
    if m > available {
        return Err(Error::InsufficientNonEdges {
            needed: m,
            available,
        });
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let total = crate::graph::pair_count(graph.node_count());
    if available * 2 >= total as usize {
        // Sparse: rejection is cheap.
        let mut chosen = HashSet::with_capacity(m);
        let mut picks = Vec::with_capacity(m);
        while picks.len() < m {
            let t = rng.gen_range(0..total);
            let (u, v) = crate::graph::pair_from_index(graph.node_count(), t);
            if graph.has_edge(u, v) || banned.contains(&(u, v)) || !chosen.insert((u, v)) {
                continue;
            }
            picks.push((u, v));
        }
        Ok(picks)
    } else {
        let mut pool: Vec<(NodeId, NodeId)> = Vec::with_capacity(available);
        let n = graph.node_count() as NodeId;
        for u in 0..n {
            for v in (u + 1)..n {
                if !graph.has_edge(u, v) && !banned.contains(&(u, v)) {
                    pool.push((u, v));
                }
            }
        }
        Ok(sample(rng, pool.len(), m).iter().map(|i| pool[i]).collect())
    }
}

/// Remove `round(fraction * |E|)` uniformly chosen edges and add the same
/// number of uniformly chosen non-edges of the original graph (labeled
/// `Random`). The edge count is unchanged.
pub fn rewire<R: Rng + ?Sized>(graph: &Graph, fraction: f64, rng: &mut R) -> Result<Graph> {
    let m = edge_budget(graph, fraction);
    if m == 0 {
        return Ok(graph.clone());
    }
    if m > graph.edge_count() {
        return Err(Error::InvalidParameters(format!(
            "cannot rewire {m} of {} edges",
            graph.edge_count()
        )));
    }
    if m > graph.non_edge_count() {
        return Err(Error::InsufficientNonEdges {
            needed: m,
            available: graph.non_edge_count(),
        });
    }
    let mut removed = vec![false; graph.edge_count()];
    for i in sample(rng, graph.edge_count(), m) {
        removed[i] = true;
    }
    // Additions are drawn from the non-edges of the original graph, so a
    // removed pair cannot come straight back: replacements are new ties.
    let additions = sample_non_edges(graph, &HashSet::new(), m, rng)?;

    let kept = graph
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| !removed[i])
        .map(|(_, e)| (e.u, e.v, e.label));
    let added = additions
        .into_iter()
        .map(|(u, v)| (u, v, EdgeLabel::Random));
    Graph::from_labeled_edges(graph.node_count(), kept.chain(added))
}

/// Add `round(fraction * |E|)` uniformly chosen non-edges, labeled
/// `Random`.
pub fn add_random<R: Rng + ?Sized>(graph: &Graph, fraction: f64, rng: &mut R) -> Result<Graph> {
    let m = edge_budget(graph, fraction);
    let additions = sample_non_edges(graph, &HashSet::new(), m, rng)?;
    extend_graph(graph, additions)
}

fn extend_graph(graph: &Graph, additions: Vec<(NodeId, NodeId)>) -> Result<Graph> {
    let existing = graph.edges().iter().map(|e| (e.u, e.v, e.label));
    let added = additions
        .into_iter()
        .map(|(u, v)| (u, v, EdgeLabel::Random));
    Graph::from_labeled_edges(graph.node_count(), existing.chain(added))
}

/// Candidate non-edges with at least one common neighbor, weighted by how
/// many triads they close.
fn triad_candidates(graph: &Graph) -> Vec<((NodeId, NodeId), f64)> {
    let mut counts: HashMap<(NodeId, NodeId), u32> = HashMap::new();
    for w in 0..graph.node_count() as NodeId {
        let neigh = graph.neighbors(w);
        for i in 0..neigh.len() {
            for j in (i + 1)..neigh.len() {
                let (a, b) = (neigh[i].0, neigh[j].0);
                let key = if a < b { (a, b) } else { (b, a) };
                *counts.entry(key).or_insert(0) += 1;
            }
        }
    }
    let mut candidates: Vec<((NodeId, NodeId), f64)> = counts
        .into_iter()
        .filter(|&((u, v), _)| !graph.has_edge(u, v))
        .map(|(pair, w)| (pair, w as f64))
        .collect();
    candidates.sort_unstable_by_key(|&(pair, _)| pair);
    candidates
}

/// Add `round(fraction * |E|)` non-edges sampled without replacement with
/// probability proportional to the number of triads each closes. When the
/// weighted candidates run out, the remainder falls back to uniform
/// non-edges and is reported in the outcome.
pub fn add_triad_closing<R: Rng + ?Sized>(
    graph: &Graph,
    fraction: f64,
    weighting: TriadWeighting,
    rng: &mut R,
) -> Result<InterventionOutcome> {
    let m = edge_budget(graph, fraction);
    if m > graph.non_edge_count() {
        return Err(Error::InsufficientNonEdges {
            needed: m,
            available: graph.non_edge_count(),
        });
    }
    if m == 0 {
        return Ok(InterventionOutcome {
            graph: graph.clone(),
            fallback_added: 0,
        });
    }

    let mut picked: Vec<(NodeId, NodeId)> = Vec::with_capacity(m);
    match weighting {
        TriadWeighting::Batch => {
            // Weighted sampling without replacement via exponential-key
            // ranking: keep the m largest u^(1/w).
            let candidates = triad_candidates(graph);
            let mut keyed: Vec<(f64, (NodeId, NodeId))> = candidates
                .iter()
                .map(|&(pair, w)| (rng.gen::<f64>().powf(1.0 / w), pair))
                .collect();
            keyed.sort_unstable_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            picked.extend(keyed.iter().take(m).map(|&(_, pair)| pair));
        }
        TriadWeighting::Sequential => {
            let mut current = graph.clone();
            while picked.len() < m {
                let candidates = triad_candidates(&current);
                if candidates.is_empty() {
                    break;
                }
                let total: f64 = candidates.iter().map(|&(_, w)| w).sum();
                let mut draw = rng.gen::<f64>() * total;
                let mut chosen = candidates[candidates.len() - 1].0;
                for &(pair, w) in &candidates {
                    if draw < w {
                        chosen = pair;
                        break;
                    }
                    draw -= w;
                }
                picked.push(chosen);
                current = extend_graph(&current, vec![chosen])?;
            }
        }
    }

    let fallback_added = m - picked.len();
    if fallback_added > 0 {
        let banned: HashSet<(NodeId, NodeId)> = picked.iter().copied().collect();
        picked.extend(sample_non_edges(graph, &banned, fallback_added, rng)?);
    }
    Ok(InterventionOutcome {
        graph: extend_graph(graph, picked)?,
        fallback_added,
    })
}
