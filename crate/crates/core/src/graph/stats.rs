//! Summary statistics for a graph.

use serde::Serialize;

use super::{Graph, NodeId};

#[derive(Debug, Clone, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub mean_degree: f64,
    /// Mean over nodes of the closed-triple fraction; nodes with degree < 2
    /// contribute 0.
    pub clustering_coefficient: f64,
    /// Connected component sizes, largest first.
    pub component_sizes: Vec<usize>,
}

pub fn graph_stats(graph: &Graph) -> GraphStats {
    let n = graph.node_count();
    let m = graph.edge_count();
    let mean_degree = if n == 0 { 0.0 } else { 2.0 * m as f64 / n as f64 };

    let mut clustering_sum = 0.0;
    for u in 0..n as NodeId {
        let neigh = graph.neighbors(u);
        let d = neigh.len();
        if d < 2 {
            continue;
        }
        let mut closed = 0usize;
        for i in 0..d {
            for j in (i + 1)..d {
                if graph.has_edge(neigh[i].0, neigh[j].0) {
                    closed += 1;
                }
            }
        }
        clustering_sum += closed as f64 / (d * (d - 1) / 2) as f64;
    }
    let clustering_coefficient = if n == 0 { 0.0 } else { clustering_sum / n as f64 };

    GraphStats {
        n,
        m,
        mean_degree,
        clustering_coefficient,
        component_sizes: component_sizes(graph),
    }
}

fn component_sizes(graph: &Graph) -> Vec<usize> {
    let n = graph.node_count();
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n as NodeId {
        if seen[start as usize] {
            continue;
        }
        seen[start as usize] = true;
        stack.push(start);
        let mut size = 0usize;
        while let Some(u) = stack.pop() {
            size += 1;
            for &(v, _) in graph.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}
