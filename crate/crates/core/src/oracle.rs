//! Ground truth on small instances: the deterministic threshold closure
//! (bootstrap percolation) and the exact expected time to full infection
//! via an absorbing chain over infected subsets.
//!
//! Infected subsets are bitmasks. The process is monotone, so expected
//! hitting times can be solved by plain backward substitution: a bitmask
//! superset is always numerically larger, hence iterating masks downward
//! visits every successor state first.

use serde::Serialize;

use crate::activation::{meets_fractional_threshold, ActivationSpec};
use crate::dynamics::DynamicsConfig;
use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, Graph, NodeId};

/// Closure is quadratic-ish per round; 20 nodes keeps masks in u32.
pub const CLOSURE_MAX_N: usize = 20;
/// The chain solver enumerates subsets of subsets.
pub const EXPECTED_TIME_MAX_N: usize = 12;

pub type NodeMask = u32;

pub fn mask_of(nodes: &[NodeId]) -> NodeMask {
    nodes.iter().fold(0, |m, &u| m | (1 << u))
}

pub fn mask_nodes(mask: NodeMask) -> Vec<NodeId> {
    (0..32).filter(|&u| mask & (1 << u) != 0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosureResult {
    /// Bitmask of the final infected set.
    pub final_set: NodeMask,
    /// Number of sweeps that added at least one node.
    pub rounds: u32,
}

fn check_seeds(graph: &Graph, seeds: &[NodeId]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    for &s in seeds {
        if s as usize >= graph.node_count() {
            return Err(Error::NodeOutOfRange {
                node: s,
                n: graph.node_count(),
            });
        }
    }
    Ok(())
}

fn infected_neighbor_count(graph: &Graph, u: NodeId, set: NodeMask) -> u32 {
    graph
        .neighbors(u)
        .iter()
        .filter(|&&(v, _)| set & (1 << v) != 0)
        .count() as u32
}

/// Deterministic theta-threshold closure: repeatedly add every node with at
/// least `theta` infected neighbors until nothing changes.
pub fn deterministic_closure(graph: &Graph, seeds: &[NodeId], theta: u32) -> Result<ClosureResult> {
    let seq = closure_rounds(graph, seeds, theta)?;
    Ok(ClosureResult {
        final_set: *seq.last().expect("sequence starts with the seed set"),
        rounds: (seq.len() - 1) as u32,
    })
}

/// Per-round infected sets of the deterministic closure, starting with the
/// seed set itself.
pub fn closure_rounds(graph: &Graph, seeds: &[NodeId], theta: u32) -> Result<Vec<NodeMask>> {
    let n = graph.node_count();
    if n > CLOSURE_MAX_N {
        return Err(Error::OracleTooLarge {
            n,
            limit: CLOSURE_MAX_N,
        });
    }
    check_seeds(graph, seeds)?;
    let mut seq = vec![mask_of(seeds)];
    loop {
        let set = *seq.last().unwrap();
        let mut add = 0;
        for u in 0..n as NodeId {
            if set & (1 << u) == 0 && infected_neighbor_count(graph, u, set) >= theta {
                add |= 1 << u;
            }
        }
        if add == 0 {
            return Ok(seq);
        }
        seq.push(set | add);
    }
}

/// Does adding `extra_edge` ever slow the deterministic spread down?
///
/// Returns true when the run on the augmented graph dominates the original
/// round by round: at every round its infected set contains the original
/// one, so the final set can only grow and no coverage level is reached
/// later.
pub fn edge_monotonicity_check(
    graph: &Graph,
    extra_edge: (NodeId, NodeId),
    seeds: &[NodeId],
    theta: u32,
) -> Result<bool> {
    let (a, b) = extra_edge;
    if graph.has_edge(a, b) {
        return Err(Error::InvalidParameters(format!(
            "edge ({a}, {b}) already present"
        )));
    }
    let mut edges: Vec<(NodeId, NodeId, EdgeLabel)> = graph
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.label))
        .collect();
    edges.push((a, b, EdgeLabel::Random));
    let augmented = Graph::from_labeled_edges(graph.node_count(), edges)?;

    let base = closure_rounds(graph, seeds, theta)?;
    let more = closure_rounds(&augmented, seeds, theta)?;
    let at = |seq: &[NodeMask], t: usize| seq[t.min(seq.len() - 1)];
    for (t, &b_t) in base.iter().enumerate() {
        if at(&more, t) & b_t != b_t {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Expected rounds to full infection, or `Unreachable` when the full set
/// cannot be reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ExpectedTime {
    Finite(f64),
    Unreachable,
}

impl ExpectedTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExpectedTime::Finite(v) => Some(v),
            ExpectedTime::Unreachable => None,
        }
    }
}

/// Adoption probability of node `u` given the infected set, mirroring one
/// synchronous round of the dynamics with `gamma = 0` (every infected node
/// is infectious).
fn adoption_probability(
    graph: &Graph,
    spec: &ActivationSpec,
    config: &DynamicsConfig,
    u: NodeId,
    set: NodeMask,
) -> f64 {
    let mut x = 0u32;
    let mut x_sub = 0u32;
    for &(v, label) in graph.neighbors(u) {
        if set & (1 << v) != 0 {
            x += 1;
            if config.sub_threshold_labels.contains(label) {
                x_sub += 1;
            }
        }
    }
    match *spec {
        ActivationSpec::NoisyThreshold { theta, q, rho } => {
            if x >= theta {
                rho
            } else if x_sub >= 1 {
                q
            } else {
                0.0
            }
        }
        ActivationSpec::FractionalThreshold { theta_star, q, rho } => {
            if x == 0 {
                0.0
            } else if meets_fractional_threshold(x, graph.degree(u) as u32, theta_star) {
                rho
            } else if x_sub >= 1 {
                q
            } else {
                0.0
            }
        }
        ActivationSpec::Simple { beta } => 1.0 - (1.0 - beta).powi(x as i32),
        ActivationSpec::Probit { .. } | ActivationSpec::Logit { .. } => {
            crate::activation::activation_probability(spec, x, graph.degree(u) as u32)
                .expect("x bounded by degree")
        }
    }
}

/// Exact expected hitting time of the fully infected state.
///
/// Node adoptions are independent given the current infected set, so the
/// transition out of a state factors over the currently-eligible nodes;
/// hitting times follow by backward substitution over supersets.
pub fn exact_expected_time(
    graph: &Graph,
    seeds: &[NodeId],
    spec: &ActivationSpec,
    config: &DynamicsConfig,
) -> Result<ExpectedTime> {
    let n = graph.node_count();
    if n > EXPECTED_TIME_MAX_N {
        return Err(Error::OracleTooLarge {
            n,
            limit: EXPECTED_TIME_MAX_N,
        });
    }
    if config.gamma != 0.0 {
        return Err(Error::OracleUnsupported("gamma = 0".into()));
    }
    spec.validate()?;
    config.validate()?;
    check_seeds(graph, seeds)?;

    let full: NodeMask = if n == 32 { !0 } else { (1 << n) - 1 };
    let seed_mask = mask_of(seeds);

    // Reachability first: grow the seed set by every node that could ever
    // adopt. Activation is monotone in the infected set, so this closure is
    // exactly the set of nodes reachable with positive probability.
    let mut reach = seed_mask;
    loop {
        let mut add = 0;
        for u in 0..n as NodeId {
            if reach & (1 << u) == 0
                && adoption_probability(graph, spec, config, u, reach) > 0.0
            {
                add |= 1 << u;
            }
        }
        if add == 0 {
            break;
        }
        reach |= add;
    }
    if reach != full {
        return Ok(ExpectedTime::Unreachable);
    }

    let mut expected = vec![0.0f64; (full as usize) + 1];
    for mask in (seed_mask..=full).rev() {
        if mask & seed_mask != seed_mask {
            continue;
        }
        if mask == full {
            continue; // expected[full] = 0
        }
        let eligible: Vec<(NodeMask, f64)> = (0..n as NodeId)
            .filter(|&u| mask & (1 << u) == 0)
            .filter_map(|u| {
                let p = adoption_probability(graph, spec, config, u, mask);
                (p > 0.0).then_some((1 << u, p))
            })
            .collect();
        if eligible.is_empty() {
            expected[mask as usize] = f64::INFINITY;
            continue;
        }
        let mut stay = 0.0;
        let mut acc = 0.0;
        for t in 0..(1u32 << eligible.len()) {
            let mut prob = 1.0;
            let mut bits: NodeMask = 0;
            for (i, &(bit, p)) in eligible.iter().enumerate() {
                if t & (1 << i) != 0 {
                    prob *= p;
                    bits |= bit;
                } else {
                    prob *= 1.0 - p;
                }
            }
            if prob == 0.0 {
                continue;
            }
            if bits == 0 {
                stay = prob;
            } else {
                acc += prob * expected[(mask | bits) as usize];
            }
        }
        expected[mask as usize] = (1.0 + acc) / (1.0 - stay);
    }

    Ok(ExpectedTime::Finite(expected[seed_mask as usize]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle_power;
    use crate::graph::LabelSet;

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as NodeId {
            for v in (u + 1)..n as NodeId {
                edges.push((u, v, EdgeLabel::Empirical));
            }
        }
        Graph::from_labeled_edges(n, edges).unwrap()
    }

    #[test]
    fn closure_on_c2_reaches_everything_in_three_rounds() {
        let g = cycle_power(8, 2).unwrap();
        let r = deterministic_closure(&g, &[0, 1], 2).unwrap();
        assert_eq!(r.final_set, 0xFF);
        assert_eq!(r.rounds, 3);
    }

    #[test]
    fn closure_on_plain_cycle_stops_at_seeds() {
        let g = cycle_power(8, 1).unwrap();
        let r = deterministic_closure(&g, &[0, 1], 2).unwrap();
        assert_eq!(r.final_set, 0b11);
        assert_eq!(r.rounds, 0);
    }

    #[test]
    fn closure_on_k4_is_one_round() {
        let g = complete(4);
        let r = deterministic_closure(&g, &[1, 3], 2).unwrap();
        assert_eq!(r.final_set, 0b1111);
        assert_eq!(r.rounds, 1);
    }

    #[test]
    fn closure_matches_sequential_fixpoint() {
        // The least fixpoint is unique: adding eligible nodes one at a time
        // in index order must land on the same final set.
        let g = cycle_power(12, 2).unwrap();
        let sync = deterministic_closure(&g, &[3, 4], 2).unwrap();
        let mut set = mask_of(&[3, 4]);
        'outer: loop {
            for u in 0..12 {
                if set & (1 << u) == 0 && infected_neighbor_count(&g, u, set) >= 2 {
                    set |= 1 << u;
                    continue 'outer;
                }
            }
            break;
        }
        assert_eq!(set, sync.final_set);
    }

    #[test]
    fn expected_time_on_triangle_is_one() {
        let g = complete(3);
        let spec = ActivationSpec::NoisyThreshold {
            theta: 2,
            q: 0.0,
            rho: 1.0,
        };
        let t = exact_expected_time(&g, &[0, 1], &spec, &DynamicsConfig::default()).unwrap();
        assert_eq!(t, ExpectedTime::Finite(1.0));
    }

    #[test]
    fn expected_time_matches_closed_form_on_c1_4() {
        // Two frontier nodes race Geometric(1/2) clocks; once one fires the
        // other is above threshold: E = E[first of two] + P(only one fired)
        // * 1 = 4/3 + 2/3 = 2.
        let g = cycle_power(4, 1).unwrap();
        let spec = ActivationSpec::NoisyThreshold {
            theta: 2,
            q: 0.5,
            rho: 1.0,
        };
        let t = exact_expected_time(&g, &[0, 1], &spec, &DynamicsConfig::default())
            .unwrap()
            .finite()
            .unwrap();
        assert!((t - 2.0).abs() < 1e-12, "expected 2.0, got {t}");
    }

    #[test]
    fn unreachable_when_q_is_zero_on_plain_cycle() {
        let g = cycle_power(8, 1).unwrap();
        let spec = ActivationSpec::NoisyThreshold {
            theta: 2,
            q: 0.0,
            rho: 1.0,
        };
        let t = exact_expected_time(&g, &[0, 1], &spec, &DynamicsConfig::default()).unwrap();
        assert_eq!(t, ExpectedTime::Unreachable);
    }

    #[test]
    fn label_restriction_flows_into_the_solver() {
        // q restricted to Cycle1: the random edge cannot carry
        // sub-threshold adoptions, so node 2 is unreachable.
        let g = Graph::from_labeled_edges(
            3,
            vec![(0, 1, EdgeLabel::Cycle1), (1, 2, EdgeLabel::Random)],
        )
        .unwrap();
        let spec = ActivationSpec::NoisyThreshold {
            theta: 2,
            q: 0.9,
            rho: 1.0,
        };
        let config = DynamicsConfig {
            sub_threshold_labels: LabelSet::CYCLE1,
            ..DynamicsConfig::default()
        };
        assert_eq!(
            exact_expected_time(&g, &[0], &spec, &config).unwrap(),
            ExpectedTime::Unreachable
        );
        let unrestricted = exact_expected_time(&g, &[0], &spec, &DynamicsConfig::default())
            .unwrap()
            .finite()
            .unwrap();
        assert!(unrestricted.is_finite());
    }

    #[test]
    fn deterministic_expected_time_agrees_with_closure() {
        let g = cycle_power(10, 2).unwrap();
        let spec = ActivationSpec::NoisyThreshold {
            theta: 2,
            q: 0.0,
            rho: 1.0,
        };
        let closure = deterministic_closure(&g, &[0, 1], 2).unwrap();
        assert_eq!(closure.final_set, (1 << 10) - 1);
        let t = exact_expected_time(&g, &[0, 1], &spec, &DynamicsConfig::default())
            .unwrap()
            .finite()
            .unwrap();
        assert!((t - closure.rounds as f64).abs() < 1e-12);
    }

    #[test]
    fn size_limits_are_enforced() {
        let g = cycle_power(25, 2).unwrap();
        assert!(matches!(
            deterministic_closure(&g, &[0, 1], 2),
            Err(Error::OracleTooLarge { .. })
        ));
        let g13 = cycle_power(13, 2).unwrap();
        let spec = ActivationSpec::NoisyThreshold {
            theta: 2,
            q: 0.5,
            rho: 1.0,
        };
        assert!(matches!(
            exact_expected_time(&g13, &[0, 1], &spec, &DynamicsConfig::default()),
            Err(Error::OracleTooLarge { .. })
        ));
        let g10 = cycle_power(10, 2).unwrap();
        let gamma_config = DynamicsConfig {
            gamma: 0.5,
            ..DynamicsConfig::default()
        };
        assert!(matches!(
            exact_expected_time(&g10, &[0, 1], &spec, &gamma_config),
            Err(Error::OracleUnsupported(_))
        ));
    }

    #[test]
    fn adding_an_edge_never_slows_spread_on_c2_10() {
        let g = cycle_power(10, 2).unwrap();
        for u in 0..10 {
            for v in (u + 1)..10 {
                if g.has_edge(u, v) {
                    continue;
                }
                assert!(
                    edge_monotonicity_check(&g, (u, v), &[0, 1], 2).unwrap(),
                    "edge ({u}, {v}) slowed the spread"
                );
            }
        }
    }

    #[test]
    fn added_edge_can_grow_the_final_set() {
        // Plain cycle, threshold 2: nothing spreads; a chord through the
        // seeds lets node 2 adopt. Still counted as monotone.
        let g = cycle_power(8, 1).unwrap();
        let base = deterministic_closure(&g, &[0, 1], 2).unwrap();
        assert_eq!(base.final_set, 0b11);
        assert!(edge_monotonicity_check(&g, (0, 2), &[0, 1], 2).unwrap());

        let mut edges: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.label)).collect();
        edges.push((0, 2, EdgeLabel::Random));
        let augmented = Graph::from_labeled_edges(8, edges).unwrap();
        let more = deterministic_closure(&augmented, &[0, 1], 2).unwrap();
        assert_eq!(more.final_set, 0b111);
    }

    #[test]
    fn isolated_seed_edge_changes_nothing() {
        let g = Graph::from_labeled_edges(3, vec![]).unwrap();
        assert!(edge_monotonicity_check(&g, (0, 2), &[0, 1], 2).unwrap());
    }
}
