//! Graph generators. All of them are pure functions of their parameters and
//! the RNG state, so a fixed seed reproduces the same graph bit for bit.

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::{Edge, EdgeLabel, Graph, NodeId};
use crate::error::{Error, Result};

/// Cycle-power graph: every node on an `n`-cycle is joined to all nodes
/// within hop distance `k`. Hop-1 edges are labeled `Cycle1`, the rest
/// `CycleExtra`; every node ends up with degree exactly `2k`.
pub fn cycle_power(n: usize, k: usize) -> Result<Graph> {
    if k < 1 {
        return Err(Error::InvalidParameters("cycle power k must be >= 1".into()));
    }
    if n <= 2 * k {
        return Err(Error::InvalidParameters(format!(
            "cycle power needs n > 2k (got n = {n}, k = {k})"
        )));
    }
    let mut edges = Vec::with_capacity(n * k);
    for d in 1..=k {
        let label = if d == 1 {
            EdgeLabel::Cycle1
        } else {
            EdgeLabel::CycleExtra
        };
        for i in 0..n {
            let j = (i + d) % n;
            let (u, v) = if i < j { (i, j) } else { (j, i) };
            edges.push(Edge {
                u: u as NodeId,
                v: v as NodeId,
                label,
            });
        }
    }
    edges.sort_unstable_by_key(|e| (e.u, e.v));
    Ok(Graph::from_sorted_edges(n, edges))
}

/// Erdős–Rényi draw: each unordered pair is included independently with
/// probability `p`, labeled `Random`. Sparse draws skip over the linearized
/// upper triangle with geometric jumps instead of testing all n(n-1)/2
/// pairs.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters(format!(
            "edge probability must be in [0, 1], got {p}"
        )));
    }
    let total = pair_count(n);
    let mut edges = Vec::new();
    if p > 0.0 && total > 0 {
        let geom = Geometric::new(p).expect("p validated above");
        let mut cursor: u64 = 0;
        loop {
            let skip = geom.sample(rng);
            cursor = match cursor.checked_add(skip) {
                Some(c) => c,
                None => break,
            };
            if cursor >= total {
                break;
            }
            let (u, v) = pair_from_index(n, cursor);
            edges.push(Edge {
                u,
                v,
                label: EdgeLabel::Random,
            });
            cursor += 1;
        }
    }
    // Skipping visits indices in increasing order, which is already the
    // (u, v) sort order.
    Ok(Graph::from_sorted_edges(n, edges))
}

/// Partially rewired C2: starting from `cycle_power(n, 2)`, every
/// `CycleExtra` edge is removed independently with probability
/// `1 - exp(-eta / 2n)` and every unordered pair is added independently
/// (label `Random`) with probability `1 - exp(-eta / n^2)`. `Cycle1` edges
/// are always kept; an added pair that collides with a kept cycle edge
/// keeps the cycle label.
pub fn eta_rewired_c2<R: Rng + ?Sized>(n: usize, eta: f64, rng: &mut R) -> Result<Graph> {
    if eta < 0.0 || !eta.is_finite() {
        return Err(Error::InvalidParameters(format!(
            "eta must be finite and >= 0, got {eta}"
        )));
    }
    let base = cycle_power(n, 2)?;
    let p_remove = -(-eta / (2.0 * n as f64)).exp_m1();
    let p_add = -(-eta / (n as f64 * n as f64)).exp_m1();

    let mut edges: Vec<Edge> = Vec::with_capacity(base.edge_count());
    for &e in base.edges() {
        if e.label == EdgeLabel::CycleExtra && rng.gen_bool(p_remove) {
            continue;
        }
        edges.push(e);
    }
    let kept = Graph::from_sorted_edges(n, edges);

    let additions = erdos_renyi(n, p_add, rng)?;
    kept.union(&additions)
}

/// Same distribution as [`eta_rewired_c2`] for any single `eta`, but with
/// per-pair thresholds derived from `seed` alone. For a fixed seed the
/// removal and addition sets grow monotonically with `eta`, which is what a
/// path-wise comparison across rewiring levels needs. Costs O(n^2) hashing,
/// so it is meant for moderate n.
pub fn eta_rewired_c2_coupled(n: usize, eta: f64, seed: u64) -> Result<Graph> {
    if eta < 0.0 || !eta.is_finite() {
        return Err(Error::InvalidParameters(format!(
            "eta must be finite and >= 0, got {eta}"
        )));
    }
    let base = cycle_power(n, 2)?;
    let p_remove = -(-eta / (2.0 * n as f64)).exp_m1();
    let p_add = -(-eta / (n as f64 * n as f64)).exp_m1();

    let mut edges: Vec<Edge> = Vec::with_capacity(base.edge_count());
    for &e in base.edges() {
        if e.label == EdgeLabel::CycleExtra {
            let t = pair_index(n, e.u, e.v);
            if unit_from_hash(seed, 0xD1, t) < p_remove {
                continue;
            }
        }
        edges.push(e);
    }
    let kept = Graph::from_sorted_edges(n, edges);

    let mut added = Vec::new();
    for t in 0..pair_count(n) {
        if unit_from_hash(seed, 0xA2, t) < p_add {
            let (u, v) = pair_from_index(n, t);
            added.push(Edge {
                u,
                v,
                label: EdgeLabel::Random,
            });
        }
    }
    kept.union(&Graph::from_sorted_edges(n, added))
}

pub(crate) fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Index of pair `(u, v)` (u < v) in the row-major linearized upper
/// triangle.
pub(crate) fn pair_index(n: usize, u: NodeId, v: NodeId) -> u64 {
    debug_assert!(u < v && (v as usize) < n);
    let (n, u, v) = (n as u64, u as u64, v as u64);
    row_start(n, u) + (v - u - 1)
}

fn row_start(n: u64, i: u64) -> u64 {
    // Number of pairs (a, b) with a < i: sum of (n-1-a) for a in 0..i.
    i * (n - 1) - i * (i.saturating_sub(1)) / 2
}

/// Inverse of [`pair_index`].
pub(crate) fn pair_from_index(n: usize, t: u64) -> (NodeId, NodeId) {
    let n64 = n as u64;
    debug_assert!(t < pair_count(n));
    // Solve row_start(i) <= t < row_start(i+1) starting from the float root
    // of the quadratic, then correct for rounding.
    let a = 2.0 * n64 as f64 - 1.0;
    let disc = (a * a - 8.0 * t as f64).max(0.0);
    let mut i = ((a - disc.sqrt()) / 2.0).floor() as u64;
    i = i.min(n64 - 2);
    while row_start(n64, i) > t {
        i -= 1;
    }
    while i < n64 - 2 && row_start(n64, i + 1) <= t {
        i += 1;
    }
    let j = i + 1 + (t - row_start(n64, i));
    (i as NodeId, j as NodeId)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

fn unit_from_hash(seed: u64, tag: u64, index: u64) -> f64 {
    let h = splitmix64(seed ^ splitmix64(tag ^ splitmix64(index)));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
