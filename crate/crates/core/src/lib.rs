//! Simulation laboratory for threshold-based (complex) and simple
//! contagions on synthetic and empirical networks.
//!
//! The pieces:
//!
//! * [`graph`]: immutable labeled graphs plus the generators (cycle-power
//!   graphs, Erdős–Rényi draws, unions, partially rewired C2) and an
//!   edge-list loader for empirical networks.
//! * [`activation`]: adoption-probability functions (simple contagion,
//!   noisy absolute/fractional thresholds, probit, logit).
//! * [`dynamics`]: the synchronous round process with optional
//!   sub-threshold label restriction and deactivation.
//! * [`interventions`]: rewiring, random, and triad-closing edge
//!   additions.
//! * [`harness`]: seeded Monte Carlo replication with summary statistics
//!   (normal CIs, ECDFs, dominance, log-log slopes).
//! * [`oracle`]: exact small-instance ground truth via the deterministic
//!   threshold closure and expected hitting times of the absorbing chain.

pub mod activation;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod harness;
pub mod interventions;
pub mod oracle;

pub use activation::{activation_probability, ActivationSpec};
pub use dynamics::{
    run, run_with_state, seed_adjacent_pair, step, ContagionState, DynamicsConfig, NodeStatus,
    RunOutcome, SeedRule, TrajectoryPoint,
};
pub use error::{Error, Result};
pub use graph::{
    cycle_power, erdos_renyi, eta_rewired_c2, eta_rewired_c2_coupled, graph_stats, load_edge_list,
    write_edge_list, EdgeLabel, Graph, GraphStats, LabelSet, LoadedGraph, NodeId,
};
pub use harness::{
    monte_carlo, run_condition, summarize, AxisValues, Condition, EdgeProbability, GraphSource,
    ReplicateOutcome, SampleSet, SummaryStats,
};
pub use interventions::{
    add_random, add_triad_closing, common_neighbor_count, rewire, InterventionKind,
    InterventionOutcome, InterventionSpec, TriadWeighting,
};
pub use oracle::{
    deterministic_closure, edge_monotonicity_check, exact_expected_time, ClosureResult,
    ExpectedTime,
};
