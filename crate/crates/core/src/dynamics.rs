//! Discrete-time contagion process.
//!
//! Rounds are synchronous: every susceptible node evaluates its adoption
//! probability against the round-start state, then all adoptions and
//! deactivations are applied at once. Threshold and simple activation
//! functions only ever give positive probability to nodes with at least one
//! infectious neighbor, so the round update tracks a frontier watch list
//! instead of scanning the whole graph; probit/logit allow spontaneous
//! adoption and fall back to a full scan.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::activation::{activation_probability, ActivationSpec};
use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, Graph, LabelSet, NodeId};

/// Run-level rules for the round update and the stopping condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    /// Edge labels through which sub-threshold (`q`) adoptions can travel.
    pub sub_threshold_labels: LabelSet,
    /// Per-round probability that an infectious node turns inactive. An
    /// inactive node still counts as infected but no longer toward any
    /// neighbor's infectious count.
    pub gamma: f64,
    /// Stop once this fraction of all nodes is infected.
    pub stop_fraction: f64,
    /// Round cap; `None` means `20 * n`.
    pub max_rounds: Option<u32>,
    pub record_trajectory: bool,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            sub_threshold_labels: LabelSet::ALL,
            gamma: 0.0,
            stop_fraction: 1.0,
            max_rounds: None,
            record_trajectory: false,
        }
    }
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameters(format!(
                "gamma must be in [0, 1], got {}",
                self.gamma
            )));
        }
        if !(self.stop_fraction > 0.0 && self.stop_fraction <= 1.0) {
            return Err(Error::InvalidParameters(format!(
                "stop_fraction must be in (0, 1], got {}",
                self.stop_fraction
            )));
        }
        Ok(())
    }

    pub fn effective_max_rounds(&self, n: usize) -> u32 {
        self.max_rounds
            .unwrap_or_else(|| (20 * n).min(u32::MAX as usize) as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeStatus {
    Susceptible,
    InfectedActive,
    InfectedInactive,
}

/// How the two initial seeds are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedRule {
    /// Endpoints of a uniformly random edge.
    AnyEdge,
    /// Endpoints of a uniformly random `Cycle1` edge.
    Cycle1Edge,
}

/// Endpoints of a uniformly random edge (or a uniformly random cycle
/// edge): two adjacent random seeds.
pub fn seed_adjacent_pair<R: Rng + ?Sized>(
    graph: &Graph,
    rule: SeedRule,
    rng: &mut R,
) -> Result<(NodeId, NodeId)> {
    let edge = match rule {
        SeedRule::AnyEdge => {
            if graph.edge_count() == 0 {
                return Err(Error::NoEligibleEdge);
            }
            graph.edges()[rng.gen_range(0..graph.edge_count())]
        }
        SeedRule::Cycle1Edge => {
            let count = graph.count_label(EdgeLabel::Cycle1);
            if count == 0 {
                return Err(Error::NoEligibleEdge);
            }
            let pick = rng.gen_range(0..count);
            *graph
                .edges()
                .iter()
                .filter(|e| e.label == EdgeLabel::Cycle1)
                .nth(pick)
                .expect("pick < count")
        }
    };
    Ok((edge.u, edge.v))
}

#[derive(Debug, Clone)]
enum Engine {
    /// NoisyThreshold / FractionalThreshold: certainty `rho` at or above the
    /// per-node count threshold, `q` with an infectious neighbor through an
    /// allowed label.
    Threshold {
        thr: ThresholdCounts,
        q: f64,
        rho: f64,
    },
    /// Independent per-exposure adoption.
    Simple,
    /// Probit/logit: positive probability everywhere, full scan.
    Spontaneous,
}

#[derive(Debug, Clone)]
enum ThresholdCounts {
    Uniform(u32),
    PerNode(Box<[u32]>),
}

impl ThresholdCounts {
    fn get(&self, u: NodeId) -> u32 {
        match self {
            ThresholdCounts::Uniform(t) => *t,
            ThresholdCounts::PerNode(t) => t[u as usize],
        }
    }
}

/// Mutable state of one contagion run. Bound to the `(graph, spec, config)`
/// it was created with; stepping it with anything else is undefined
/// behavior in the garbage-in sense.
#[derive(Debug, Clone)]
pub struct ContagionState {
    round: u32,
    status: Vec<NodeStatus>,
    infected: usize,
    /// InfectedActive nodes; compacted lazily.
    active: Vec<NodeId>,
    /// Per-node count of InfectedActive neighbors over all labels.
    x_all: Vec<u32>,
    /// Same, restricted to `sub_threshold_labels`.
    x_sub: Vec<u32>,
    /// Susceptible nodes that may have positive adoption probability now or
    /// later without further topology change.
    watch: Vec<NodeId>,
    watched: Vec<bool>,
    engine: Engine,
    /// Did the last step see any node with positive adoption probability?
    last_any_positive: bool,
}

impl ContagionState {
    pub fn new(
        graph: &Graph,
        seeds: &[NodeId],
        spec: &ActivationSpec,
        config: &DynamicsConfig,
    ) -> Result<ContagionState> {
        spec.validate()?;
        config.validate()?;
        if seeds.is_empty() {
            return Err(Error::EmptySeedSet);
        }
        let n = graph.node_count();
        for &s in seeds {
            if s as usize >= n {
                return Err(Error::NodeOutOfRange { node: s, n });
            }
        }
        let mut distinct = seeds.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != seeds.len() {
            return Err(Error::InvalidParameters("seed nodes must be distinct".into()));
        }

        let engine = match *spec {
            ActivationSpec::NoisyThreshold { theta, q, rho } => Engine::Threshold {
                thr: ThresholdCounts::Uniform(theta),
                q,
                rho,
            },
            ActivationSpec::FractionalThreshold { theta_star, q, rho } => {
                let thr: Box<[u32]> = (0..n as NodeId)
                    .map(|u| {
                        let d = graph.degree(u) as f64;
                        ((theta_star * d - 1e-9).ceil().max(1.0)) as u32
                    })
                    .collect();
                Engine::Threshold {
                    thr: ThresholdCounts::PerNode(thr),
                    q,
                    rho,
                }
            }
            ActivationSpec::Simple { .. } => Engine::Simple,
            ActivationSpec::Probit { .. } | ActivationSpec::Logit { .. } => Engine::Spontaneous,
        };

        let mut state = ContagionState {
            round: 0,
            status: vec![NodeStatus::Susceptible; n],
            infected: 0,
            active: Vec::new(),
            x_all: vec![0; n],
            x_sub: vec![0; n],
            watch: Vec::new(),
            watched: vec![false; n],
            engine,
            last_any_positive: true,
        };
        for &s in seeds {
            state.status[s as usize] = NodeStatus::InfectedActive;
            state.active.push(s);
        }
        state.infected = seeds.len();
        for &s in seeds {
            for &(v, label) in graph.neighbors(s) {
                state.x_all[v as usize] += 1;
                if config.sub_threshold_labels.contains(label) {
                    state.x_sub[v as usize] += 1;
                }
            }
        }
        // Only neighbors of seeds can be eligible initially.
        for &s in seeds {
            for &(v, _) in graph.neighbors(s) {
                state.try_watch(v);
            }
        }
        Ok(state)
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn status(&self, u: NodeId) -> NodeStatus {
        self.status[u as usize]
    }

    pub fn is_infected(&self, u: NodeId) -> bool {
        self.status[u as usize] != NodeStatus::Susceptible
    }

    /// Infected = active + inactive.
    pub fn infected_count(&self) -> usize {
        self.infected
    }

    pub fn active_count(&self) -> usize {
        self.status
            .iter()
            .filter(|&&s| s == NodeStatus::InfectedActive)
            .count()
    }

    pub fn infected_fraction(&self, n: usize) -> f64 {
        self.infected as f64 / n as f64
    }

    pub fn infected_nodes(&self) -> Vec<NodeId> {
        (0..self.status.len() as NodeId)
            .filter(|&u| self.is_infected(u))
            .collect()
    }

    fn watch_eligible(&self, u: NodeId) -> bool {
        let i = u as usize;
        match &self.engine {
            Engine::Threshold { thr, q, .. } => {
                self.x_all[i] >= thr.get(u) || (*q > 0.0 && self.x_sub[i] >= 1)
            }
            Engine::Simple => self.x_all[i] >= 1,
            Engine::Spontaneous => false,
        }
    }

    fn try_watch(&mut self, u: NodeId) {
        let i = u as usize;
        if self.status[i] == NodeStatus::Susceptible && !self.watched[i] && self.watch_eligible(u) {
            self.watched[i] = true;
            self.watch.push(u);
        }
    }

    /// No susceptible node can ever adopt again (possible only for frontier
    /// engines; probit/logit always keep positive probability).
    pub fn stalled(&self) -> bool {
        !self.last_any_positive
    }
}

/// One synchronous round: adoption decisions from the round-start state,
/// then deactivations of round-start infectious nodes, then both applied.
pub fn step<R: Rng + ?Sized>(
    graph: &Graph,
    state: &mut ContagionState,
    spec: &ActivationSpec,
    config: &DynamicsConfig,
    rng: &mut R,
) {
    let mut adopters: Vec<NodeId> = Vec::new();
    let mut any_positive = false;

    match &state.engine {
        Engine::Spontaneous => {
            for u in 0..graph.node_count() as NodeId {
                if state.status[u as usize] != NodeStatus::Susceptible {
                    continue;
                }
                let p = activation_probability(spec, state.x_all[u as usize], graph.degree(u) as u32)
                    .expect("x_all bounded by degree");
                if p > 0.0 {
                    any_positive = true;
                    if rng.gen_bool(p) {
                        adopters.push(u);
                    }
                }
            }
        }
        Engine::Threshold { thr, q, rho } => {
            let mut watch = std::mem::take(&mut state.watch);
            watch.retain(|&u| state.status[u as usize] == NodeStatus::Susceptible);
            for &u in &watch {
                let i = u as usize;
                let p = if state.x_all[i] >= thr.get(u) {
                    *rho
                } else if *q > 0.0 && state.x_sub[i] >= 1 {
                    *q
                } else {
                    continue;
                };
                if p > 0.0 {
                    any_positive = true;
                    if rng.gen_bool(p) {
                        adopters.push(u);
                    }
                }
            }
            state.watch = watch;
        }
        Engine::Simple => {
            let beta = match spec {
                ActivationSpec::Simple { beta } => *beta,
                _ => unreachable!("engine built from spec"),
            };
            let mut watch = std::mem::take(&mut state.watch);
            watch.retain(|&u| state.status[u as usize] == NodeStatus::Susceptible);
            for &u in &watch {
                let x = state.x_all[u as usize];
                if x == 0 {
                    continue;
                }
                let p = 1.0 - (1.0 - beta).powi(x as i32);
                if p > 0.0 {
                    any_positive = true;
                    if rng.gen_bool(p) {
                        adopters.push(u);
                    }
                }
            }
            state.watch = watch;
        }
    }

    // Deactivation draws for round-start infectious nodes. Nodes adopting
    // this round stay active until at least the next one.
    let mut deactivated: Vec<NodeId> = Vec::new();
    if config.gamma > 0.0 {
        let mut active = std::mem::take(&mut state.active);
        active.retain(|&u| state.status[u as usize] == NodeStatus::InfectedActive);
        for &u in &active {
            if rng.gen_bool(config.gamma) {
                deactivated.push(u);
            }
        }
        state.active = active;
    }

    for &u in &deactivated {
        state.status[u as usize] = NodeStatus::InfectedInactive;
        for &(v, label) in graph.neighbors(u) {
            state.x_all[v as usize] -= 1;
            if config.sub_threshold_labels.contains(label) {
                state.x_sub[v as usize] -= 1;
            }
        }
    }

    for &u in &adopters {
        state.status[u as usize] = NodeStatus::InfectedActive;
        state.infected += 1;
        state.active.push(u);
    }
    // Count updates after all statuses so that try_watch sees final
    // susceptibility, then eligibility checks per increment.
    for &u in &adopters {
        for &(v, label) in graph.neighbors(u) {
            state.x_all[v as usize] += 1;
            if config.sub_threshold_labels.contains(label) {
                state.x_sub[v as usize] += 1;
            }
            state.try_watch(v);
        }
    }

    state.round += 1;
    state.last_any_positive = any_positive;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrajectoryPoint {
    pub round: u32,
    pub infected: u32,
    pub active: u32,
}

/// Per-replicate result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    /// Rounds until the infected fraction first reached `stop_fraction`;
    /// `None` when the run was censored.
    pub spread_time: Option<u32>,
    pub censored: bool,
    pub final_fraction: f64,
    /// Rounds actually executed (a censored run may stop early once no
    /// further adoption is possible).
    pub rounds_run: u32,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

/// Smallest infected count whose fraction of `n` reaches `stop_fraction`.
pub(crate) fn stop_target(n: usize, stop_fraction: f64) -> usize {
    let raw = (stop_fraction * n as f64 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(n)
}

pub fn run<R: Rng + ?Sized>(
    graph: &Graph,
    spec: &ActivationSpec,
    config: &DynamicsConfig,
    seeds: &[NodeId],
    rng: &mut R,
) -> Result<RunOutcome> {
    run_with_state(graph, spec, config, seeds, rng).map(|(outcome, _)| outcome)
}

/// Like [`run`], also returning the final state (tests compare the final
/// infected set against the exact closure).
pub fn run_with_state<R: Rng + ?Sized>(
    graph: &Graph,
    spec: &ActivationSpec,
    config: &DynamicsConfig,
    seeds: &[NodeId],
    rng: &mut R,
) -> Result<(RunOutcome, ContagionState)> {
    let mut state = ContagionState::new(graph, seeds, spec, config)?;
    let n = graph.node_count();
    let target = stop_target(n, config.stop_fraction);
    let max_rounds = config.effective_max_rounds(n);

    let mut trajectory = config.record_trajectory.then(|| {
        vec![TrajectoryPoint {
            round: 0,
            infected: state.infected_count() as u32,
            active: state.active_count() as u32,
        }]
    });

    let mut spread_time = (state.infected_count() >= target).then_some(0);
    while spread_time.is_none() && state.round() < max_rounds {
        step(graph, &mut state, spec, config, rng);
        if let Some(t) = trajectory.as_mut() {
            t.push(TrajectoryPoint {
                round: state.round(),
                infected: state.infected_count() as u32,
                active: state.active_count() as u32,
            });
        }
        if state.infected_count() >= target {
            spread_time = Some(state.round());
        } else if state.stalled() {
            break;
        }
    }

    let outcome = RunOutcome {
        spread_time,
        censored: spread_time.is_none(),
        final_fraction: state.infected_fraction(n),
        rounds_run: state.round(),
        trajectory,
    };
    Ok((outcome, state))
}
