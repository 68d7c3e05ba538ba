//! Monte Carlo orchestration: conditions, replicate execution and summary
//! statistics.
//!
//! A [`Condition`] fully describes one experimental cell (graph source,
//! optional intervention, activation function, dynamics rules). Replicates
//! run concurrently; every replicate derives its own RNG streams from
//! `(root_seed, condition index, replicate index)`, so results do not
//! depend on scheduling.

pub mod seeding;
pub mod stats;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::activation::ActivationSpec;
use crate::dynamics::{run, seed_adjacent_pair, DynamicsConfig, RunOutcome, SeedRule};
use crate::error::{Error, Result};
use crate::graph::{cycle_power, erdos_renyi, eta_rewired_c2, Graph};
use crate::interventions::{self, InterventionSpec};
use seeding::{derive_rng, derive_seed64, Stream};
use stats::{mean_ci, Ecdf};

/// How the Erdős–Rényi edge probability of a union graph is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EdgeProbability {
    /// Directly.
    P(f64),
    /// `p = c / n`.
    Scaled(f64),
    /// `p = (degree - 2k) / n`, keeping the expected degree fixed.
    TargetDegree(f64),
}

impl EdgeProbability {
    pub fn resolve(self, n: usize, k: usize) -> Result<f64> {
        let p = match self {
            EdgeProbability::P(p) => p,
            EdgeProbability::Scaled(c) => c / n as f64,
            EdgeProbability::TargetDegree(d) => {
                if d < 2.0 * k as f64 {
                    return Err(Error::InvalidParameters(format!(
                        "target degree {d} below cycle degree {}",
                        2 * k
                    )));
                }
                (d - 2.0 * k as f64) / n as f64
            }
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameters(format!(
                "resolved edge probability {p} outside [0, 1]"
            )));
        }
        Ok(p)
    }
}

/// Where a condition's graph comes from.
#[derive(Debug, Clone)]
pub enum GraphSource {
    CyclePower {
        n: usize,
        k: usize,
    },
    /// Union of a cycle-power graph and an Erdős–Rényi draw.
    CycleUnionEr {
        n: usize,
        k: usize,
        p: EdgeProbability,
    },
    EtaRewiredC2 {
        n: usize,
        eta: f64,
    },
    /// Clustered small-world proxy: cycle-power with a fraction of its
    /// edges rewired to random ties.
    WattsStrogatz {
        n: usize,
        k: usize,
        rewire_fraction: f64,
    },
    /// Fixed graph, e.g. loaded from an empirical edge list.
    Shared(Arc<Graph>),
}

impl GraphSource {
    pub fn build<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        match *self {
            GraphSource::CyclePower { n, k } => cycle_power(n, k),
            GraphSource::CycleUnionEr { n, k, p } => {
                cycle_power(n, k)?.union(&erdos_renyi(n, p.resolve(n, k)?, rng)?)
            }
            GraphSource::EtaRewiredC2 { n, eta } => eta_rewired_c2(n, eta, rng),
            GraphSource::WattsStrogatz {
                n,
                k,
                rewire_fraction,
            } => interventions::rewire(&cycle_power(n, k)?, rewire_fraction, rng),
            GraphSource::Shared(ref g) => Ok((**g).clone()),
        }
    }

    /// True when a new draw per replicate makes sense (the source is
    /// random).
    pub fn is_random(&self) -> bool {
        !matches!(
            self,
            GraphSource::CyclePower { .. } | GraphSource::Shared(_)
        )
    }
}

/// Axis values of a condition, echoed into the long-format results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AxisValues {
    pub n: Option<u64>,
    pub k: Option<u64>,
    pub q: Option<f64>,
    pub eta: Option<f64>,
    pub degree: Option<f64>,
    pub fraction: Option<f64>,
}

/// One experimental cell.
#[derive(Debug, Clone)]
pub struct Condition {
    pub id: String,
    pub axes: AxisValues,
    pub source: GraphSource,
    pub intervention: Option<InterventionSpec>,
    pub activation: ActivationSpec,
    pub dynamics: DynamicsConfig,
    pub seed_rule: SeedRule,
    /// Draw a fresh graph per replicate; with `false`, one draw (replicate
    /// stream 0) is shared by the whole condition. Ignored for `Shared`
    /// sources, which are fixed by definition.
    pub fresh_graph: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateOutcome {
    pub replicate: u32,
    /// Fingerprint of this replicate's dynamics seed.
    pub seed: u64,
    pub outcome: RunOutcome,
}

/// All replicate outcomes of one condition, ordered by replicate index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub condition_index: usize,
    pub condition: String,
    pub outcomes: Vec<ReplicateOutcome>,
}

impl SampleSet {
    /// Uncensored spread times, sorted ascending (so aggregation does not
    /// depend on replicate order).
    pub fn uncensored_times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = self
            .outcomes
            .iter()
            .filter_map(|r| r.outcome.spread_time)
            .map(f64::from)
            .collect();
        times.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        times
    }

    pub fn censored_count(&self) -> usize {
        self.outcomes.iter().filter(|r| r.outcome.censored).count()
    }

    pub fn ecdf(&self) -> Ecdf {
        Ecdf::from_samples(&self.uncensored_times(), self.censored_count())
    }
}

/// Per-condition summary: mean and CI over uncensored runs, censored count
/// carried alongside, ECDF breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub mean: Option<f64>,
    pub ci_half_width: Option<f64>,
    pub uncensored: usize,
    pub censored: usize,
    pub ecdf: Ecdf,
}

pub fn summarize(samples: &SampleSet) -> SummaryStats {
    let times = samples.uncensored_times();
    let censored = samples.censored_count();
    let (mean, ci) = match mean_ci(&times) {
        Ok((m, h)) => (Some(m), Some(h)),
        Err(_) => (None, None),
    };
    SummaryStats {
        mean,
        ci_half_width: ci,
        uncensored: times.len(),
        censored,
        ecdf: Ecdf::from_samples(&times, censored),
    }
}

fn run_replicate(
    cond: &Condition,
    root_seed: u64,
    cond_idx: u64,
    replicate: u64,
    shared: Option<&Graph>,
) -> Result<ReplicateOutcome> {
    let built: Option<Graph> = match shared {
        Some(_) => None,
        None => Some(
            cond.source
                .build(&mut derive_rng(root_seed, cond_idx, replicate, Stream::GraphDraw))?,
        ),
    };
    let base: &Graph = shared.unwrap_or_else(|| built.as_ref().expect("built when not shared"));

    let modified: Option<Graph> = match &cond.intervention {
        Some(spec) => {
            let mut rng = derive_rng(root_seed, cond_idx, replicate, Stream::Intervention);
            Some(interventions::apply(base, spec, &mut rng)?.graph)
        }
        None => None,
    };
    let graph: &Graph = modified.as_ref().unwrap_or(base);

    let mut seed_rng = derive_rng(root_seed, cond_idx, replicate, Stream::Seeding);
    let (a, b) = seed_adjacent_pair(graph, cond.seed_rule, &mut seed_rng)?;

    let mut dyn_rng = derive_rng(root_seed, cond_idx, replicate, Stream::Dynamics);
    let outcome = run(graph, &cond.activation, &cond.dynamics, &[a, b], &mut dyn_rng)?;

    Ok(ReplicateOutcome {
        replicate: replicate as u32,
        seed: derive_seed64(root_seed, cond_idx, replicate, Stream::Dynamics),
        outcome,
    })
}

/// Run all replicates of one condition, in parallel, deterministically.
pub fn run_condition(
    cond: &Condition,
    root_seed: u64,
    cond_idx: usize,
    replicates: u32,
) -> Result<SampleSet> {
    let in_cond = |e: Error| e.in_condition(&cond.id);
    if replicates == 0 {
        return Err(in_cond(Error::InvalidParameters(
            "replicates must be >= 1".into(),
        )));
    }
    // Graph fixed for the whole condition: empirical sources always, and
    // generator sources in fixed-graph mode (drawn from replicate stream 0).
    let fixed: Option<Graph> = match &cond.source {
        GraphSource::Shared(_) => None,
        _ if cond.fresh_graph => None,
        src => Some(
            src.build(&mut derive_rng(root_seed, cond_idx as u64, 0, Stream::GraphDraw))
                .map_err(in_cond)?,
        ),
    };
    let shared: Option<&Graph> = match &cond.source {
        GraphSource::Shared(g) => Some(g),
        _ => fixed.as_ref(),
    };

    let outcomes: Result<Vec<ReplicateOutcome>> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            run_replicate(cond, root_seed, cond_idx as u64, rep, shared)
                .map_err(|e| e.in_condition(&cond.id))
        })
        .collect();

    Ok(SampleSet {
        condition_index: cond_idx,
        condition: cond.id.clone(),
        outcomes: outcomes?,
    })
}

/// Run every condition with the same replicate count.
pub fn monte_carlo(
    conditions: &[Condition],
    root_seed: u64,
    replicates: u32,
) -> Result<Vec<SampleSet>> {
    conditions
        .iter()
        .enumerate()
        .map(|(idx, cond)| run_condition(cond, root_seed, idx, replicates))
        .collect()
}
