//! TOML experiment configuration: sections for graph, activation,
//! dynamics, intervention, experiment and output. Unknown keys are
//! rejected. The fully resolved config (defaults filled in) is echoed into
//! every output for provenance; feeding it back reproduces the outputs
//! byte for byte.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use contagion_core::{
    ActivationSpec, AxisValues, Condition, DynamicsConfig, EdgeLabel, EdgeProbability,
    GraphSource, InterventionKind, InterventionSpec, LabelSet, SeedRule, TriadWeighting,
};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub graph: GraphSection,
    pub activation: ActivationSection,
    #[serde(default)]
    pub dynamics: DynamicsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervention: Option<InterventionSection>,
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// Cycle-power graph C_k.
    Cycle,
    /// C_k union an Erdős–Rényi draw.
    CycleUnionEr,
    /// Partially rewired C2 indexed by eta.
    EtaC2,
    /// Clustered small-world proxy: C_k with a fraction of edges rewired.
    Ws,
    /// Edge-list file.
    File,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub kind: GraphKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Scaled density: p = c / n.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Target expected degree: p = (degree - 2k) / n.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Rewiring exponent: eta = n^delta.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Rewired edge fraction for the ws kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewire: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationKind {
    Simple,
    NoisyThreshold,
    Probit,
    Logit,
    FractionalThreshold,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivationSection {
    pub kind: ActivationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_star: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelsSpec {
    Preset(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    /// "all", "cycle1", or a list of label names.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_threshold_labels: Option<LabelsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterventionSection {
    /// Conditions to run; "none" is the unmodified graph.
    pub kinds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triad_weighting: Option<TriadWeighting>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    #[default]
    Normal,
    Bootstrap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub replicates: u32,
    #[serde(default)]
    pub root_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_rule: Option<SeedRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fresh_graph: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci: Option<CiMethod>,
    // Sweep axes; each list becomes a factor of the cartesian product.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_axes: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_output_dir")]
    pub dir: String,
    #[serde(default = "default_experiment_id")]
    pub experiment_id: String,
    #[serde(default)]
    pub trajectories: bool,
}

fn default_output_dir() -> String {
    "results".into()
}

fn default_experiment_id() -> String {
    "experiment".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_output_dir(),
            experiment_id: default_experiment_id(),
            trajectories: false,
        }
    }
}

/// Everything a run needs, after validation and axis expansion.
pub struct ResolvedExperiment {
    pub config: ConfigFile,
    pub conditions: Vec<Condition>,
    pub replicates: u32,
    pub root_seed: u64,
    pub ci: CiMethod,
    pub slope_axes: Vec<String>,
    pub output: OutputSection,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ConfigFile {
    /// Fill defaults so the echoed config stands alone.
    pub fn resolved(mut self) -> ConfigFile {
        let d = &mut self.dynamics;
        if d.sub_threshold_labels.is_none() {
            d.sub_threshold_labels = Some(LabelsSpec::Preset("all".into()));
        }
        d.gamma.get_or_insert(0.0);
        d.stop_fraction.get_or_insert(1.0);
        let e = &mut self.experiment;
        e.seed_rule.get_or_insert(SeedRule::AnyEdge);
        e.fresh_graph.get_or_insert(true);
        e.ci.get_or_insert(CiMethod::Normal);
        self
    }

    pub fn canonical_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

fn resolve_labels(spec: &LabelsSpec) -> Result<LabelSet, CliError> {
    match spec {
        LabelsSpec::Preset(s) => match s.as_str() {
            "all" => Ok(LabelSet::ALL),
            "cycle1" => Ok(LabelSet::CYCLE1),
            other => Err(config_err(format!(
                "unknown label preset {other:?}; use \"all\", \"cycle1\" or a list of labels"
            ))),
        },
        LabelsSpec::List(names) => {
            let mut set = LabelSet::EMPTY;
            for name in names {
                let label = EdgeLabel::parse(name)
                    .ok_or_else(|| config_err(format!("unknown edge label {name:?}")))?;
                set = set.with(label);
            }
            Ok(set)
        }
    }
}

fn parse_intervention_kind(name: &str) -> Result<Option<InterventionKind>, CliError> {
    match name {
        "none" | "original" => Ok(None),
        "rewire" => Ok(Some(InterventionKind::Rewire)),
        "add-random" => Ok(Some(InterventionKind::AddRandom)),
        "add-triad-closing" => Ok(Some(InterventionKind::AddTriadClosing)),
        other => Err(config_err(format!(
            "unknown intervention kind {other:?}; expected none, rewire, add-random or add-triad-closing"
        ))),
    }
}

fn build_activation(
    section: &ActivationSection,
    q_override: Option<f64>,
) -> Result<ActivationSpec, CliError> {
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| config_err(format!("activation.{name} is required for this kind")))
    };
    let q_of = |default: Option<f64>| q_override.or(default);
    let spec = match section.kind {
        ActivationKind::Simple => ActivationSpec::Simple {
            beta: need("beta", section.beta)?,
        },
        ActivationKind::NoisyThreshold => {
            let theta = need("theta", section.theta)?;
            if theta.fract() != 0.0 || theta < 1.0 {
                return Err(config_err(format!(
                    "activation.theta must be an integer >= 1, got {theta}"
                )));
            }
            ActivationSpec::NoisyThreshold {
                theta: theta as u32,
                q: need("q", q_of(section.q))?,
                rho: section.rho.unwrap_or(1.0),
            }
        }
        ActivationKind::Probit => ActivationSpec::Probit {
            theta: need("theta", section.theta)?,
            sigma: need("sigma", section.sigma)?,
        },
        ActivationKind::Logit => ActivationSpec::Logit {
            theta: need("theta", section.theta)?,
            sigma: need("sigma", section.sigma)?,
        },
        ActivationKind::FractionalThreshold => ActivationSpec::FractionalThreshold {
            theta_star: need("theta_star", section.theta_star)?,
            q: need("q", q_of(section.q))?,
            rho: section.rho.unwrap_or(1.0),
        },
    };
    if q_override.is_some()
        && !matches!(
            section.kind,
            ActivationKind::NoisyThreshold | ActivationKind::FractionalThreshold
        )
    {
        return Err(config_err(
            "a q axis only applies to threshold activation kinds",
        ));
    }
    spec.validate()
        .map_err(|e| config_err(format!("invalid activation: {e}")))?;
    Ok(spec)
}

/// One point of the cartesian product.
#[derive(Clone, Copy, Default)]
struct AxisPoint {
    n: Option<usize>,
    k: Option<usize>,
    degree: Option<f64>,
    q: Option<f64>,
    eta: Option<f64>,
    delta: Option<f64>,
    fraction: Option<f64>,
}

pub fn resolve(config: ConfigFile, sweep: bool) -> Result<ResolvedExperiment, CliError> {
    let config = config.resolved();
    let exp = &config.experiment;
    if exp.replicates == 0 {
        return Err(config_err("experiment.replicates must be >= 1"));
    }

    let axes_present = [
        exp.n.is_some(),
        exp.k.is_some(),
        exp.degree.is_some(),
        exp.q.is_some(),
        exp.eta.is_some(),
        exp.delta.is_some(),
        exp.fraction.is_some(),
    ]
    .iter()
    .any(|&b| b);
    if sweep && !axes_present {
        return Err(config_err("sweep needs at least one non-empty axis list"));
    }
    if !sweep && axes_present {
        return Err(config_err(
            "axis lists are only valid for the sweep command; use `contagion sweep`",
        ));
    }
    for (name, empty) in [
        ("n", exp.n.as_ref().is_some_and(Vec::is_empty)),
        ("k", exp.k.as_ref().is_some_and(Vec::is_empty)),
        ("degree", exp.degree.as_ref().is_some_and(Vec::is_empty)),
        ("q", exp.q.as_ref().is_some_and(Vec::is_empty)),
        ("eta", exp.eta.as_ref().is_some_and(Vec::is_empty)),
        ("delta", exp.delta.as_ref().is_some_and(Vec::is_empty)),
        ("fraction", exp.fraction.as_ref().is_some_and(Vec::is_empty)),
    ] {
        if empty {
            return Err(config_err(format!("experiment.{name} axis is empty")));
        }
    }
    if exp.eta.is_some() && exp.delta.is_some() {
        return Err(config_err("give an eta axis or a delta axis, not both"));
    }

    // Cartesian product, intervention kinds innermost.
    let opt_axis = |v: &Option<Vec<f64>>| -> Vec<Option<f64>> {
        match v {
            Some(list) => list.iter().copied().map(Some).collect(),
            None => vec![None],
        }
    };
    let n_axis: Vec<Option<usize>> = match &exp.n {
        Some(list) => list.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let k_axis: Vec<Option<usize>> = match &exp.k {
        Some(list) => list.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut points = Vec::new();
    for &n in &n_axis {
        for &k in &k_axis {
            for &degree in &opt_axis(&exp.degree) {
                for &q in &opt_axis(&exp.q) {
                    for &eta in &opt_axis(&exp.eta) {
                        for &delta in &opt_axis(&exp.delta) {
                            for &fraction in &opt_axis(&exp.fraction) {
                                points.push(AxisPoint {
                                    n,
                                    k,
                                    degree,
                                    q,
                                    eta,
                                    delta,
                                    fraction,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    let interventions: Vec<(String, Option<InterventionKind>)> = match &config.intervention {
        Some(section) => {
            if section.kinds.is_empty() {
                return Err(config_err("intervention.kinds is empty"));
            }
            section
                .kinds
                .iter()
                .map(|name| Ok((name.clone(), parse_intervention_kind(name)?)))
                .collect::<Result<_, CliError>>()?
        }
        None => vec![("none".to_string(), None)],
    };

    // Empirical files are loaded once and shared across conditions.
    let file_graph: Option<Arc<contagion_core::Graph>> = match config.graph.kind {
        GraphKind::File => {
            let path = config
                .graph
                .path
                .as_ref()
                .ok_or_else(|| config_err("graph.path is required for kind = \"file\""))?;
            let loaded = contagion_core::load_edge_list(Path::new(path))
                .map_err(CliError::from_core)?;
            if loaded.self_loops_dropped > 0 || loaded.duplicates_collapsed > 0 {
                eprintln!(
                    "{}: dropped {} self-loop(s), collapsed {} duplicate line(s)",
                    path, loaded.self_loops_dropped, loaded.duplicates_collapsed
                );
            }
            Some(Arc::new(loaded.graph))
        }
        _ => None,
    };

    let base_dynamics = {
        let d = &config.dynamics;
        DynamicsConfig {
            sub_threshold_labels: resolve_labels(d.sub_threshold_labels.as_ref().unwrap())?,
            gamma: d.gamma.unwrap(),
            stop_fraction: d.stop_fraction.unwrap(),
            max_rounds: d.max_rounds,
            record_trajectory: config.output.trajectories,
        }
    };
    base_dynamics
        .validate()
        .map_err(|e| config_err(format!("invalid dynamics: {e}")))?;

    let mut conditions = Vec::new();
    for point in &points {
        for (int_name, int_kind) in &interventions {
            conditions.push(build_condition(
                &config,
                point,
                int_name,
                *int_kind,
                file_graph.clone(),
                &base_dynamics,
            )?);
        }
    }

    let slope_axes = match &exp.slope_axes {
        Some(axes) => axes.clone(),
        None if sweep && exp.n.is_some() => vec!["n".to_string()],
        _ => Vec::new(),
    };
    for axis in &slope_axes {
        if !["n", "k", "degree", "q", "eta", "delta", "fraction"].contains(&axis.as_str()) {
            return Err(config_err(format!("unknown slope axis {axis:?}")));
        }
    }

    Ok(ResolvedExperiment {
        replicates: exp.replicates,
        root_seed: exp.root_seed,
        ci: exp.ci.unwrap(),
        slope_axes,
        output: config.output.clone(),
        conditions,
        config,
    })
}

fn build_condition(
    config: &ConfigFile,
    point: &AxisPoint,
    int_name: &str,
    int_kind: Option<InterventionKind>,
    file_graph: Option<Arc<contagion_core::Graph>>,
    base_dynamics: &DynamicsConfig,
) -> Result<Condition, CliError> {
    let g = &config.graph;
    let n = point.n.or(g.n);
    let k = point.k.or(g.k);
    let degree = point.degree.or(g.degree);
    let eta_scalar = point.eta.or(g.eta);
    let delta = point.delta.or(g.delta);
    let fraction = point
        .fraction
        .or(config.intervention.as_ref().and_then(|i| i.fraction));

    let need_n = || n.ok_or_else(|| config_err("graph.n is required"));
    let source = match g.kind {
        GraphKind::Cycle => GraphSource::CyclePower {
            n: need_n()?,
            k: k.unwrap_or(1),
        },
        GraphKind::CycleUnionEr => {
            let n = need_n()?;
            let k = k.unwrap_or(1);
            let p = match (g.p, g.c, degree) {
                (Some(p), None, None) => EdgeProbability::P(p),
                (None, Some(c), None) => EdgeProbability::Scaled(c),
                (None, None, Some(d)) => EdgeProbability::TargetDegree(d),
                _ => {
                    return Err(config_err(
                        "cycle-union-er needs exactly one of graph.p, graph.c, graph.degree",
                    ))
                }
            };
            GraphSource::CycleUnionEr { n, k, p }
        }
        GraphKind::EtaC2 => {
            let n = need_n()?;
            let eta = match (eta_scalar, delta) {
                (Some(eta), None) => eta,
                (None, Some(d)) => (n as f64).powf(d),
                (None, None) => return Err(config_err("eta-c2 needs graph.eta or graph.delta")),
                (Some(_), Some(_)) => {
                    return Err(config_err("give graph.eta or graph.delta, not both"))
                }
            };
            GraphSource::EtaRewiredC2 { n, eta }
        }
        GraphKind::Ws => GraphSource::WattsStrogatz {
            n: need_n()?,
            k: k.unwrap_or(5),
            rewire_fraction: g
                .rewire
                .ok_or_else(|| config_err("graph.rewire is required for kind = \"ws\""))?,
        },
        GraphKind::File => GraphSource::Shared(file_graph.expect("file graph preloaded")),
    };

    let activation = build_activation(&config.activation, point.q)?;
    let intervention = match int_kind {
        Some(kind) => {
            let fraction = fraction.ok_or_else(|| {
                config_err("intervention.fraction (or a fraction axis) is required")
            })?;
            let mut spec = InterventionSpec::new(kind, fraction);
            if let Some(w) = config.intervention.as_ref().and_then(|i| i.triad_weighting) {
                spec.triad_weighting = w;
            }
            Some(spec)
        }
        None => None,
    };

    let eta_value = match (&source, eta_scalar, delta) {
        (GraphSource::EtaRewiredC2 { eta, .. }, _, _) => Some(*eta),
        _ => None,
    };
    let mut id_parts: Vec<String> = Vec::new();
    if let Some(n) = n {
        id_parts.push(format!("n={n}"));
    }
    if let Some(k) = k {
        id_parts.push(format!("k={k}"));
    }
    if let Some(d) = degree {
        id_parts.push(format!("degree={d}"));
    }
    if let Some(q) = point.q {
        id_parts.push(format!("q={q}"));
    }
    if let Some(eta) = eta_value {
        id_parts.push(format!("eta={eta:.4}"));
    }
    id_parts.push(format!("int={int_name}"));
    if int_kind.is_some() {
        if let Some(f) = fraction {
            id_parts.push(format!("f={f}"));
        }
    }

    Ok(Condition {
        id: id_parts.join(";"),
        axes: AxisValues {
            n: n.map(|v| v as u64),
            k: k.map(|v| v as u64),
            q: point.q,
            eta: eta_value,
            degree,
            fraction: int_kind.and(fraction),
        },
        source,
        intervention,
        activation,
        dynamics: *base_dynamics,
        seed_rule: config.experiment.seed_rule.unwrap(),
        fresh_graph: config.experiment.fresh_graph.unwrap(),
    })
}
