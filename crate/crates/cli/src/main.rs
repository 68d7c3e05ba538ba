//! Command-line front end: graph generation, experiment execution,
//! parameter sweeps, exact-oracle manifests and graph statistics.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use contagion_core::harness::seeding::{derive_rng, Stream};
use contagion_core::{
    cycle_power, erdos_renyi, eta_rewired_c2, graph_stats, load_edge_list, run_condition,
    summarize, write_edge_list, DynamicsConfig, Graph, LabelSet, NodeId,
};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    OracleSize(String),
}

impl CliError {
    pub fn from_core(e: contagion_core::Error) -> CliError {
        use contagion_core::Error as E;
        fn classify(e: &E) -> u8 {
            match e {
                E::OracleTooLarge { .. } => 3,
                E::Io { .. } | E::MalformedLine { .. } => 2,
                E::Condition { source, .. } => classify(source),
                _ => 1,
            }
        }
        match classify(&e) {
            3 => CliError::OracleSize(e.to_string()),
            2 => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::OracleSize(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::OracleSize(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "contagion",
    about = "Threshold-based contagion simulations on synthetic and empirical graphs",
    version
)]
struct Cli {
    /// Worker threads for replicate parallelism (default: CONTAGION_WORKERS
    /// env var, then all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list (with labels).
    Generate {
        /// One of: c1, c2, ck, er, eta-c2, ws.
        kind: String,
        #[arg(long)]
        n: usize,
        /// Cycle power (ck, ws).
        #[arg(long)]
        k: Option<usize>,
        /// Edge probability (er).
        #[arg(long)]
        p: Option<f64>,
        /// Scaled density, p = c/n (er).
        #[arg(long)]
        c: Option<f64>,
        /// Rewiring index (eta-c2).
        #[arg(long)]
        eta: Option<f64>,
        /// Rewiring exponent, eta = n^delta (eta-c2).
        #[arg(long)]
        delta: Option<f64>,
        /// Rewired edge fraction (ws).
        #[arg(long)]
        rewire: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run the experiment described by a TOML config (no sweep axes).
    Run {
        config: PathBuf,
    },
    /// Run a multi-axis sweep described by a TOML config.
    Sweep {
        config: PathBuf,
    },
    /// Exact small-instance analysis: threshold closure and expected time.
    Oracle {
        /// Edge-list file to analyze.
        #[arg(long, conflicts_with = "gen")]
        graph: Option<PathBuf>,
        /// Generator kind instead of a file: c1, c2, ck, er, eta-c2, ws.
        #[arg(long)]
        gen: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        rewire: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated seed nodes; default: endpoints of the first edge.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        theta: u32,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Labels carrying sub-threshold adoptions: all or cycle1.
        #[arg(long, default_value = "all")]
        labels: String,
        /// Write the manifest here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print summary statistics of an edge-list file.
    Stats {
        file: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    setup_workers(cli.workers);
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn setup_workers(flag: Option<usize>) {
    let from_env = std::env::var("CONTAGION_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(workers) = flag.or(from_env) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build_global();
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate {
            kind,
            n,
            k,
            p,
            c,
            eta,
            delta,
            rewire,
            seed,
            out,
        } => cmd_generate(&kind, n, k, p, c, eta, delta, rewire, seed, &out),
        Command::Run { config } => cmd_experiment(&config, false),
        Command::Sweep { config } => cmd_experiment(&config, true),
        Command::Oracle {
            graph,
            gen,
            n,
            k,
            p,
            eta,
            rewire,
            seed,
            seeds,
            theta,
            q,
            rho,
            labels,
            out,
        } => cmd_oracle(
            graph, gen, n, k, p, eta, rewire, seed, seeds, theta, q, rho, &labels, out,
        ),
        Command::Stats { file } => cmd_stats(&file),
    }
}

#[allow(clippy::too_many_arguments)]
fn build_generated_graph(
    kind: &str,
    n: usize,
    k: Option<usize>,
    p: Option<f64>,
    c: Option<f64>,
    eta: Option<f64>,
    delta: Option<f64>,
    rewire: Option<f64>,
    seed: u64,
) -> Result<Graph, CliError> {
    let mut rng = derive_rng(seed, 0, 0, Stream::GraphDraw);
    let core = CliError::from_core;
    match kind {
        "c1" => cycle_power(n, 1).map_err(core),
        "c2" => cycle_power(n, 2).map_err(core),
        "ck" => {
            let k = k.ok_or(CliError::Config("ck needs --k".into()))?;
            cycle_power(n, k).map_err(core)
        }
        "er" => {
            let p = match (p, c) {
                (Some(p), None) => p,
                (None, Some(c)) => c / n as f64,
                _ => return Err(CliError::Config("er needs exactly one of --p, --c".into())),
            };
            erdos_renyi(n, p, &mut rng).map_err(core)
        }
        "eta-c2" => {
            let eta = match (eta, delta) {
                (Some(eta), None) => eta,
                (None, Some(d)) => (n as f64).powf(d),
                _ => {
                    return Err(CliError::Config(
                        "eta-c2 needs exactly one of --eta, --delta".into(),
                    ))
                }
            };
            eta_rewired_c2(n, eta, &mut rng).map_err(core)
        }
        "ws" => {
            let fraction = rewire.ok_or(CliError::Config("ws needs --rewire".into()))?;
            let base = cycle_power(n, k.unwrap_or(5)).map_err(core)?;
            contagion_core::rewire(&base, fraction, &mut rng).map_err(core)
        }
        other => Err(CliError::Config(format!(
            "unknown graph kind {other:?}; expected c1, c2, ck, er, eta-c2 or ws"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    kind: &str,
    n: usize,
    k: Option<usize>,
    p: Option<f64>,
    c: Option<f64>,
    eta: Option<f64>,
    delta: Option<f64>,
    rewire: Option<f64>,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let graph = build_generated_graph(kind, n, k, p, c, eta, delta, rewire, seed)?;
    write_edge_list(&graph, out).map_err(CliError::from_core)?;
    let stats = graph_stats(&graph);
    println!(
        "{}",
        serde_json::to_string_pretty(&stats).expect("stats serialize")
    );
    eprintln!("wrote {} edges to {}", graph.edge_count(), out.display());
    Ok(())
}

fn cmd_stats(file: &Path) -> Result<(), CliError> {
    let loaded = load_edge_list(file).map_err(CliError::from_core)?;
    if loaded.self_loops_dropped > 0 || loaded.duplicates_collapsed > 0 {
        eprintln!(
            "dropped {} self-loop(s), collapsed {} duplicate line(s)",
            loaded.self_loops_dropped, loaded.duplicates_collapsed
        );
    }
    let stats = graph_stats(&loaded.graph);
    println!(
        "{}",
        serde_json::to_string_pretty(&stats).expect("stats serialize")
    );
    Ok(())
}

fn cmd_experiment(config_path: &Path, sweep: bool) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", config_path.display())))?;
    let parsed = config::parse_config(&text)?;
    let resolved = config::resolve(parsed, sweep)?;

    std::fs::create_dir_all(&resolved.output.dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", resolved.output.dir)))?;
    let hash = output::config_hash(&resolved.config);
    let base = Path::new(&resolved.output.dir);
    let csv_path = base.join(format!("{}_results.csv", resolved.output.experiment_id));
    let summary_path = base.join(format!("{}_summary.json", resolved.output.experiment_id));

    let mut csv = output::CsvWriter::create(
        csv_path.clone(),
        &resolved.output.experiment_id,
        &hash,
        resolved.root_seed,
    )?;
    let mut trajectories = if resolved.output.trajectories {
        let path = base.join(format!(
            "{}_trajectories.csv",
            resolved.output.experiment_id
        ));
        Some(output::TrajectoryWriter::create(
            path,
            &hash,
            resolved.root_seed,
        )?)
    } else {
        None
    };

    let total = resolved.conditions.len();
    let mut results = Vec::with_capacity(total);
    for (idx, cond) in resolved.conditions.iter().enumerate() {
        let t0 = Instant::now();
        let set = run_condition(cond, resolved.root_seed, idx, resolved.replicates)
            .map_err(CliError::from_core)?;
        csv.append_condition(cond, &set)?;
        if let Some(tw) = trajectories.as_mut() {
            tw.append_condition(cond, &set)?;
        }
        let stats = summarize(&set);
        eprintln!(
            "[{}/{total}] {}: mean {} censored {} ({:.1?})",
            idx + 1,
            cond.id,
            stats
                .mean
                .map(|m| format!("{m:.3}"))
                .unwrap_or_else(|| "n/a".into()),
            stats.censored,
            t0.elapsed()
        );
        results.push((idx, set));
    }

    output::write_summary(&resolved, &hash, &results, &summary_path)?;
    println!("results: {}", csv_path.display());
    println!("summary: {}", summary_path.display());
    Ok(())
}

#[derive(Serialize)]
struct OracleManifest {
    n: usize,
    seeds: Vec<NodeId>,
    theta: u32,
    q: f64,
    rho: f64,
    sub_threshold_labels: String,
    closure_set: Vec<NodeId>,
    closure_rounds: u32,
    closure_complete: bool,
    /// Expected rounds to full infection; null when unreachable or when n
    /// exceeds the chain-solver limit.
    expected_time: Option<f64>,
    expected_time_status: String,
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    graph: Option<PathBuf>,
    gen: Option<String>,
    n: Option<usize>,
    k: Option<usize>,
    p: Option<f64>,
    eta: Option<f64>,
    rewire: Option<f64>,
    seed: u64,
    seeds: Option<String>,
    theta: u32,
    q: f64,
    rho: f64,
    labels: &str,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let graph = match (graph, gen) {
        (Some(path), None) => load_edge_list(&path).map_err(CliError::from_core)?.graph,
        (None, Some(kind)) => {
            let n = n.ok_or(CliError::Config("--gen needs --n".into()))?;
            build_generated_graph(&kind, n, k, p, None, eta, None, rewire, seed)?
        }
        _ => {
            return Err(CliError::Config(
                "oracle needs exactly one of --graph FILE or --gen KIND".into(),
            ))
        }
    };

    let seed_nodes: Vec<NodeId> = match seeds {
        Some(list) => list
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<NodeId>()
                    .map_err(|_| CliError::Config(format!("bad seed node {tok:?}")))
            })
            .collect::<Result<_, _>>()?,
        None => {
            let e = graph.edges().first().ok_or(CliError::Config(
                "graph has no edges; pass --seeds explicitly".into(),
            ))?;
            vec![e.u, e.v]
        }
    };

    let label_set = match labels {
        "all" => LabelSet::ALL,
        "cycle1" => LabelSet::CYCLE1,
        other => {
            return Err(CliError::Config(format!(
                "unknown --labels value {other:?}; expected all or cycle1"
            )))
        }
    };

    let closure = contagion_core::deterministic_closure(&graph, &seed_nodes, theta)
        .map_err(CliError::from_core)?;
    let spec = contagion_core::ActivationSpec::NoisyThreshold { theta, q, rho };
    spec.validate().map_err(CliError::from_core)?;
    let config = DynamicsConfig {
        sub_threshold_labels: label_set,
        ..DynamicsConfig::default()
    };
    let (expected_time, status) =
        match contagion_core::exact_expected_time(&graph, &seed_nodes, &spec, &config) {
            Ok(contagion_core::ExpectedTime::Finite(t)) => (Some(t), "finite".to_string()),
            Ok(contagion_core::ExpectedTime::Unreachable) => (None, "unreachable".to_string()),
            Err(contagion_core::Error::OracleTooLarge { n, limit }) => (
                None,
                format!("skipped: n = {n} exceeds the chain-solver limit {limit}"),
            ),
            Err(e) => return Err(CliError::from_core(e)),
        };

    let n_nodes = graph.node_count();
    let full = closure.final_set.count_ones() as usize == n_nodes;
    let manifest = OracleManifest {
        n: n_nodes,
        seeds: seed_nodes,
        theta,
        q,
        rho,
        sub_threshold_labels: labels.to_string(),
        closure_set: contagion_core::oracle::mask_nodes(closure.final_set),
        closure_rounds: closure.rounds,
        closure_complete: full,
        expected_time,
        expected_time_status: status,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialize");
    match out {
        Some(path) => std::fs::write(&path, json + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(())
}
