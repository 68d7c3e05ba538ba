//! Result files: long-format per-replicate CSV and per-condition summary
//! JSON. Every file embeds the resolved config hash and root seed, and the
//! writing order is fixed, so identical configs reproduce identical bytes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use contagion_core::harness::stats::{bootstrap_ci_half_width, loglog_slope};
use contagion_core::harness::seeding::{derive_rng, Stream};
use contagion_core::{summarize, AxisValues, Condition, SampleSet};

use crate::config::{CiMethod, ConfigFile, ResolvedExperiment};
use crate::CliError;

pub fn config_hash(config: &ConfigFile) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config.canonical_toml().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Streams replicate rows to the CSV as conditions finish, so an
/// interrupted run leaves only whole valid rows behind.
pub struct CsvWriter {
    writer: BufWriter<File>,
    path: PathBuf,
    experiment_id: String,
}

impl CsvWriter {
    pub fn create(
        path: PathBuf,
        experiment_id: &str,
        hash: &str,
        root_seed: u64,
    ) -> Result<CsvWriter, CliError> {
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut writer = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            writeln!(writer, "# config_hash: {hash}")?;
            writeln!(writer, "# root_seed: {root_seed}")?;
            writeln!(
                writer,
                "experiment_id,condition,n,k,q,eta,degree,fraction,replicate,spread_time,censored,final_fraction,seed"
            )
        })()
        .map_err(io_err(&path))?;
        Ok(CsvWriter {
            writer,
            path,
            experiment_id: experiment_id.to_string(),
        })
    }

    pub fn append_condition(
        &mut self,
        cond: &Condition,
        set: &SampleSet,
    ) -> Result<(), CliError> {
        let a = &cond.axes;
        for rep in &set.outcomes {
            let o = &rep.outcome;
            writeln!(
                self.writer,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                self.experiment_id,
                cond.id,
                fmt_opt(a.n),
                fmt_opt(a.k),
                fmt_opt(a.q),
                fmt_opt(a.eta),
                fmt_opt(a.degree),
                fmt_opt(a.fraction),
                rep.replicate,
                fmt_opt(o.spread_time),
                o.censored,
                o.final_fraction,
                rep.seed,
            )
            .map_err(io_err(&self.path))?;
        }
        self.writer.flush().map_err(io_err(&self.path))
    }
}

#[derive(Serialize)]
struct EcdfOut {
    points: Vec<(f64, f64)>,
    deficit: f64,
}

#[derive(Serialize)]
struct ConditionSummary {
    index: usize,
    condition: String,
    axes: AxisValues,
    replicates: usize,
    mean: Option<f64>,
    ci_half_width: Option<f64>,
    censored_count: usize,
    uncensored_count: usize,
    ecdf: EcdfOut,
}

#[derive(Serialize)]
struct SlopeEntry {
    axis: String,
    group: String,
    slope: f64,
    points: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment_id: &'a str,
    config_hash: &'a str,
    root_seed: u64,
    replicates: u32,
    conditions: Vec<ConditionSummary>,
    slopes: Vec<SlopeEntry>,
    resolved_config: &'a ConfigFile,
    resolved_config_toml: &'a str,
}

fn axis_value(axes: &AxisValues, axis: &str) -> Option<f64> {
    match axis {
        "n" => axes.n.map(|v| v as f64),
        "k" => axes.k.map(|v| v as f64),
        "q" => axes.q,
        "eta" => axes.eta,
        "degree" => axes.degree,
        "fraction" => axes.fraction,
        _ => None,
    }
}

/// Group label: every axis except the regressed one, plus the intervention
/// part of the condition id.
fn slope_group(cond: &Condition, axis: &str) -> String {
    let a = &cond.axes;
    let mut parts = Vec::new();
    for (name, value) in [
        ("n", a.n.map(|v| v as f64)),
        ("k", a.k.map(|v| v as f64)),
        ("q", a.q),
        ("eta", a.eta),
        ("degree", a.degree),
        ("fraction", a.fraction),
    ] {
        if name != axis {
            if let Some(v) = value {
                parts.push(format!("{name}={v}"));
            }
        }
    }
    if let Some(int) = cond
        .id
        .split(';')
        .find(|part| part.starts_with("int="))
    {
        parts.push(int.to_string());
    }
    if parts.is_empty() {
        "all".to_string()
    } else {
        parts.join(";")
    }
}

pub fn write_summary(
    resolved: &ResolvedExperiment,
    hash: &str,
    results: &[(usize, SampleSet)],
    path: &Path,
) -> Result<(), CliError> {
    let mut conditions = Vec::new();
    for (idx, set) in results {
        let cond = &resolved.conditions[*idx];
        let stats = summarize(set);
        let ci_half_width = match resolved.ci {
            CiMethod::Normal => stats.ci_half_width,
            CiMethod::Bootstrap => {
                let times = set.uncensored_times();
                let mut rng = derive_rng(resolved.root_seed, *idx as u64, 0, Stream::Seeding);
                bootstrap_ci_half_width(&times, 2000, &mut rng).ok()
            }
        };
        conditions.push(ConditionSummary {
            index: *idx,
            condition: cond.id.clone(),
            axes: cond.axes,
            replicates: set.outcomes.len(),
            mean: stats.mean,
            ci_half_width,
            censored_count: stats.censored,
            uncensored_count: stats.uncensored,
            ecdf: EcdfOut {
                points: stats.ecdf.points.clone(),
                deficit: stats.ecdf.deficit(),
            },
        });
    }

    let mut slopes = Vec::new();
    for axis in &resolved.slope_axes {
        let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for (idx, set) in results {
            let cond = &resolved.conditions[*idx];
            let (Some(x), Some(mean)) = (axis_value(&cond.axes, axis), summarize(set).mean)
            else {
                continue;
            };
            let group = slope_group(cond, axis);
            match groups.iter_mut().find(|(g, _)| *g == group) {
                Some((_, points)) => points.push((x, mean)),
                None => groups.push((group, vec![(x, mean)])),
            }
        }
        for (group, points) in groups {
            if let Ok(slope) = loglog_slope(&points) {
                slopes.push(SlopeEntry {
                    axis: axis.clone(),
                    group,
                    slope,
                    points,
                });
            }
        }
    }

    let toml_text = resolved.config.canonical_toml();
    let summary = Summary {
        experiment_id: &resolved.output.experiment_id,
        config_hash: hash,
        root_seed: resolved.root_seed,
        replicates: resolved.replicates,
        conditions,
        slopes,
        resolved_config: &resolved.config,
        resolved_config_toml: &toml_text,
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Io(format!("summary serialization: {e}")))?;
    fs::write(path, json + "\n").map_err(io_err(path))
}

/// Optional per-round trajectories, one row per (condition, replicate,
/// round).
pub struct TrajectoryWriter {
    writer: BufWriter<File>,
    path: PathBuf,
}

impl TrajectoryWriter {
    pub fn create(path: PathBuf, hash: &str, root_seed: u64) -> Result<TrajectoryWriter, CliError> {
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut writer = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            writeln!(writer, "# config_hash: {hash}")?;
            writeln!(writer, "# root_seed: {root_seed}")?;
            writeln!(writer, "condition,replicate,round,infected_count,active_count")
        })()
        .map_err(io_err(&path))?;
        Ok(TrajectoryWriter { writer, path })
    }

    pub fn append_condition(
        &mut self,
        cond: &Condition,
        set: &SampleSet,
    ) -> Result<(), CliError> {
        for rep in &set.outcomes {
            if let Some(trajectory) = &rep.outcome.trajectory {
                for point in trajectory {
                    writeln!(
                        self.writer,
                        "{},{},{},{},{}",
                        cond.id, rep.replicate, point.round, point.infected, point.active
                    )
                    .map_err(io_err(&self.path))?;
                }
            }
        }
        self.writer.flush().map_err(io_err(&self.path))
    }
}
