//! End-to-end tests of the contagion binary: file formats, determinism,
//! exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn contagion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contagion"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn edge_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(str::to_string)
        .collect()
}

#[test]
fn generate_c2_writes_2n_edges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c2.edges");
    let result = contagion(&["generate", "c2", "--n", "8", "-o", out.to_str().unwrap()]);
    assert!(result.status.success());
    assert_eq!(edge_lines(&out).len(), 16);
    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.contains("\"mean_degree\": 4.0"));
}

#[test]
fn generate_empty_er_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("er.edges");
    let result = contagion(&["generate", "er", "--n", "10", "--p", "0", "-o", out.to_str().unwrap()]);
    assert!(result.status.success());
    assert_eq!(edge_lines(&out).len(), 0);
    assert!(fs::read_to_string(&out).unwrap().starts_with("# nodes: 10"));
}

#[test]
fn eta_zero_generates_exactly_c2() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.edges");
    let b = dir.path().join("b.edges");
    assert!(contagion(&["generate", "eta-c2", "--n", "100", "--eta", "0", "-o", a.to_str().unwrap()])
        .status
        .success());
    assert!(contagion(&["generate", "c2", "--n", "100", "-o", b.to_str().unwrap()])
        .status
        .success());
    assert_eq!(edge_lines(&a), edge_lines(&b));
}

fn run_config(dir: &Path, name: &str, body: &str) -> Output {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    contagion(&["run", path.to_str().unwrap()])
}

fn deterministic_config(dir: &Path) -> String {
    format!(
        r#"
[graph]
kind = "cycle"
n = 100
k = 2

[activation]
kind = "noisy-threshold"
theta = 2
q = 0.0
rho = 1.0

[dynamics]
sub_threshold_labels = ["cycle1", "cycle-extra"]

[experiment]
replicates = 5
root_seed = 42
seed_rule = "cycle1-edge"

[output]
dir = "{}"
experiment_id = "det"
trajectories = true
"#,
        dir.display()
    )
}

#[test]
fn deterministic_run_reports_49_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let result = run_config(dir.path(), "det.toml", &deterministic_config(dir.path()));
    assert!(result.status.success());
    let csv = fs::read_to_string(dir.path().join("det_results.csv")).unwrap();
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && l.contains("det,"))
        .collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[9], "49", "spread_time column in {row}");
        assert_eq!(fields[10], "false");
    }

    // Trajectories: one row per round per replicate, rounds 0..=49.
    let trajectories =
        fs::read_to_string(dir.path().join("det_trajectories.csv")).unwrap();
    let t_rows = trajectories
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("condition,"))
        .count();
    assert_eq!(t_rows, 5 * 50);
    assert!(trajectories.lines().any(|l| l.ends_with(",49,100,100")));
}

#[test]
fn reruns_are_byte_identical_including_from_the_echoed_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = deterministic_config(dir.path());
    assert!(run_config(dir.path(), "det.toml", &config).status.success());
    let csv1 = fs::read(dir.path().join("det_results.csv")).unwrap();
    let json1 = fs::read(dir.path().join("det_summary.json")).unwrap();

    // Same config again.
    assert!(run_config(dir.path(), "det.toml", &config).status.success());
    assert_eq!(csv1, fs::read(dir.path().join("det_results.csv")).unwrap());
    assert_eq!(json1, fs::read(dir.path().join("det_summary.json")).unwrap());

    // From the config echoed into the summary.
    let summary: serde_json::Value =
        serde_json::from_slice(&json1).expect("summary is valid JSON");
    let echoed = summary["resolved_config_toml"].as_str().unwrap();
    assert!(run_config(dir.path(), "echoed.toml", echoed).status.success());
    assert_eq!(csv1, fs::read(dir.path().join("det_results.csv")).unwrap());
    assert_eq!(json1, fs::read(dir.path().join("det_summary.json")).unwrap());
}

#[test]
fn empirical_file_with_four_conditions_yields_r_times_4_rows() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.edges");
    assert!(contagion(&[
        "generate", "ws", "--n", "120", "--k", "5", "--rewire", "0.03", "--seed", "7", "-o",
        net.to_str().unwrap()
    ])
    .status
    .success());
    let config = format!(
        r#"
[graph]
kind = "file"
path = "{net}"

[activation]
kind = "noisy-threshold"
theta = 2
q = 0.05
rho = 1.0

[dynamics]
stop_fraction = 0.9

[intervention]
kinds = ["none", "rewire", "add-triad-closing", "add-random"]
fraction = 0.1

[experiment]
replicates = 10
root_seed = 3

[output]
dir = "{out}"
experiment_id = "interv"
"#,
        net = net.display(),
        out = dir.path().display()
    );
    let result = run_config(dir.path(), "interv.toml", &config);
    assert!(result.status.success(), "{result:?}");
    let csv = fs::read_to_string(dir.path().join("interv_results.csv")).unwrap();
    let rows = csv
        .lines()
        .filter(|l| !l.starts_with('#') && l.starts_with("interv,"))
        .count();
    assert_eq!(rows, 40);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("interv_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["conditions"].as_array().unwrap().len(), 4);
}

#[test]
fn sweep_over_n_recovers_the_linear_c2_slope() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        r#"
[graph]
kind = "cycle"
k = 2

[activation]
kind = "noisy-threshold"
theta = 2
q = 0.0
rho = 1.0

[experiment]
replicates = 3
root_seed = 1
seed_rule = "cycle1-edge"
n = [1000, 2000, 4000]

[output]
dir = "{}"
experiment_id = "lin"
"#,
        dir.path().display()
    );
    let path = dir.path().join("lin.toml");
    fs::write(&path, &config).unwrap();
    let result = contagion(&["sweep", path.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("lin_summary.json")).unwrap())
            .unwrap();
    let slopes = summary["slopes"].as_array().unwrap();
    assert_eq!(slopes.len(), 1);
    let slope = slopes[0]["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.01, "slope {slope} should be ~1.0");
}

#[test]
fn sweep_over_k_shows_the_u_shape_at_fixed_degree() {
    // Fixed expected degree 15, k from 2 to 7: replacing cycle edges with
    // random ties speeds the spread up to a point, but not all the way
    // down to k = 2.
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        r#"
[graph]
kind = "cycle-union-er"
n = 1000
degree = 15.0

[activation]
kind = "noisy-threshold"
theta = 2
q = 0.0
rho = 1.0

[experiment]
replicates = 100
root_seed = 41
seed_rule = "cycle1-edge"
k = [2, 4, 7]
slope_axes = []

[output]
dir = "{}"
experiment_id = "ksweep"
"#,
        dir.path().display()
    );
    let path = dir.path().join("k.toml");
    fs::write(&path, &config).unwrap();
    let result = contagion(&["sweep", path.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    let summary: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("ksweep_summary.json")).unwrap(),
    )
    .unwrap();
    let mean_at = |k: u64| -> f64 {
        summary["conditions"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["axes"]["k"] == serde_json::json!(k))
            .unwrap()["mean"]
            .as_f64()
            .unwrap()
    };
    let (m2, m4, m7) = (mean_at(2), mean_at(4), mean_at(7));
    assert!(m7 > m4, "k=7 ({m7:.2}) should be slower than k=4 ({m4:.2})");
    assert!(m2 > m4, "k=2 ({m2:.2}) should be slower than k=4 ({m4:.2})");
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown key.
    let bad = r#"
[graph]
kind = "cycle"
n = 10
frobnicate = 3

[activation]
kind = "noisy-threshold"
theta = 2
q = 0.0

[experiment]
replicates = 1
"#;
    let result = run_config(dir.path(), "bad.toml", bad);
    assert_eq!(result.status.code(), Some(1));
    let msg = String::from_utf8(result.stderr).unwrap();
    assert!(msg.contains("frobnicate"), "stderr: {msg}");

    // Axes are rejected outside sweep.
    let with_axis = r#"
[graph]
kind = "cycle"
k = 2

[activation]
kind = "noisy-threshold"
theta = 2
q = 0.0

[experiment]
replicates = 1
n = [10, 20]
"#;
    let result = run_config(dir.path(), "axis.toml", with_axis);
    assert_eq!(result.status.code(), Some(1));

    // Empty axis under sweep.
    let empty_axis = r#"
[graph]
kind = "cycle"
k = 2

[activation]
kind = "noisy-threshold"
theta = 2
q = 0.0

[experiment]
replicates = 1
n = []
"#;
    let path = dir.path().join("empty.toml");
    fs::write(&path, empty_axis).unwrap();
    let result = contagion(&["sweep", path.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    // Sweep with no axis at all.
    let no_axis = empty_axis.replace("n = []", "");
    fs::write(&path, no_axis).unwrap();
    let result = contagion(&["sweep", path.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn io_errors_exit_2() {
    let result = contagion(&["stats", "/nonexistent/file.edges"]);
    assert_eq!(result.status.code(), Some(2));
    let result = contagion(&["run", "/nonexistent/config.toml"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn oracle_size_errors_exit_3() {
    let result = contagion(&["oracle", "--gen", "c2", "--n", "30", "--theta", "2"]);
    assert_eq!(result.status.code(), Some(3));
}

#[test]
fn oracle_reports_closed_form_values() {
    let result = contagion(&[
        "oracle", "--gen", "c1", "--n", "4", "--theta", "2", "--q", "0.5",
    ]);
    assert!(result.status.success());
    let manifest: serde_json::Value =
        serde_json::from_slice(&result.stdout).expect("manifest is JSON");
    assert!((manifest["expected_time"].as_f64().unwrap() - 2.0).abs() < 1e-9);

    let result = contagion(&[
        "oracle", "--gen", "c1", "--n", "8", "--theta", "2", "--q", "0",
    ]);
    assert!(result.status.success());
    let manifest: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!(manifest["expected_time_status"], "unreachable");

    // Complete graph on 3 nodes: one round with certainty.
    let dir = tempfile::tempdir().unwrap();
    let k3 = dir.path().join("k3.edges");
    fs::write(&k3, "0 1\n1 2\n0 2\n").unwrap();
    let result = contagion(&[
        "oracle", "--graph", k3.to_str().unwrap(), "--theta", "2",
    ]);
    assert!(result.status.success());
    let manifest: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!(manifest["expected_time"].as_f64().unwrap(), 1.0);
    assert_eq!(manifest["closure_rounds"], 1);
}

#[test]
fn stats_roundtrip_on_generated_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ws.edges");
    assert!(contagion(&[
        "generate", "ws", "--n", "60", "--k", "3", "--rewire", "0.1", "--seed", "5", "-o",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let result = contagion(&["stats", out.to_str().unwrap()]);
    assert!(result.status.success());
    let stats: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!(stats["n"], 60);
    assert_eq!(stats["m"], 180);
}
