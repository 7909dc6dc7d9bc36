//! End-to-end checks of the command-line interface.

use std::path::Path;
use std::process::{Command, Output};

fn specnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = specnet(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = [
        "sweep", "--model", "ba", "--n", "80", "--k-ave", "10", "--trials", "3", "--seed", "11",
        "--n-h", "8",
    ];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b);
    assert!(a.contains("eps_mean"));
}

#[test]
fn generate_then_analyze_file() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let graph_s = graph.to_str().unwrap();
    stdout_of(&[
        "generate", "--model", "er", "--n", "60", "--k-ave", "8", "--seed", "4", "--weights",
        "exponential", "--out", graph_s,
    ]);
    assert!(graph.exists());

    let spectrum = stdout_of(&["spectrum", "--input", graph_s]);
    let lambdas: Vec<f64> = spectrum
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("index"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(lambdas.len(), 60);
    assert!(lambdas[0].abs() < 1e-9);
    assert!(lambdas.windows(2).all(|p| p[0] <= p[1]));
    let trace: f64 = lambdas.iter().sum();
    assert!((trace - 60.0).abs() < 1e-8 * 60.0);

    let hist = stdout_of(&["hist", "--input", graph_s, "--n-h", "12"]);
    let f_sum: f64 = hist
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("theta"))
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((f_sum - 1.0).abs() < 1e-9, "frequencies sum to {f_sum}");

    let walk = dir.path().join("walk.csv");
    stdout_of(&[
        "walk",
        "--input",
        graph_s,
        "--source",
        "2",
        "--runs",
        "500",
        "--out",
        walk.to_str().unwrap(),
    ]);
    let summary = dir.path().join("walk.csv.summary.json");
    assert!(walk.exists() && summary.exists());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert!(doc["m"].as_f64().unwrap() > 0.0);
    assert!(doc["eps_m"].as_f64().unwrap() >= 0.0);
}

#[test]
fn header_echo_is_a_valid_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = stdout_of(&[
        "sweep", "--model", "er", "--n", "70", "--k-ave", "9", "--trials", "2", "--seed", "8",
        "--n-h", "6",
    ]);
    // Feed the emitted header back as --config: same experiment, same bytes.
    let echo: String = out1
        .lines()
        .filter(|l| l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let cfg_path = dir.path().join("echo.cfg");
    std::fs::write(&cfg_path, echo).unwrap();
    let out2 = stdout_of(&["sweep", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out1, out2);
}

#[test]
fn json_format_outputs_parse() {
    let text = stdout_of(&[
        "sweep", "--model", "er", "--n", "60", "--k-ave", "8", "--trials", "2", "--seed", "3",
        "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["config"]["n"], 60);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn figure_data_smoke() {
    let fig2 = stdout_of(&[
        "figure", "--fig", "fig2", "--n", "100", "--k-ave", "8", "--k-ave", "12", "--trials",
        "3", "--seed", "6",
    ]);
    // Two models x two k_ave rows.
    let rows = fig2
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("model"))
        .count();
    assert_eq!(rows, 4);

    let fig3 = stdout_of(&[
        "figure", "--fig", "fig3", "--n", "80", "--k-ave", "10", "--trials", "2", "--seed", "6",
        "--n-h", "10",
    ]);
    let rows = fig3
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("k_ave"))
        .count();
    assert_eq!(rows, 10);
}

#[test]
fn exit_codes_distinguish_config_and_data_errors() {
    // Config error: impossible ER probability.
    let out = specnet(&["sweep", "--model", "er", "--n", "10", "--k-ave", "50"]);
    assert_eq!(out.status.code(), Some(1));

    // Data error: malformed edge list.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 1 1.0\n1 1 2.0\n").unwrap();
    let out = specnet(&["spectrum", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.txt:2"), "stderr: {msg}");

    // Unreadable path.
    let out = specnet(&["spectrum", "--input", Path::new("/nonexistent").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
