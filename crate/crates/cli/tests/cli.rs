//! Exit-code contract and output-shape checks for each subcommand.

use std::path::Path;
use std::process::{Command, Output};

fn aperture(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aperture"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawning the binary")
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.conf"), "carier_frequency = 1.9 GHz\n").unwrap();
    let out = aperture(dir.path(), &["simulate", "--config", "bad.conf", "--quiet"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("carier_frequency"), "stderr: {stderr}");
}

#[test]
fn invalid_field_value_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.conf"), "k = 0\n").unwrap();
    let out = aperture(dir.path(), &["simulate", "--config", "bad.conf", "--quiet"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unattainable_target_exits_3_and_leaves_the_row_blank() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("s.conf"),
        "m = 16\nk = 4\nsearch_m_max = 32\nseed = 3\n",
    )
    .unwrap();
    let out = aperture(
        dir.path(),
        &[
            "find-antennas",
            "--config",
            "s.conf",
            "--targets",
            "5,400",
            "--trials",
            "40",
            "--out",
            "t.csv",
            "--quiet",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("target_db,M,array_diameter_m"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "5");
    assert!(!first[1].is_empty(), "attainable target must report an M");
    assert_eq!(lines.next(), Some("400,,"));
}

#[test]
fn simulate_writes_config_echo_and_percentiles() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.conf"), "m = 24\nk = 4\n").unwrap();
    let out = aperture(
        dir.path(),
        &[
            "simulate", "--config", "s.conf", "--trials", "50", "--seed", "11", "--out", "r.csv",
            "--quiet",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 11);
    assert_eq!(json["config"]["m"], 24);
    assert_eq!(json["config"]["k"], 4);
    assert_eq!(json["config"]["n_trials"], 50);
    assert_eq!(json["config"]["carrier_frequency"], 1.9e9);
    assert_eq!(json["config"]["layout"], "single");
    assert!(json["links"]["uplink"]["p05_db"].is_number());
    assert!(json["links"]["downlink"]["p95_db"].is_number());
    assert!(json["version"].is_string());
}

#[test]
fn bandwidth_sweep_emits_the_requested_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = aperture(
        dir.path(),
        &["bandwidth", "--b-min", "20 MHz", "--b-max", "1 GHz", "--points", "5", "--quiet"],
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "bandwidth_hz,capacity_bps,power_for_rate_w,pilot_throughput_bps");
    assert_eq!(lines.len(), 6);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((first[0] - 20e6).abs() < 1.0);
    // Anchor: 10 W into 20 MHz carries 60 Mbit/s, and that rate needs 10 W.
    assert!((first[1] - 60e6).abs() < 1.0);
    assert!((first[2] - 10.0).abs() < 1e-9);
}

#[test]
fn geometry_compare_emits_all_three_shapes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.conf"), "m = 32\nk = 4\nn_trials = 30\n").unwrap();
    let out = aperture(
        dir.path(),
        &["geometry-compare", "--config", "s.conf", "--out", "g.csv", "--quiet"],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    for shape in ["circular", "rectangular", "linear"] {
        assert_eq!(
            csv.lines().filter(|l| l.ends_with(&format!(",{shape}"))).count(),
            2 * 30,
            "{shape} rows"
        );
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap();
    assert!(json["scenarios"]["circular"]["uplink"]["p05_db"].is_number());
    assert!(json["scenarios"]["linear"]["downlink"]["p50_db"].is_number());
}
