//! Acceptance criterion 10: byte-identical CSV and JSON across repeated
//! runs and across worker counts 1 and 8. Criteria 1-9 live in the core
//! crate's acceptance suite.

use std::path::Path;
use std::process::Command;

fn run_once(dir: &Path, sub: &str, cfg: &Path, stem: &str, threads: &str) -> (Vec<u8>, Vec<u8>) {
    let csv = dir.join(format!("{stem}.csv"));
    let output = Command::new(env!("CARGO_BIN_EXE_aperture"))
        .arg(sub)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(&csv)
        .arg("--quiet")
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("spawning the binary");
    assert!(
        output.status.success(),
        "{sub} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    (
        std::fs::read(&csv).unwrap(),
        std::fs::read(csv.with_extension("json")).unwrap(),
    )
}

#[test]
fn criterion_10_determinism_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.conf");
    std::fs::write(&cfg, "m = 32\nk = 6\nn_trials = 60\nseed = 7\n").unwrap();
    for sub in ["simulate", "simulate-multicell"] {
        let (csv_a, json_a) = run_once(dir.path(), sub, &cfg, &format!("{sub}-a"), "1");
        let (csv_b, json_b) = run_once(dir.path(), sub, &cfg, &format!("{sub}-b"), "1");
        let (csv_c, json_c) = run_once(dir.path(), sub, &cfg, &format!("{sub}-c"), "8");
        assert!(csv_a == csv_b, "{sub}: repeat run changed the CSV");
        assert!(csv_a == csv_c, "{sub}: worker count changed the CSV");
        assert!(json_a == json_b, "{sub}: repeat run changed the JSON");
        assert!(json_a == json_c, "{sub}: worker count changed the JSON");
        assert!(csv_a.starts_with(b"sinr_db,cum_prob,link,scenario\n"));
        let rows = csv_a.iter().filter(|&&b| b == b'\n').count() - 1;
        assert_eq!(rows, 2 * 60, "{sub}: one row per sample per direction");
    }
}
