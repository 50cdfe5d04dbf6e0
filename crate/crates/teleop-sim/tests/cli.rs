//! End-to-end tests of the installed binary.
//!
//! Each test drives the real executable through `std::process::Command`,
//! covering the file formats and exit codes the library tests cannot see.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{fixture_set, tour, trip};
use teleop_sim::tours::{write_tours, TourFormat};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_teleop-sim"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn teleop-sim");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    out
}

/// The two-vehicle, one-operator hand trace used across the test suite.
fn write_fixture(path: &Path) {
    let set = fixture_set(vec![
        tour("A", 0.0, vec![trip(0, 0.0, 10.0, 20.0)]),
        tour("B", 5.0, vec![trip(0, 0.0, 10.0, 20.0)]),
    ]);
    write_tours(&set, path, TourFormat::Csv).unwrap();
}

#[test]
fn gen_tours_is_deterministic_and_counts_match() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        run_ok(bin().args(["gen-tours", "--count", "50", "--seed", "9", "--out"]).arg(out));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());

    let set = teleop_sim::tours::load_tours(&a, TourFormat::Csv).unwrap();
    assert_eq!(set.len(), 50);
}

#[test]
fn gen_tours_rejects_zero_count_as_usage_error() {
    let out = bin()
        .args(["gen-tours", "--count", "0", "--out", "nowhere.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_reproduces_the_hand_traced_delay() {
    let dir = tempfile::tempdir().unwrap();
    let tours = dir.path().join("fixture.csv");
    write_fixture(&tours);

    let prefix = dir.path().join("run");
    run_ok(
        bin()
            .arg("simulate")
            .arg("--tours")
            .arg(&tours)
            .args(["--ratio", "0.5", "--takeover", "1", "--start", "00:00"])
            .args(["--shift", "9h", "--rest-mode", "disabled"])
            .arg("--out")
            .arg(&prefix),
    );

    let kpi: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.kpi.json")).unwrap())
            .unwrap();
    assert_eq!(kpi["n_vehicles"], 2);
    assert_eq!(kpi["n_teleoperators"], 1);
    let delay = kpi["kpis"]["delay"].as_f64().unwrap();
    assert!((delay - 7.0 / 15.0).abs() <= 1e-9, "delay {delay}");
    let wt_q = kpi["kpis"]["avg_wait_per_queue_entry"].as_f64().unwrap();
    assert!((wt_q - 6.0).abs() <= 1e-9, "wt_Q {wt_q}");

    // the event log and the queue trace come out alongside the KPIs
    let events = std::fs::read_to_string(dir.path().join("run.events.csv")).unwrap();
    assert!(events.lines().count() > 1, "{events}");
    assert!(dir.path().join("run.snapshots.csv").exists());
}

#[test]
fn simulate_full_pool_and_no_takeover_has_zero_delay() {
    let dir = tempfile::tempdir().unwrap();
    let tours = dir.path().join("fixture.csv");
    write_fixture(&tours);

    let prefix = dir.path().join("base");
    run_ok(
        bin()
            .arg("simulate")
            .arg("--tours")
            .arg(&tours)
            .args(["--ratio", "1", "--takeover", "0", "--rest-mode", "disabled"])
            .arg("--out")
            .arg(&prefix),
    );
    let kpi: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("base.kpi.json")).unwrap())
            .unwrap();
    assert_eq!(kpi["kpis"]["delay"].as_f64().unwrap(), 0.0);
}

#[test]
fn simulate_without_tours_file_fails_at_runtime() {
    let out = bin()
        .args(["simulate", "--tours", "missing.csv", "--ratio", "0.5", "--out", "x"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error:"), "{stderr}");
}

fn sweep_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("sweep.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "start_times": ["05:00"],
            "shift_hours": [9.0],
            "ratios": [0.5, 1.0],
            "takeover_minutes": [1.0],
            "penetration": 1.0,
            "replications": 2,
            "master_seed": 3,
            "tours": { "generator": { "count": 40 } }
        })
        .to_string(),
    )
    .unwrap();
    path
}

#[test]
fn sweep_outputs_exist_and_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = sweep_config(dir.path());
    let out_dir = dir.path().join("out");

    run_ok(bin().arg("sweep").arg("--config").arg(&config).arg("--out").arg(&out_dir));
    let first: Vec<Vec<u8>> = ["results.csv", "summary.csv", "manifest.json"]
        .iter()
        .map(|f| std::fs::read(out_dir.join(f)).unwrap())
        .collect();
    assert_eq!(
        String::from_utf8_lossy(&first[0]).lines().count(),
        1 + 2 * 2 * 13,
        "2 cells x 2 replications x 13 KPIs plus a header"
    );

    run_ok(bin().arg("sweep").arg("--config").arg(&config).arg("--out").arg(&out_dir));
    for (file, bytes) in ["results.csv", "summary.csv", "manifest.json"].iter().zip(&first) {
        assert_eq!(&std::fs::read(out_dir.join(file)).unwrap(), bytes, "{file} changed on rerun");
    }

    // an impossible service level comes back as "none" for every group
    let out = run_ok(
        bin()
            .arg("min-ratio")
            .arg("--sweep")
            .arg(&out_dir)
            .args(["--kpi", "avg_wait_per_queue_entry", "--op", "le", "--threshold", "-1"]),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("none"), "{stdout}");

    // a trivially satisfiable one picks the smallest swept ratio
    let out = run_ok(
        bin()
            .arg("min-ratio")
            .arg("--sweep")
            .arg(&out_dir)
            .args(["--kpi", "tour_completion_rate", "--op", "ge", "--threshold", "0"]),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0.50"), "{stdout}");

    let out = run_ok(bin().arg("report").arg("--sweep").arg(&out_dir).args(["--ratio", "0.5"]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("cell start=05:00"), "{stdout}");
    assert!(stdout.contains("delay"), "{stdout}");
}

#[test]
fn min_ratio_rejects_unknown_kpi_listing_the_valid_names() {
    let out = bin()
        .args(["min-ratio", "--sweep", "d", "--kpi", "bogus", "--threshold", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("delay"), "{stderr}");
}
