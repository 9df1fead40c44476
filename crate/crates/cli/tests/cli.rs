//! End-to-end checks of the `skewflow` binary: exit codes, artifact
//! formats, config echo round trips, and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn skewflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn validate_preset_passes() {
    let dir = TempDir::new().unwrap();
    let out = skewflow(&[
        "validate",
        "--preset",
        "proximal-c5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "validate_report.json")).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["command"], "validate");
    assert_eq!(report["pass"], true);
    assert!(report["report"]["levels"].as_array().unwrap().len() == 6);
}

#[test]
fn validate_detects_stagnant_c1_profile() {
    // repeated odd block lengths keep the rotation angle constant, so the
    // C1 sup profile cannot decrease: evidence failure, exit 2
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.json");
    fs::write(
        &config,
        r#"{ "family": { "schedule": [3, 3, 3, 3] }, "validate": { "levels": 4 } }"#,
    )
    .unwrap();
    let out = skewflow(&[
        "validate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2, "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "validate_report.json")).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn usage_and_config_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    // neither --config nor --preset
    assert_eq!(exit_code(&skewflow(&["validate"])), 1);
    // unknown preset
    assert_eq!(
        exit_code(&skewflow(&["validate", "--preset", "nope"])),
        1
    );
    // unknown key in the config document
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{ "family": { "schedule": [3, 3] }, "bogus": true }"#).unwrap();
    assert_eq!(
        exit_code(&skewflow(&["validate", "--config", bad.to_str().unwrap()])),
        1
    );
    // invalid family (decreasing schedule)
    let bad2 = dir.path().join("bad2.json");
    fs::write(&bad2, r#"{ "family": { "schedule": [4, 3] } }"#).unwrap();
    assert_eq!(
        exit_code(&skewflow(&["validate", "--config", bad2.to_str().unwrap()])),
        1
    );
}

#[test]
fn rigidity_emits_profile_csv() {
    let dir = TempDir::new().unwrap();
    let out = skewflow(&[
        "rigidity",
        "--preset",
        "proximal-c5",
        "--kmax",
        "6",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let csv = read(dir.path(), "rigidity.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,m_k,sup_displacement");
    assert_eq!(lines.len(), 7, "header + 6 rows");
    // big-integer times as plain decimals
    assert!(lines[6].starts_with("6,16777216,"));
}

#[test]
fn proximal_emits_one_csv_per_pair_and_is_deterministic() {
    let dir1 = TempDir::new().unwrap();
    let dir2 = TempDir::new().unwrap();
    for dir in [&dir1, &dir2] {
        let out = skewflow(&[
            "proximal",
            "--preset",
            "proximal-c5",
            "--seed",
            "7",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "{out:?}");
    }
    let r1 = read(dir1.path(), "proximal_report.json");
    let r2 = read(dir2.path(), "proximal_report.json");
    assert_eq!(r1, r2, "identical config + seed must be byte-identical");
    let csv = read(dir1.path(), "proximal_pair_00.csv");
    assert!(csv.starts_with("kappa,time,distance\n"));
    assert_eq!(csv.lines().count(), 4, "header + 3 witness times");
    for i in 0..20 {
        assert!(dir1.path().join(format!("proximal_pair_{i:02}.csv")).exists());
    }
}

#[test]
fn seed_override_changes_the_draws() {
    let dir1 = TempDir::new().unwrap();
    let dir2 = TempDir::new().unwrap();
    skewflow(&[
        "proximal", "--preset", "proximal-c5", "--seed", "1",
        "--out", dir1.path().to_str().unwrap(),
    ]);
    skewflow(&[
        "proximal", "--preset", "proximal-c5", "--seed", "2",
        "--out", dir2.path().to_str().unwrap(),
    ]);
    assert_ne!(
        read(dir1.path(), "proximal_pair_00.csv"),
        read(dir2.path(), "proximal_pair_00.csv")
    );
}

#[test]
fn config_echo_reparses_to_equal_config() {
    let dir = TempDir::new().unwrap();
    let config_path = dir.path().join("config.json");
    let doc = r#"{
        "family": { "schedule": [3, 3, 4, 4], "t": { "kind": "one_plus_pow2", "shift": 3 } },
        "seed": 11,
        "liyorke": { "z1": 0.3, "z2": 0.7, "k_max": 4 }
    }"#;
    fs::write(&config_path, doc).unwrap();
    let out = skewflow(&[
        "liyorke",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "liyorke_report.json")).unwrap();
    // the echoed config and the original parse to the same document
    let original: serde_json::Value = serde_json::from_str(doc).unwrap();
    let echo = &report["config"];
    assert_eq!(echo["seed"], original["seed"]);
    assert_eq!(echo["family"]["schedule"], original["family"]["schedule"]);
    assert_eq!(echo["liyorke"]["k_max"], original["liyorke"]["k_max"]);
    // and the echo re-parses as a full config document
    let reparsed = serde_json::to_string(echo).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&reparsed).is_ok());
}

#[test]
fn aps_cross_arc_pair_in_same_arc_fails_evidence() {
    // a "cross-arc" pair that actually shares an arc produces a proximal
    // witness, flipping the evidence verdict
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.json");
    fs::write(
        &config,
        r#"{
            "family": { "schedule": [3, 3, 4, 4, 5, 5, 6, 6],
                         "t": { "kind": "one_plus_pow2", "shift": 3 }, "arcs": 3 },
            "aps": { "horizon": 500, "k_max": 3, "cross_arc_pairs": [[0.05, 0.25]] }
        }"#,
    )
    .unwrap();
    let out = skewflow(&[
        "aps",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2, "{out:?}");
}

#[test]
fn density_emits_coverage_and_trajectory() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.json");
    fs::write(
        &config,
        r#"{
            "family": { "schedule": [3, 3, 4, 4, 5, 5, 6, 6],
                         "t": { "kind": "one_plus_pow2", "shift": 3 } },
            "density": { "trajectory_steps": 16 }
        }"#,
    )
    .unwrap();
    let out = skewflow(&[
        "density",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{out:?}");
    let csv = read(dir.path(), "density.csv");
    assert!(csv.starts_with("k,cells_hit,cells_total,coverage\n"));
    let traj = read(dir.path(), "trajectory.csv");
    let lines: Vec<&str> = traj.lines().collect();
    assert_eq!(lines[0], "time,base,fiber");
    assert_eq!(lines.len(), 17, "header + 16 steps");
    assert_eq!(lines[1], "0,*0,0.90000000000000002");
    // base column carries point literals
    assert!(lines[2].starts_with("1,1*0,"));
}

#[test]
fn thread_cap_is_honored() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_skewflow"))
        .env("SKEWFLOW_THREADS", "1")
        .args([
            "rigidity",
            "--preset",
            "proximal-c5",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "{out:?}");
    // single-threaded and default runs produce identical artifacts
    let single = read(dir.path(), "rigidity_report.json");
    let dir2 = TempDir::new().unwrap();
    skewflow(&[
        "rigidity", "--preset", "proximal-c5",
        "--out", dir2.path().to_str().unwrap(),
    ]);
    assert_eq!(single, read(dir2.path(), "rigidity_report.json"));
}
