use std::process::Command;

use infokahler_verifier::Report;

fn infokahler() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_infokahler"));
    cmd.env_remove("INFOKAHLER_SEED");
    cmd
}

fn report_from(path: &std::path::Path) -> Report {
    Report::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_all_writes_a_consistent_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let out = infokahler()
        .args(["verify", "all", "--n", "3", "--trials", "10", "--seed", "3", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    let report = report_from(&json);
    assert!(report.is_consistent());
    assert_eq!(report.environment.seed, 3);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        stdout
            .lines()
            .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL"))
            .count(),
        report.records.len()
    );
    let expected = if report.all_passed() { Some(0) } else { Some(1) };
    assert_eq!(out.status.code(), expected);
    // the modified gauge is only flat at a = 0
    assert!(!report.record("complex.flat_tensors[a=1]").unwrap().pass);
    assert!(report.record("complex.flat_tensors[a=0]").unwrap().pass);
}

#[test]
fn off_diagonal_uniqueness_is_falsified() {
    let out = infokahler()
        .args(["verify", "uniqueness", "--b", "off-diagonal", "--trials", "100"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("uniqueness.off_diagonal[k=0.5]"));
    assert!(!stdout.contains("uniqueness.scalar"));
}

#[test]
fn zero_dimension_is_a_config_error() {
    let out = infokahler().args(["verify", "simplex", "--n", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("invalid configuration") && stderr.contains("n:"),
        "{stderr}"
    );
}

#[test]
fn unknown_tolerance_is_rejected() {
    let out = infokahler()
        .args(["verify", "simplex", "--tol", "no_such_check=1e-3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_override_changes_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = infokahler()
        .args(["verify", "complex", "--tol", "complex_flat=10", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        report_from(&json)
            .record("complex.flat_tensors[a=1]")
            .unwrap()
            .tolerance,
        10.0
    );
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    infokahler()
        .env("INFOKAHLER_SEED", "77")
        .args(["verify", "simplex", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(report_from(&json).environment.seed, 77);

    infokahler()
        .env("INFOKAHLER_SEED", "77")
        .args(["verify", "simplex", "--seed", "5", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(report_from(&json).environment.seed, 5);
}

#[test]
fn scenario_file_is_used_and_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    std::fs::write(&scenario, r#"{"n": 2, "k_values": [0.3], "trials": 5, "seed": 9}"#).unwrap();
    let json = dir.path().join("r.json");
    infokahler()
        .args(["verify", "uniqueness", "--scenario"])
        .arg(&scenario)
        .args(["--k", "0.4", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    let report = report_from(&json);
    assert_eq!(report.environment.seed, 9);
    assert!(report.record("uniqueness.scalar[k=0.4]").is_some());
    assert!(report.record("uniqueness.scalar[k=0.3]").is_none());
}

#[test]
fn demo_flow_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    std::fs::write(
        &scenario,
        r#"{"n": 2, "hamiltonian": {"hermitian_matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]},
            "initial": {"p": [0.8, 0.2], "s": [0, 0]}}"#,
    )
    .unwrap();
    let csv = dir.path().join("flow.csv");
    let out = infokahler()
        .args([
            "demo",
            "flow",
            "--t",
            "3.141592653589793",
            "--steps",
            "20000",
            "--scenario",
        ])
        .arg(&scenario)
        .arg("--out")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 201);
    let last = rows.last().unwrap();
    let p1: f64 = last[1].parse().unwrap();
    assert!((p1 - 0.8).abs() < 1e-6, "{p1}");
}

#[test]
fn demo_flow_reports_boundary_exit() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    std::fs::write(
        &scenario,
        r#"{"n": 2, "hamiltonian": {"hermitian_matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]},
            "initial": {"p": [0.5, 0.5], "s": [0, 1.5707963267948966]}}"#,
    )
    .unwrap();
    let out = infokahler()
        .args(["demo", "flow", "--t", "2", "--scenario"])
        .arg(&scenario)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("left the simplex interior"));
}

#[test]
fn bundled_scenarios_are_valid() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let scenario = infokahler_verifier::Scenario::load(&path).unwrap();
        scenario
            .validate()
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 2);
}
