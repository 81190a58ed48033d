use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use igc_core::cli::{parse_scenario, serialize_scenario};
use igc_core::sim::Scenario;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_igc-sim"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_variant(dir: &Path, name: &str, edit: impl FnOnce(&mut Scenario)) -> PathBuf {
    let mut s = Scenario::nominal();
    edit(&mut s);
    let path = dir.join(name);
    std::fs::write(&path, serialize_scenario(&s)).unwrap();
    path
}

#[test]
fn shipped_scenarios_match_constructors() {
    assert_eq!(
        parse_scenario(scenario("nominal.scn")).unwrap(),
        Scenario::nominal()
    );
    assert_eq!(
        parse_scenario(scenario("weaving.scn")).unwrap(),
        Scenario::weaving()
    );
}

#[test]
fn run_nominal_intercepts_and_logs_every_step() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("log.csv");
    let out = run(&[
        "run",
        scenario("nominal.scn").to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
        "--summary-json",
        "--audit",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["summary"]["outcome"], "intercept");
    assert_eq!(json["audit"]["violations"], serde_json::json!([0, 0, 0]));
    let flight_time = json["summary"]["flight_time"].as_f64().unwrap();
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count() - 1;
    assert_eq!(rows, (flight_time / 1e-4).round() as usize + 1);
}

#[test]
fn zero_horizon_times_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_variant(dir.path(), "t0.scn", |s| s.t_max = 0.0);
    let csv = dir.path().join("log.csv");
    let out = run(&["run", path.to_str().unwrap(), "-o", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stdout).contains("timeout"));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2);
}

#[test]
fn missing_scenario_is_an_error_naming_the_path() {
    let out = run(&["run", "/no/such/file.scn", "-o", "/tmp/unused.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("/no/such/file.scn"));
}

#[test]
fn invalid_gain_is_reported_by_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scn");
    let body = serialize_scenario(&Scenario::nominal()).replace("k0 = 1\n", "k0 = -1\n");
    std::fs::write(&path, body).unwrap();
    let out = run(&["run", path.to_str().unwrap(), "-o", "/tmp/unused.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("gains.k0"));
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        scenario("weaving.scn").to_str().unwrap(),
        "--grid",
        "delta1+delta2=0.5,0.25,0.1",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let body = std::fs::read_to_string(&table).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("k0,k1,k2,delta0,delta1,delta2,outcome,post_transient_sup_x0"));
    let sups: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(7).unwrap().parse().unwrap())
        .collect();
    assert!(sups.windows(2).all(|w| w[1] <= 1.1 * w[0]), "{sups:?}");
}

#[test]
fn sweep_without_grid_is_an_error() {
    let out = run(&[
        "sweep",
        scenario("weaving.scn").to_str().unwrap(),
        "-o",
        "/tmp/unused.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("empty grid"));
}

#[test]
fn certificate_without_estimates_is_inconclusive() {
    let out = run(&["check-gains", scenario("nominal.scn").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let stdout = text(&out.stdout);
    assert!(stdout.contains("gamma_1y (explicit)"));
    assert!(stdout.contains("INCONCLUSIVE"));
}

#[test]
fn certificate_with_supplied_estimates() {
    let out = run(&[
        "check-gains",
        scenario("nominal.scn").to_str().unwrap(),
        "--g0-norm",
        "2",
        "--g1-norm",
        "1",
        "--gamma0y",
        "10",
        "--gamma2y",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
    assert!(text(&out.stdout).contains("certificate: PASS"));

    let out = run(&[
        "check-gains",
        scenario("nominal.scn").to_str().unwrap(),
        "--gamma0y",
        "1e6",
        "--gamma2y",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stdout).contains("FAIL"));
}

#[test]
fn certificate_with_probes_passes_for_shipped_gains() {
    let out = run(&[
        "check-gains",
        scenario("nominal.scn").to_str().unwrap(),
        "--probe",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
    assert!(text(&out.stdout).contains("(estimated)"));
}

#[test]
fn tiny_delta_passes_any_finite_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_variant(dir.path(), "tiny.scn", |s| {
        s.gains.delta1 = 1e-6;
        s.gains.delta2 = 1e-6;
    });
    let out = run(&[
        "check-gains",
        path.to_str().unwrap(),
        "--gamma0y",
        "1000",
        "--gamma2y",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stdout));
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for cmd in ["run", "sweep", "check-gains"] {
        assert!(text(&out.stdout).contains(cmd));
    }
}
