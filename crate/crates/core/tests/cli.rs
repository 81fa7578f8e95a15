use std::path::Path;
use std::process::{Command, Output};

fn deploy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deploy"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("run deploy")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("cfg.json");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_data_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res.csv");
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"experiment": {{"sweep_axis": "users", "sweep_values": [100, 150],
                "trials": 2, "algorithms": ["scope", "random"], "output": {:?}}}}}"#,
            out
        ),
    );
    let o = deploy(&["run", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let data = std::fs::read_to_string(&out).unwrap();
    let mut lines = data.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep_value,algorithm,trial,seed,n_users,n_uavs,satisfaction,jain,ee_bits_per_joule,throughput_bps,solve_ms"
    );
    assert_eq!(lines.count(), 2 * 2 * 2);
    let summary = std::fs::read_to_string(dir.path().join("res_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 2);

    let o = deploy(&["gnuplot", "--csv", out.to_str().unwrap(), "--metric", "jain"]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.starts_with("# sweep_value scope_mean scope_std random_mean random_std\n100 "));
}

#[test]
fn unwritable_output_fails_before_solving() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"experiment": {{"sweep_values": [100], "trials": 1, "output": {:?}}}}}"#,
            blocker.join("res.csv")
        ),
    );
    let o = deploy(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("io error"));
}

#[test]
fn unknown_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"channel": {"carrier": 2e9}}"#);
    let o = deploy(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field"));
}

#[test]
fn generate_solve_validate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("scen.json");
    let dep = dir.path().join("dep.json");
    let s = scen.to_str().unwrap();
    let d = dep.to_str().unwrap();
    assert!(deploy(&["generate", "--n", "300", "--seed", "5", "--out", s]).status.success());
    for algo in ["scope", "ccs", "kmeans_scope", "kmeans_ccs", "voronoi", "random"] {
        let o = deploy(&["solve", "--scenario", s, "--algo", algo, "--out", d]);
        assert!(o.status.success(), "{algo}: {}", String::from_utf8_lossy(&o.stderr));
        let o = deploy(&["validate", "--deployment", d, "--scenario", s, "--policy", "evaluated"]);
        assert!(o.status.success(), "{algo}: {}", String::from_utf8_lossy(&o.stdout));
    }
    assert!(deploy(&["solve", "--scenario", s, "--algo", "scope", "--out", d]).status.success());
    let o = deploy(&["validate", "--deployment", d, "--scenario", s, "--policy", "sequential"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("min_sequential_rate"));
}

#[test]
fn fixed_altitude_flag_pins_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("scen.json");
    let s = scen.to_str().unwrap();
    assert!(deploy(&["generate", "--n", "200", "--out", s]).status.success());
    let o = deploy(&["solve", "--scenario", s, "--algo", "kmeans_scope", "--baseline-fixed-altitude", "80"]);
    assert!(o.status.success());
    let d = uav_scope::Deployment::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!(d.uavs.iter().all(|u| u.pos.h == 80.0));
}

#[test]
fn bench_reports_latency() {
    let o = deploy(&["bench", "--n", "200", "--algo", "scope", "--reps", "3"]);
    assert!(o.status.success());
    let line = String::from_utf8(o.stdout).unwrap();
    assert!(line.contains("median_ms=") && line.contains("deterministic=true"));
    assert_eq!(deploy(&["bench", "--n", "200", "--reps", "2"]).status.code(), Some(2));
}

#[test]
fn worker_override_keeps_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"experiment": {{"sweep_values": [120], "trials": 3, "output": {:?}}}}}"#,
            out
        ),
    );
    let strip = |text: String| -> Vec<String> {
        text.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let one = Command::new(env!("CARGO_BIN_EXE_deploy"))
        .args(["run", "--config", &cfg])
        .env("DEPLOY_WORKERS", "1")
        .output()
        .unwrap();
    assert!(one.status.success());
    let a = strip(std::fs::read_to_string(&out).unwrap());
    let many = Command::new(env!("CARGO_BIN_EXE_deploy"))
        .args(["run", "--config", &cfg])
        .env("DEPLOY_WORKERS", "4")
        .output()
        .unwrap();
    assert!(many.status.success());
    assert_eq!(a, strip(std::fs::read_to_string(&out).unwrap()));
}
