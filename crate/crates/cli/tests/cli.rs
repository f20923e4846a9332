use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn grbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grbp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_benchmark_instances() {
    for (p_c, p_f, tau, region) in [
        ("0.45", "0.3", 1, "no-exploration"),
        ("0.65", "0.3", 0, "exploration"),
        ("0.5", "0.25", 1, "no-exploration"),
    ] {
        let o = grbp(&["solve", "--G", "4", "--p-c", p_c, "--p-f", p_f]);
        assert!(o.status.success());
        let text = stdout(&o);
        assert!(text.contains(&format!("tau* = {tau}\n")), "{text}");
        assert!(text.contains(&format!("region = {region}\n")), "{text}");
    }
}

#[test]
fn solve_json_is_one_object() {
    let o = grbp(&["solve", "--G", "4", "--p-c", "0.65", "--p-f", "0.3", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["tau_star"], 0);
    assert_eq!(v["region"], "exploration");
    assert_eq!(v["v_pi0"].as_array().unwrap().len(), 3);
    assert!((v["v_star"].as_f64().unwrap() - 0.733_486_238_532).abs() < 1e-11);
}

#[test]
fn bad_input_exits_two_naming_invariant() {
    let o = grbp(&["solve", "--G", "4", "--p-c", "1.5", "--p-f", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p_c"));
    let o = grbp(&["solve", "--G", "4", "--q", "0.5,0.5,0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sum"));
    let o = grbp(&["simulate", "--T", "0", "--out", "/nonexistent/never"]);
    assert_eq!(o.status.code(), Some(2));
    let o = grbp(&["simulate", "--algorithms", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = grbp(&[
            "simulate",
            "--iterations",
            "1",
            "--seed",
            "7",
            "--T",
            "500",
            "--out",
            path(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(
        fs::read(a.join("regret.csv")).unwrap(),
        fs::read(b.join("regret.csv")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("regret.json")).unwrap(),
        fs::read(b.join("regret.json")).unwrap()
    );
    let text = fs::read_to_string(a.join("regret.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("round,algorithm,regret_mean,regret_std"));
    assert_eq!(text.lines().count(), 1 + 5 * 500);
}

#[test]
fn simulate_smoke_is_fast() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let o = grbp(&[
        "simulate",
        "--T",
        "100",
        "--iterations",
        "10",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success());
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn sidecar_rerun_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let o = grbp(&[
        "simulate",
        "--G",
        "5",
        "--p-c",
        "0.6",
        "--p-f",
        "0.2",
        "--T",
        "300",
        "--iterations",
        "6",
        "--seed",
        "3",
        "--algorithms",
        "GETBE-SM,ucb1",
        "--init",
        "seed-rounds",
        "--out",
        path(&first),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sidecar = first.join("regret.json");
    let o = grbp(&["simulate", "--config", path(&sidecar), "--out", path(&second)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read(first.join("regret.csv")).unwrap(),
        fs::read(second.join("regret.csv")).unwrap()
    );
    assert_eq!(
        fs::read(&sidecar).unwrap(),
        fs::read(second.join("regret.json")).unwrap()
    );

    let o = grbp(&["sweep", "--config", path(&sidecar), "--out", path(&second)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn toml_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[model]\nG = 4\np_c = 0.65\np_f = 0.3\n\n[run]\nT = 50\niterations = 3\nseed = 1\nalgorithms = [\"GETBE-SM\", \"Oracle\"]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = grbp(&["simulate", "--config", path(&cfg), "--seed", "9", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value = serde_json::from_slice(&fs::read(out.join("regret.json")).unwrap()).unwrap();
    assert_eq!(side["seed"], 9);
    assert_eq!(side["config"]["horizon"], 50);
    assert_eq!(side["config"]["params"]["p_c"], 0.65);
    assert!(stdout(&o).contains("Oracle"));

    fs::write(&cfg, "[model]\ngoal = 4\n").unwrap();
    assert_eq!(grbp(&["simulate", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn sweep_writes_boundary_column() {
    let dir = tempfile::tempdir().unwrap();
    let o = grbp(&[
        "sweep",
        "--grid",
        "3",
        "--T",
        "50",
        "--iterations",
        "2",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p_c,p_f,region,regret_mean,regret_std,boundary");
    assert_eq!(lines.len(), 10);
    let again = dir.path().join("again");
    let o = grbp(&[
        "sweep",
        "--config",
        path(&dir.path().join("sweep.json")),
        "--out",
        path(&again),
    ]);
    assert!(o.status.success());
    assert_eq!(text, fs::read_to_string(again.join("sweep.csv")).unwrap());
}

#[test]
fn verify_pass_and_negative_control() {
    let o = grbp(&["verify", "--g-min", "3", "--g-max", "8", "--grid", "9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    assert_eq!(grbp(&["verify", "--g-min", "2", "--g-max", "2"]).status.code(), Some(0));
    assert_eq!(
        grbp(&["verify", "--g-min", "4", "--g-max", "4", "--flip-sign"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        grbp(&["verify", "--g-min", "17", "--g-max", "17"]).status.code(),
        Some(2)
    );
}

#[test]
fn step_cap_abort_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = grbp(&[
        "simulate",
        "--T",
        "10",
        "--iterations",
        "1",
        "--step-cap",
        "1",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
}
