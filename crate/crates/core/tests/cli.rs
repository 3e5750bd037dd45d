use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

use miniq::cli::run;
use miniq::gait::ActuatorTrajectory;
use miniq::legkin::IkSolution;
use miniq::sim::SimResult;
use miniq::workspace::ComparisonReport;
use miniq::ToolConfig;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Output {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }

    fn error(&self) -> Value {
        serde_json::from_str(&self.stderr).unwrap_or_else(|e| panic!("{e}: {}", self.stderr))
    }
}

fn miniq(args: &[&str]) -> Output {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let argv = std::iter::once("miniq").chain(args.iter().copied());
    let code = run(argv, &mut stdout, &mut stderr);
    Output {
        code,
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn unit_config(dir: &Path) -> String {
    let mut cfg = ToolConfig::default();
    cfg.robot.geom = miniq::LegGeometry::new(1.0, 1.0).unwrap();
    // Presets are sized for the small leg; drop them for the unit leg.
    cfg.gaits.clear();
    let path = dir.join("unit.json");
    fs::write(&path, cfg.to_json()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn fk_on_unit_leg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = unit_config(dir.path());
    let out = miniq(&["--config", &cfg, "fk", "--q", "0,1.5708"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = out.json();
    // 1.5708 is π/2 to 4 decimals, so the foot is off by cos(1.5708) ≈ 3.7e-6.
    assert!((v["x"].as_f64().unwrap() - 1.0).abs() < 1e-5);
    assert!((v["y"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let exact = format!("0,{FRAC_PI_2}");
    let v = miniq(&["--config", &cfg, "fk", "--q", &exact]).json();
    assert!((v["x"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["y"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    // Same pose given as actuator angles.
    let theta = format!("0,{FRAC_PI_2}");
    let w = miniq(&["--config", &cfg, "fk", "--theta", &theta]).json();
    assert_eq!(v, w);
}

#[test]
fn unreachable_ik_is_a_domain_error() {
    let out = miniq(&["--geom", "1,1", "ik", "--target", "3,0"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
    let e = out.error();
    assert_eq!(e["error"], "Unreachable");
    assert_eq!(e["module"], "legkin");
}

#[test]
fn ik_output_round_trips() {
    let out = miniq(&["ik", "--target", "0.01,-0.03", "--branch", "minus"]);
    assert_eq!(out.code, 0);
    let sol: IkSolution = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(serde_json::to_value(sol).unwrap(), out.json());
    let q = format!("{},{}", sol.joints.q1, sol.joints.q2);
    let p = miniq(&["fk", "--q", &q]).json();
    assert!((p["x"].as_f64().unwrap() - 0.01).abs() < 1e-12);
    assert!((p["y"].as_f64().unwrap() + 0.03).abs() < 1e-12);
}

#[test]
fn jacobian_and_manipulability() {
    let jac = miniq(&["--geom", "1,1", "jac", "--q", "0.3,1.1"]).json();
    let jq = &jac["j_q"];
    let det = jq[0][0].as_f64().unwrap() * jq[1][1].as_f64().unwrap()
        - jq[0][1].as_f64().unwrap() * jq[1][0].as_f64().unwrap();
    let w = miniq(&["--geom", "1,1", "manip", "--q", "0.3,1.1"]).json();
    assert!((w["w"].as_f64().unwrap() - det.abs()).abs() < 1e-12);
    assert!((w["w"].as_f64().unwrap() - 1.1f64.sin()).abs() < 1e-12);
}

#[test]
fn metrics_cost_of_transport() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("run.csv");
    // Ramp from 1.373 A to 1.573 A: the time-weighted mean is 1.473 A, the
    // sample mean is not, because the samples are unevenly spaced.
    let mut text = String::from("t_s,roll_deg,pitch_deg,yaw_deg,current_a\n");
    let times = [0.0, 0.05, 0.06, 0.2, 0.9, 1.0];
    for t in times {
        text.push_str(&format!("{t},0.1,-0.2,3.0,{}\n", 1.373 + 0.2 * t));
    }
    fs::write(&log, text).unwrap();
    let out = miniq(&["metrics", "--log", log.to_str().unwrap(), "--v", "0.46"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = out.json();
    assert!((v["avg_current"].as_f64().unwrap() - 1.473).abs() < 1e-12);
    assert!((v["cot"].as_f64().unwrap() - 8.16).abs() < 0.1);
    assert!((v["normalized_v"].as_f64().unwrap() - 5.2273).abs() < 1e-4);
    assert_eq!(v["pitch_std"], 0.0);

    let zero = miniq(&["metrics", "--log", log.to_str().unwrap(), "--v", "0"]);
    assert_eq!(zero.code, 1);
    assert_eq!(zero.error()["error"], "ZeroVelocity");

    fs::write(&log, "t_s,roll_deg,pitch_deg,yaw_deg\n0,0,0,0\n1,0,0,0\n").unwrap();
    let bad = miniq(&["metrics", "--log", log.to_str().unwrap()]);
    assert_eq!(bad.code, 2);
    assert_eq!(bad.error()["error"], "Parse");
}

#[test]
fn rasters_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("ws.pgm");
    let csv = dir.path().join("manip.csv");
    let ws = miniq(&["workspace", "--res", "101", "--out", pgm.to_str().unwrap()]).json();
    let area = ws["area"].as_f64().unwrap();
    let analytic = ws["analytic_area"].as_f64().unwrap();
    assert!((area - analytic).abs() / analytic < 0.02);
    let bytes = fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n101 101\n255\n"));
    assert_eq!(bytes.len(), b"P5\n101 101\n255\n".len() + 101 * 101);

    let out = miniq(&["manip-map", "--res", "51", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("x,y,value"));
    assert_eq!(text.lines().count(), 1 + 51 * 51);

    for space in ["joint", "actuator"] {
        let v = miniq(&["manip-map", "--res", "64", "--space", space]).json();
        assert!(v["argmax"]["w"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn compare_reports_containment() {
    let out = miniq(&["compare", "--res", "121", "--samples", "241"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r: ComparisonReport = serde_json::from_str(&out.stdout).unwrap();
    assert!(r.b_contained_in_a);
    assert!(r.ratio.unwrap() < 1.0);
}

#[test]
fn gait_trajectories_chain() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("trot.csv");
    let flip = dir.path().join("flip.csv");
    let out = miniq(&[
        "gait",
        "synth",
        "--preset",
        "fast_trot",
        "--cycles",
        "3",
        "--out",
        traj.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let summary = out.json();
    let written = ActuatorTrajectory::read_csv(fs::read(&traj).unwrap().as_slice()).unwrap();
    assert_eq!(summary["samples"].as_u64().unwrap() as usize, written.len());

    let out = miniq(&[
        "gait",
        "flip",
        "--from",
        traj.to_str().unwrap(),
        "--out",
        flip.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.json()["duration"].as_f64().unwrap() <= 0.5);

    let circle = miniq(&["gait", "synth", "--circle", "0.04", "--cycles", "10"]).json();
    assert!((circle["duration"].as_f64().unwrap() - 10.0).abs() < 1e-9);
    let bad = miniq(&["gait", "synth", "--circle", "0.5"]);
    assert_eq!(bad.code, 1);
    assert_eq!(bad.error()["error"], "InvalidParams");
    assert_eq!(miniq(&["gait", "synth", "--preset", "gallop"]).code, 2);
}

#[test]
fn keyframe_scripts_render() {
    for name in ["stair_front_place", "low_crawl", "jump", "backflip"] {
        let out = miniq(&["gait", "script", "--name", name]);
        assert_eq!(out.code, 0, "{name}: {}", out.stderr);
    }
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    fs::write(&file, "[{\"time_s\": 0.1}]").unwrap();
    let out = miniq(&["gait", "script", "--file", file.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert_eq!(out.error()["error"], "InvalidScript");
}

#[test]
fn sim_outputs_round_trip() {
    let out = miniq(&[
        "sim",
        "gait",
        "--preset",
        "slow_trot",
        "--step",
        "0.02",
        "--freq",
        "2",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r: SimResult = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(r.v_ss, 0.08);
    assert_eq!(serde_json::to_value(&r).unwrap(), out.json());

    let still = miniq(&["sim", "rotary", "--omega", "0"]);
    let r: SimResult = serde_json::from_str(&still.stdout).unwrap();
    assert_eq!(r.cot, f64::INFINITY);
    assert_eq!(still.json()["cot"], "inf");

    let back = miniq(&["sim", "rotary", "--omega", "-5"]).json();
    assert!((back["v_ss"].as_f64().unwrap() - 0.29).abs() < 1e-15);

    let fast = miniq(&["sim", "rotary", "--omega", "100"]);
    assert_eq!(fast.code, 1);
    assert_eq!(fast.error()["error"], "SpeedViolation");

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = miniq(&[
        "sim",
        "gait",
        "--sweep",
        "1,2,3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.json()["sweep"].as_array().unwrap().len(), 3);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 4);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["manip-map", "--res", "151"][..],
        &["compare", "--res", "101", "--samples", "181"],
        &["sim", "gait", "--preset", "crawl"],
        &["gait", "script", "--name", "backflip"],
    ] {
        let a = miniq(args);
        let b = miniq(args);
        assert_eq!(a.code, 0);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn usage_errors_list_flags() {
    let out = miniq(&["ik"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--target"));
    let out = miniq(&["workspace", "--bogus"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--bogus"));
    let out = miniq(&["--config", "/nonexistent/miniq.json", "fk", "--q", "0,0"]);
    assert_eq!(out.code, 2);
    assert_eq!(out.error()["module"], "config");
}

#[test]
fn binary_honours_config_env_and_cwd() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = unit_config(dir.path());
    let bin = env!("CARGO_BIN_EXE_miniq");

    let out = Command::new(bin)
        .args(["fk", "--q", "0,0"])
        .env("MINIQ_CONFIG", &cfg)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["x"], 2.0);

    // ./miniq.json is picked up when neither flag nor variable is set.
    fs::copy(&cfg, dir.path().join("miniq.json")).unwrap();
    let out = Command::new(bin)
        .args(["fk", "--q", "0,0"])
        .env_remove("MINIQ_CONFIG")
        .current_dir(dir.path())
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["x"], 2.0);

    // --geom wins over the file.
    let out = Command::new(bin)
        .args(["--geom", "0.5,0.25", "fk", "--q", "0,0"])
        .env_remove("MINIQ_CONFIG")
        .current_dir(dir.path())
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["x"], 0.75);

    let out = Command::new(bin)
        .args(["ik", "--target", "9,9"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
