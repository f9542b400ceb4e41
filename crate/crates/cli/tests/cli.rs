//! End-to-end runs of the `iohfc` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn assets(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("assets").join(name)
}

fn iohfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iohfc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_flag_prints_usage_and_exits_2() {
    let o = iohfc(&["transform", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn bad_seed_is_a_usage_error() {
    let o = iohfc(&["keygen", "--out", "/tmp/never", "--seed", "xyz"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn module_errors_exit_1_on_one_line() {
    let o = iohfc(&["transform", "--controller", "/no/such/file.json", "--length", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.starts_with("error: "));
    assert_eq!(err.trim_end().lines().count(), 1);

    // the tank controller has order 2, so L = 1 is too short
    let o = iohfc(&["transform", "--controller", path(&assets("tank_controller.json")), "--length", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).trim_end().lines().count(), 1);
}

fn matrix(v: &Value) -> (usize, usize, Vec<f64>) {
    let data = v["data"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    (v["rows"].as_u64().unwrap() as usize, v["cols"].as_u64().unwrap() as usize, data)
}

#[test]
fn transform_reproduces_printed_gain() {
    let o = iohfc(&["transform", "--controller", path(&assets("tank_controller.json")), "--length", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let printed: Value =
        serde_json::from_str(&std::fs::read_to_string(assets("tank_gain_printed.json")).unwrap()).unwrap();
    let (r, c, k) = matrix(&got["K"]);
    let (pr, pc, pk) = matrix(&printed["K"]);
    assert_eq!((r, c), (pr, pc));
    let dev = k.iter().zip(&pk).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(dev <= 5e-5, "deviation {dev}");
    assert_eq!(got["L"], 2);
}

#[test]
fn keygen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for (out, seed) in [(&a, "1f"), (&b, "1f"), (&c, "20")] {
        let o = iohfc(&["--profile", "toy", "keygen", "--out", path(out), "--seed", seed]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["params.json", "pk.bin", "sk.bin", "rlk.bin", "gk.bin"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(std::fs::read(a.join("sk.bin")).unwrap(), std::fs::read(c.join("sk.bin")).unwrap());
    let params: Value = serde_json::from_str(&std::fs::read_to_string(a.join("params.json")).unwrap()).unwrap();
    assert_eq!(params["n"], 16);
}

#[test]
fn analyze_reports_tank_constants() {
    let dir = tempfile::tempdir().unwrap();
    let gain = dir.path().join("gain.json");
    let o = iohfc(&[
        "transform",
        "--controller",
        path(&assets("tank_controller.json")),
        "--length",
        "2",
        "--out",
        path(&gain),
    ]);
    assert!(o.status.success());
    let o = iohfc(&[
        "analyze",
        "--plant",
        path(&assets("tank_plant.json")),
        "--gain",
        path(&gain),
        "--x0",
        "1,1,1,1",
        "--b-r",
        "0.7071",
        "--gamma",
        "0.9797",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["bound_split"]["tau"], 49);
    assert_eq!(r["memory"]["bits"], 5_357_568);
    assert_eq!(r["admissible"], true);
    let dk = r["stability_transposed"]["delta_k_max"].as_f64().unwrap();
    assert!((dk / 5.0740e-4 - 1.0).abs() <= 0.1);

    let o = iohfc(&["analyze", "--plant", path(&assets("tank_plant.json")), "--gain", path(&gain), "--x0", "1,1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let gain = dir.path().join("gain.json");
    let csv = dir.path().join("run.csv");
    iohfc(&["transform", "--controller", path(&assets("tank_controller.json")), "--length", "2", "--out", path(&gain)]);
    let o = iohfc(&[
        "simulate",
        "--plant",
        path(&assets("tank_plant.json")),
        "--gain",
        path(&gain),
        "--schedule",
        path(&assets("tank_schedule.json")),
        "--steps",
        "12",
        "--seed",
        "0a",
        "--plain",
        "--check-oracle",
        "--x0",
        "1,1,1,1",
        "--noise-var",
        "1e-4",
        "--out",
        path(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("oracle_mismatches 0"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,r1,r2,y1,y2,u1,u2,y_plain1,y_plain2,u_plain1,u_plain2,step_time_ms");
    assert_eq!(lines.count(), 12);
}

#[test]
fn bench_emits_table() {
    let o = iohfc(&["bench", "--trials", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "operation,min_ms,avg_ms,max_ms,std_us");
    let ops: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ops, ["sigma", "sigma_inv", "Enc", "Dec", "Mult", "Add", "Rotate"]);
}

#[test]
fn demo_is_reproducible_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let o = iohfc(&["demo", "--steps", "40", "--out-dir", path(dir.path())]);
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o).lines().filter(|l| !l.contains("_ms")).map(String::from).collect::<Vec<_>>()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert!(a.iter().any(|l| l.starts_with("oracle_mismatches") && l.ends_with(" 0")));
    assert!(a.iter().any(|l| l.starts_with("tau") && l.ends_with(" 49")));
    for f in ["gain.json", "analysis.json", "trajectory.csv"] {
        assert!(dir.path().join(f).exists());
    }
}
