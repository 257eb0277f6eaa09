use serde_json::Value;
use std::process::{Command, Output};

fn png_det(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_png-det")).args(args).env_remove("PNG_DET_SEED").output().unwrap()
}

fn json_out(args: &[&str]) -> Value {
    let out = png_det(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_quick_exits_zero() {
    let out = png_det(&["verify", "--quick"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count() >= 8);
}

#[test]
fn tw_dist_columns_are_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tw.csv");
    let p = path.to_str().unwrap();
    let out = png_det(&["tw-dist", "--xi-min", "-5", "--xi-max", "2", "--step", "0.1", "--out", p]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# manifest: "));
    assert_eq!(lines.next().unwrap(), "xi,F1,F2");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 71);
    for w in rows.windows(2) {
        assert!(w[1][1] >= w[0][1] && w[1][2] >= w[0][2]);
    }
}

#[test]
fn simulate_reports_ks() {
    let v = json_out(&["simulate-png", "--N", "16", "--samples", "500", "--seed", "7", "--observable", "gpl", "--ref", "tw1"]);
    let ks = v["result"]["ks"].as_f64().unwrap();
    assert!(ks > 0.0 && ks < 1.0);
    assert_eq!(v["manifest"]["seed"], 7);
    assert_eq!(v["manifest"]["subcommand"], "simulate-png");
    let bad = png_det(&["simulate-png", "--N", "16", "--samples", "500", "--observable", "transversal", "--ref", "tw1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical_without_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let out = png_det(&["simulate-png", "--N", "8", "--samples", "300", "--no-timestamps", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
        std::fs::read(&p).unwrap()
    };
    let a = run("a.json");
    let b = run("b.json");
    // Only the recorded output path differs.
    let strip = |bytes: Vec<u8>| String::from_utf8(bytes).unwrap().replace("a.json", "").replace("b.json", "");
    assert_eq!(strip(a), strip(b));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"N": 4, "q": 0.5, "seed": 3}"#).unwrap();
    let v = json_out(&["lpp", "--config", cfg.to_str().unwrap(), "--N", "5"]);
    assert_eq!(v["manifest"]["config"]["N"], 5);
    assert_eq!(v["manifest"]["config"]["q"], 0.5);
    assert_eq!(v["manifest"]["seed"], 3);

    std::fs::write(&cfg, r#"{"N": 4, "colour": "blue"}"#).unwrap();
    let out = png_det(&["lpp", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_config");
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_png-det")).args(["lpp", "--N", "3"]).env("PNG_DET_SEED", "99").output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["manifest"]["seed"], 99);
    let v = json_out(&["lpp", "--N", "3"]);
    assert_eq!(v["manifest"]["seed"], 7);
}

#[test]
fn unknown_flag_is_a_json_error() {
    let out = png_det(&["fredholm", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "usage");
}

#[test]
fn airy_fdd_fields() {
    let v = json_out(&["airy-fdd", "--taus", "0,1", "--xis", "0,1"]);
    let r = &v["result"];
    for key in ["taus", "xis", "prob", "mq", "L", "tail_bound"] {
        assert!(!r[key].is_null(), "{key}");
    }
    assert!((r["prob"].as_f64().unwrap() - 0.967562).abs() < 1e-5);
}

#[test]
fn circle_walk_table_and_residual() {
    let out = png_det(&["circle-walk", "--n-sites", "5", "--n", "3", "--times", "0,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("kernel,")).count(), 4 * 25);
    let residual: f64 =
        text.lines().find(|l| l.starts_with("cue_residual")).unwrap().split(',').nth(5).unwrap().parse().unwrap();
    assert!(residual < 1e-10);
}

#[test]
fn fredholm_and_kernel_eval() {
    let v = json_out(&["fredholm", "--N", "8", "--u", "0,1", "--level", "30,30"]);
    let p = v["result"]["prob"].as_f64().unwrap();
    assert!(p > 0.99 && p <= 1.0 + 1e-12);
    let out = png_det(&["kernel-eval", "--N", "8", "--x-min", "14", "--x-max", "16"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("u,x,v,y,value"));
    assert_eq!(text.lines().count(), 2 + 9);
}

#[test]
fn help_documents_flags() {
    let out = png_det(&["simulate-png", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in ["--N", "--q", "--samples", "--seed", "--observable", "--ref", "--config", "--workers", "--out"] {
        assert!(text.contains(flag), "{flag}");
    }
}
