use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(dir: &Path, out: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_overlaynet"))
        .args(args)
        .arg("--out")
        .arg(dir.join(out))
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

fn read(dir: &Path, out: &str, file: &str) -> String {
    fs::read_to_string(dir.join(out).join(file)).unwrap()
}

#[test]
fn analytic_has_documented_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "lambda_p = 2000\n");
    let o = run(tmp.path(), "a", &["analytic", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(tmp.path(), "a", "results.csv");
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "quantity,value,lower,upper,formula");
    assert!(csv.contains("\ngamma,"));
    for f in ["results.csv", "results.json", "effective_config", "run.log"] {
        let text = read(tmp.path(), "a", f);
        assert!(text.contains("overlaynet-results/1"), "{f} lacks the schema");
        assert!(text.contains("seed") && text.contains("config_sha256"), "{f} lacks provenance");
    }
}

#[test]
fn snapshot_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "lambda_p = 1000\nbeta = 0.7\nq_p = 0.05\n");
    let o = run(tmp.path(), "a", &["analytic", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let snap = tmp.path().join("a").join("effective_config");
    let o = run(tmp.path(), "b", &["analytic", "--config", snap.to_str().unwrap()]);
    assert!(o.status.success());
    for f in ["results.csv", "results.json", "effective_config"] {
        assert_eq!(read(tmp.path(), "a", f), read(tmp.path(), "b", f), "{f}");
    }
}

#[test]
fn simulate_is_deterministic_across_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "lambda_p = 1000\ntrials = 12\npackets = 150\n");
    let c = cfg.to_str().unwrap();
    let a = run(tmp.path(), "a", &["simulate", "--config", c, "--seed", "9", "--workers", "1"]);
    let b = run(tmp.path(), "b", &["simulate", "--config", c, "--seed", "9", "--workers", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(read(tmp.path(), "a", "results.csv"), read(tmp.path(), "b", "results.csv"));
    assert_eq!(read(tmp.path(), "a", "results.json"), read(tmp.path(), "b", "results.json"));
    let other = run(tmp.path(), "c", &["simulate", "--config", c, "--seed", "10"]);
    assert!(other.status.success());
    assert_ne!(read(tmp.path(), "a", "results.csv"), read(tmp.path(), "c", "results.csv"));
}

#[test]
fn override_appears_in_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "lambda_p = 2000\n");
    let o = run(tmp.path(), "a", &["validate", "--config", cfg.to_str().unwrap(), "--set", "q_p=0.05"]);
    assert!(o.status.success());
    assert!(read(tmp.path(), "a", "effective_config").contains("\nq_p = 0.05\n"));
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "lambda_p = 2000\n");
    let c = cfg.to_str().unwrap();
    for (set, needle) in [
        ("sp_ratio=0.8", "primary sensitivity invariant violated"),
        ("ps_ratio=1.2", "secondary robustness invariant violated"),
        ("lambda_q=3", "unknown key"),
        ("trials=many", "expected"),
    ] {
        let o = run(tmp.path(), "a", &["validate", "--config", c, "--set", set]);
        assert_eq!(o.status.code(), Some(2), "{set}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(needle), "{set}");
    }
    let empty = config(tmp.path(), "beta = 1.5\n");
    let o = run(tmp.path(), "a", &["validate", "--config", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing required key `lambda_p`"));
}

#[test]
fn broken_gamma_bound_fails_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "lambda_p = 2000\nverify.only = 5\nverify.scale = 0.02\nverify.fault = gamma_max\n");
    let o = run(tmp.path(), "v", &["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("FAIL  5"));
    let csv = read(tmp.path(), "v", "results.csv");
    let failed: Vec<&str> = csv.lines().filter(|l| l.ends_with(",false")).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().any(|l| l.contains("invariant_gamma_min_le_gamma_le_gamma_max")), "{failed:?}");
}
