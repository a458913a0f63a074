//! End-to-end runs of the `gpeps` binary and the runner behind it.

use std::path::{Path, PathBuf};
use std::process::Command;

use gpeps::experiments::{parse_config, resolve_out_dir, run_experiment, OUT_DIR_ENV};
use gpeps::Error;

const SWAP: &str = "experiment = \"swap-decay\"\nseed = 3\n[parameters]\nr_i = 1.0\nk_max = 40\n";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gpeps"));
    c.env_remove(OUT_DIR_ENV);
    c
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn list_names_every_experiment() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["swap-decay", "graph-le", "transport-decay", "percolation", "repeater-chain", "oracle-validate"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn run_writes_csv_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SWAP);
    let out_dir = tmp.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("PASS ")));
    assert!(!stdout.contains("FAIL "));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["seed"], 3);
    assert!(out_dir.join("swap_decay.csv").exists());
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SWAP);
    let out_dir = tmp.path().join("o");
    let st = bin()
        .args(["run", "--seed", "99", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(text.contains("\"seed\": 99"));
}

#[test]
fn env_var_sets_output_dir_and_flag_beats_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SWAP);
    let env_dir = tmp.path().join("from-env");
    let st = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .env(OUT_DIR_ENV, &env_dir)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(env_dir.join("summary.json").exists());

    let flag_dir = tmp.path().join("from-flag");
    let st = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&flag_dir)
        .env(OUT_DIR_ENV, tmp.path().join("ignored"))
        .status()
        .unwrap();
    assert!(st.success());
    assert!(flag_dir.join("summary.json").exists());
    assert!(!tmp.path().join("ignored").exists());
}

#[test]
fn out_dir_precedence() {
    let cfg = parse_config(&format!("output = \"cfg-dir\"\n{SWAP}")).unwrap().config;
    let cli = Path::new("cli-dir");
    assert_eq!(resolve_out_dir(Some(cli), Some("env-dir"), &cfg), cli);
    assert_eq!(resolve_out_dir(None, Some("env-dir"), &cfg), Path::new("env-dir"));
    assert_eq!(resolve_out_dir(None, Some(""), &cfg), Path::new("cfg-dir"));
    assert_eq!(resolve_out_dir(None, None, &cfg), Path::new("cfg-dir"));
    let bare = parse_config(SWAP).unwrap().config;
    assert_eq!(resolve_out_dir(None, None, &bare), Path::new("out/swap-decay"));
}

#[test]
fn bad_config_exits_with_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = \"swap-decay\"\n[parameters]\nr_i = -1\n");
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("r_i"), "{err}");
    assert!(err.contains("k_max"), "{err}");

    let missing = bin().args(["run", "--config", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn config_errors_are_collected() {
    match parse_config("experiment = \"nope\"\n") {
        Err(Error::Config(errs)) => assert!(errs.iter().any(|e| e.contains("nope"))),
        other => panic!("expected a config error, got {other:?}"),
    }
    match parse_config("experiment = \"percolation\"\n[parameters]\nwidth = 0\nheight = 4\np_values = [1.5]\ntrials = 10\n") {
        Err(Error::Config(errs)) => assert!(errs.len() >= 2, "{errs:?}"),
        other => panic!("expected a config error, got {other:?}"),
    }
    assert!(matches!(parse_config("not = [toml"), Err(Error::Parse(_) | Error::Config(_))));
}

#[test]
fn failed_check_sets_exit_status() {
    // At very strong squeezing the chain is still far from its asymptotic
    // ratio on k <= 40, so the fitted decay length drifts between windows.
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = \"swap-decay\"\n[parameters]\nr_i = 12.0\nk_max = 40\n");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("FAIL xi-stable"), "{stdout}");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exact_floats_write_hex() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = parse_config(SWAP).unwrap().config;
    run_experiment(&cfg, tmp.path(), true).unwrap();
    let csv = std::fs::read_to_string(tmp.path().join("swap_decay.csv")).unwrap();
    let second = csv.lines().nth(1).unwrap();
    assert!(second.contains("0x1p+0"), "{second}");
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let text = "experiment = \"transport-decay\"\nseed = 5\n[parameters]\nensemble = \"random\"\ncount = 6\nnum_ops = 3\nn_max = 6\n";
    let cfg = parse_config(text).unwrap().config;
    let first = run_experiment(&cfg, a.path(), false).unwrap();
    run_experiment(&cfg, b.path(), false).unwrap();
    for f in &first.files {
        let name = f.file_name().unwrap();
        assert_eq!(std::fs::read(f).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
}
