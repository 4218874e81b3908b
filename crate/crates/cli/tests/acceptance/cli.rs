//! The `obtt` binary's exit codes and output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn obtt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obtt"))
        .args(args)
        .current_dir(root())
        .output()
        .unwrap()
}

fn corpus(dir: &str) -> Vec<String> {
    let mut files: Vec<String> = std::fs::read_dir(root().join("corpus").join(dir))
        .unwrap()
        .map(|e| e.unwrap().path().to_string_lossy().into_owned())
        .filter(|p| p.ends_with(".obtt"))
        .collect();
    files.sort();
    files
}

#[test]
fn good_corpus_checks() {
    let files = corpus("good");
    let args: Vec<&str> = std::iter::once("check").chain(files.iter().map(String::as_str)).collect();
    let out = obtt(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), files.len());
}

#[test]
fn every_bad_file_fails() {
    for f in corpus("bad") {
        let out = obtt(&["check", &f]);
        assert_eq!(out.status.code(), Some(1), "{f}");
        assert!(!out.stderr.is_empty(), "{f}");
    }
}

#[test]
fn pi_fst_on_bool_names_the_decomposition() {
    let out = obtt(&["check", "corpus/bad/02_pi_fst_on_bool.obtt"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("must prove an equality of cPi-codes"), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    assert_eq!(obtt(&["check", "corpus/no_such_file.obtt"]).status.code(), Some(2));
}

#[test]
fn normalize_prints_lift_free_types() {
    let out = obtt(&["normalize", "corpus/good/22_lift_normal_form.obtt", "lifted_fn"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let ty = text.lines().next().unwrap();
    assert_eq!(ty, "lifted_fn : Pi Bool (_ . Bool)");

    let out = obtt(&["normalize", "corpus/good/21_stuck_cast.obtt", "refl_cast_true"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("refl_cast_true = true"));

    let out = obtt(&["normalize", "corpus/good/21_stuck_cast.obtt", "stuck"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("= fun x0 . fun x1 . fun x2 . fun x3 . cast x0 x1 x2 x3"), "{text}");
}

#[test]
fn normalize_unknown_name_fails() {
    assert_eq!(obtt(&["normalize", "corpus/good/21_stuck_cast.obtt", "nope"]).status.code(), Some(1));
}

#[test]
fn non_increasing_bounds_are_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let base = root().join("bases/terminal.json");
    std::fs::write(&cfg, format!("base = {:?}\nbounds = [3, 2]\n", base)).unwrap();
    let out = obtt(&["model-verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bounds must be strictly increasing"));
}

#[test]
fn terminal_depth_one_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = obtt(&[
        "model-verify",
        "--config",
        "configs/terminal.toml",
        "--depth",
        "1",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["truncation"]["code_depth"], 1);
    assert_eq!(r["level_bounds"], serde_json::json!([2, 3, 4]));
    assert_eq!(r["summary"]["failed"], 0);
    assert!(r.get("wall_time_secs").is_none());
}
