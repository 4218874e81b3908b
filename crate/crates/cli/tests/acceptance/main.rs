//! End-to-end acceptance: one pass/fail line per criterion, then a single
//! assertion over all of them. The binary's exit-code contract is tested
//! alongside in `cli`.

mod cli;
#[path = "../../../core/tests/support/codegen.rs"]
mod codegen;
#[path = "../../../core/tests/support/props.rs"]
mod props;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use obtt_core::presheaf::checks::witness_non_injectivity;
use obtt_core::presheaf::{FinCat, HostConfig, Mode, PresheafHost};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MIN_GOOD_FILES: usize = 20;
const MIN_BAD_FILES: usize = 10;
const CORPUS_BUDGET: Duration = Duration::from_secs(5);
const MIN_GENERATED_CODES: usize = 1000;
const MODEL_BUDGET: Duration = Duration::from_secs(120);
const BASES: [&str; 3] = ["terminal", "arrow", "span"];

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn obtt(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_obtt"))
        .args(args)
        .current_dir(root())
        .output()
        .unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
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

fn golden_corpus() -> Outcome {
    let good = corpus("good");
    let bad = corpus("bad");
    let started = Instant::now();
    let mut wrong = Vec::new();
    for f in &good {
        if obtt(&["check", f]).status.code() != Some(0) {
            wrong.push(format!("{f} rejected"));
        }
    }
    for f in &bad {
        if obtt(&["check", f]).status.code() != Some(1) {
            wrong.push(format!("{f} not rejected with exit 1"));
        }
    }
    let took = started.elapsed();
    let has = |files: &[String], name: &str| files.iter().any(|f| f.ends_with(name));
    let required = has(&good, "11_pi_transport.obtt")
        && has(&bad, "01_universe_in_itself.obtt")
        && has(&bad, "02_pi_fst_on_bool.obtt");
    let pass = wrong.is_empty()
        && required
        && good.len() >= MIN_GOOD_FILES
        && bad.len() >= MIN_BAD_FILES
        && took < CORPUS_BUDGET;
    outcome(
        pass,
        format!(
            "{} good, {} bad, {:.2}s{}",
            good.len(),
            bad.len(),
            took.as_secs_f64(),
            wrong.first().map(|w| format!(", {w}")).unwrap_or_default()
        ),
    )
}

fn property_suite() -> Outcome {
    let gen = codegen::CodeGen { open: 2, max_level: 2 };
    let cx = codegen::open_context(gen.open);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut failures = Vec::new();
    for _ in 0..MIN_GENERATED_CODES {
        let level = gen.level(&mut rng);
        let c = gen.code(&mut rng, level, 0, 4);
        let p = gen.pi_code(&mut rng, level, 3);
        let q = if rng.gen_bool(0.5) { p.clone() } else { gen.pi_code(&mut rng, level, 3) };
        let checks = [
            props::decode_agrees(&cx, &c, level),
            props::lift_normal_form(&cx, &c, level),
            props::proofs_irrelevant(&cx, &c, level),
            props::pi_injective(&cx, level, (&p.0, &p.1), (&q.0, &q.1)),
        ];
        failures.extend(checks.into_iter().filter_map(Result::err));
    }
    outcome(
        failures.is_empty(),
        format!(
            "{MIN_GENERATED_CODES} codes, {} failures{}",
            failures.len(),
            failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
        ),
    )
}

struct Run {
    exit: Option<i32>,
    report: String,
}

fn model_verify(config: &str, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut args = vec!["model-verify", "--config", config, "--report", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let exit = obtt(&args).status.code();
    Run {
        exit,
        report: std::fs::read_to_string(&out).unwrap_or_default(),
    }
}

/// Names the records of a report that did not pass.
fn unpassed(report: &str) -> Vec<String> {
    let Ok(r) = serde_json::from_str::<serde_json::Value>(report) else {
        return vec!["no report".into()];
    };
    r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] != "pass")
        .map(|c| {
            format!(
                "{}@{} {}{}",
                c["check"].as_str().unwrap(),
                c["stage"].as_str().unwrap(),
                c["status"].as_str().unwrap(),
                c["error"].as_str().map(|e| format!(" ({e})")).unwrap_or_default()
            )
        })
        .collect()
}

/// Runs every base under one shared wall-clock budget.
fn suite_on_all_bases(suffix: &str) -> (bool, Vec<String>, Vec<String>) {
    let started = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    for base in BASES {
        let left = MODEL_BUDGET.saturating_sub(started.elapsed()).as_secs().max(1).to_string();
        let run = model_verify(&format!("configs/{base}{suffix}.toml"), &["--deadline", &left]);
        let bad = unpassed(&run.report);
        ok &= run.exit == Some(0) && bad.is_empty();
        lines.push(match bad.first() {
            None => format!("{base} ok"),
            Some(b) => format!("{base} exit {:?}, {} not passed, first {b}", run.exit, bad.len()),
        });
        reports.push(run.report);
    }
    let took = started.elapsed();
    ok &= took < MODEL_BUDGET;
    lines.push(format!("{:.1}s", took.as_secs_f64()));
    (ok, lines, reports)
}

fn strict_model_suite() -> Outcome {
    let (ok, lines, _) = suite_on_all_bases("");
    outcome(ok, lines.join("; "))
}

fn empty_domain_counterexample() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for base in BASES {
        let text = std::fs::read_to_string(root().join(format!("bases/{base}.json"))).unwrap();
        let host = PresheafHost::new(
            FinCat::from_json(&text).unwrap(),
            HostConfig {
                mode: Mode::Strict,
                bounds: vec![2, 3, 4],
                universe_depth: 1,
                cap: 1_000_000,
                reduce: true,
            },
        );
        for r in witness_non_injectivity(&host, 0) {
            let w = r.witness.as_ref();
            let literal = w.is_some_and(|w| {
                w["empty_domain"] == true && w["host_elements_equal"] == true && w["codes_equal"] == false
            });
            ok &= literal;
            lines.push(format!(
                "{base}@{}: {}",
                r.stage,
                match (literal, w) {
                    (true, _) => "empty-domain pair found".to_string(),
                    (false, Some(_)) => "only a non-empty-domain pair exists".to_string(),
                    (false, None) => "no pair".to_string(),
                }
            ));
        }
    }
    outcome(ok, lines.join("; "))
}

fn weak_mode() -> Outcome {
    let (ok, mut lines, reports) = suite_on_all_bases("-weak");
    let witnessed = reports.iter().any(|r| {
        serde_json::from_str::<serde_json::Value>(r).is_ok_and(|v| {
            v["checks"].as_array().unwrap().iter().any(|c| {
                c["check"] == "decode_pi"
                    && c["witness"].get("isomorphism").is_some()
                    && c["witness"]["decoded"] != c["witness"]["host_pi"]
            })
        })
    });
    lines.push(format!("isomorphic renaming recorded: {witnessed}"));
    outcome(ok && witnessed, lines.join("; "))
}

fn determinism() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (config, extra) in [("configs/terminal.toml", vec![]), ("configs/span-weak.toml", vec!["--depth", "1"])] {
        let a = model_verify(config, &extra);
        let b = model_verify(config, &extra);
        let same = !a.report.is_empty() && a.report == b.report;
        ok &= same;
        lines.push(format!("{config} {}", if same { "identical" } else { "differs" }));
    }
    outcome(ok, lines.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("golden corpus", golden_corpus),
        ("strictness and injectivity properties", property_suite),
        ("strict model suite at depth 2", strict_model_suite),
        ("host non-injectivity over the empty domain", empty_domain_counterexample),
        ("weak host mode", weak_mode),
        ("byte-identical reports", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {}: {} ({name}): {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "criteria not met: {failed:?}");
}
