//! `obtt`: type-check `.obtt` files, normalize declarations, and run the
//! presheaf-model verification suite.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};

use obtt_core::kernel::{check_file, DEFAULT_MAX_LEVEL};
use obtt_core::ir_universe::HostUniverse;
use obtt_core::presheaf::checks::{run_suite, Status, SuitePlan};
use obtt_core::presheaf::{FinCat, HostConfig, Mode, PresheafHost};
use obtt_core::syntax::{parse, print};

use config::Config;
use report::Report;

const OK: u8 = 0;
const FAILED: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "obtt", version, about = "Observational type theory kernel and presheaf-model verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check every declaration in the given files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Largest universe level available to programs.
        #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: u32,
    },
    /// Print the normal form and type of a declaration.
    Normalize {
        file: PathBuf,
        name: String,
        #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: u32,
    },
    /// Run the model checks described by a config file.
    ModelVerify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        #[arg(long)]
        depth: Option<u32>,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Give up on checks still running after this many seconds.
        #[arg(long)]
        deadline: Option<u64>,
        /// Record wall time in the report.
        #[arg(long)]
        timing: bool,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "strict" => Ok(Mode::Strict),
        "weak" => Ok(Mode::Weak),
        _ => Err(format!("expected `strict` or `weak`, got `{s}`")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(match cli.command {
        Command::Check { files, max_level } => cmd_check(&files, max_level),
        Command::Normalize { file, name, max_level } => cmd_normalize(&file, &name, max_level),
        Command::ModelVerify {
            config,
            mode,
            depth,
            jobs,
            report,
            seed,
            deadline,
            timing,
        } => {
            let overrides = Overrides {
                mode,
                depth,
                seed,
                deadline,
            };
            match cmd_model_verify(&config, overrides, jobs, report.as_deref(), timing) {
                Ok(code) => code,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    USAGE
                }
            }
        }
    })
}

fn cmd_check(files: &[PathBuf], max_level: u32) -> u8 {
    let mut status = OK;
    for path in files {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                status = USAGE;
                continue;
            }
        };
        let result = parse(&text)
            .map_err(|e| e.to_string())
            .and_then(|file| check_file(&file, max_level).map(|_| file.declarations.len()).map_err(|e| e.to_string()));
        match result {
            Ok(n) => println!("{}: ok ({n} declarations)", path.display()),
            Err(e) => {
                eprintln!("{}:{e}", path.display());
                status = status.max(FAILED);
            }
        }
    }
    status
}

fn cmd_normalize(path: &Path, name: &str, max_level: u32) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return USAGE;
        }
    };
    let file = match parse(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{}:{e}", path.display());
            return FAILED;
        }
    };
    let cx = match check_file(&file, max_level) {
        Ok(cx) => cx,
        Err(e) => {
            eprintln!("{}:{e}", path.display());
            return FAILED;
        }
    };
    let Some(global) = cx.globals().get(name) else {
        eprintln!("{}: no declaration named `{name}`", path.display());
        return FAILED;
    };
    println!("{name} : {}", print(&cx.quote(&global.ty)));
    println!("{name} = {}", print(&cx.quote(&global.value)));
    OK
}

struct Overrides {
    mode: Option<Mode>,
    depth: Option<u32>,
    seed: Option<u64>,
    deadline: Option<u64>,
}

fn cmd_model_verify(path: &Path, o: Overrides, jobs: Option<usize>, out: Option<&Path>, timing: bool) -> Result<u8, String> {
    let started = Instant::now();
    let mut cfg = Config::load(path).map_err(|e| e.to_string())?;
    if let Some(m) = o.mode {
        cfg.mode = m;
    }
    if let Some(d) = o.depth {
        cfg.depth = d;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(d) = o.deadline {
        cfg.caps.deadline_secs = Some(d);
    }
    if let Ok(cap) = std::env::var("OBTT_CAP") {
        cfg.caps.codes = cap
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|c| *c >= 1.0)
            .map(|c| c as usize)
            .ok_or_else(|| format!("OBTT_CAP must be a positive number, got `{cap}`"))?;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| e.to_string())?;
    }

    let text = std::fs::read_to_string(&cfg.base).map_err(|e| format!("cannot read {}: {e}", cfg.base.display()))?;
    let cat = FinCat::from_json(&text).map_err(|e| format!("{}: {e}", cfg.base.display()))?;
    let bounds = cfg.level_bounds();
    let host = PresheafHost::new(
        cat,
        HostConfig {
            mode: cfg.mode,
            bounds: bounds.clone(),
            universe_depth: cfg.universe_depth,
            cap: cfg.caps.codes,
            reduce: cfg.reduce,
        },
    );
    let mut warnings = Vec::new();
    if bounds.len() >= 2 {
        for c in 0..host.cat().num_objects() {
            if let Ok(set) = host.stage_set(bounds[0], c) {
                if set.len() > bounds[1] {
                    warnings.push(format!(
                        "the level-0 stage set at `{}` has {} elements, more than the level-1 bound {}",
                        host.cat().objects[c],
                        set.len(),
                        bounds[1]
                    ));
                }
            }
        }
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    host.code_cache()
        .set_deadline(cfg.caps.deadline_secs.map(|s| started + Duration::from_secs(s)));

    let plan = SuitePlan {
        level: 0,
        depth: cfg.depth,
        family_bound: cfg.family_bound,
    };
    let checks = run_suite(&host, &plan);
    for r in &checks {
        let mark = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        eprintln!(
            "{mark:5} {:16} level {} stage {:4} checked {:>8}{}",
            r.check,
            r.level,
            r.stage,
            r.checked,
            r.error.as_deref().map(|e| format!("  ({e})")).unwrap_or_default()
        );
    }
    let mut report = Report::new(cfg, warnings, checks);
    if timing {
        report.wall_time_secs = Some(started.elapsed().as_secs_f64());
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n";
    match out {
        Some(p) => std::fs::write(p, json).map_err(|e| format!("cannot write {}: {e}", p.display()))?,
        None => print!("{json}"),
    }
    eprintln!(
        "{} passed, {} failed, {} errors",
        report.summary.passed, report.summary.failed, report.summary.errors
    );
    Ok(if report.all_passed() { OK } else { FAILED })
}
