//! The JSON report written by `model-verify`.

use serde::Serialize;

use obtt_core::presheaf::checks::{CheckRecord, Status};

use crate::config::Config;

#[derive(Debug, Serialize)]
pub struct Truncation {
    /// Codes are checked up to this constructor depth.
    pub code_depth: u32,
    /// `uni(k)` names the codes of V_k up to this depth.
    pub universe_depth: u32,
    /// Deep codes are built from one subcode per decode class.
    pub reduced: bool,
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: Config,
    pub level_bounds: Vec<usize>,
    pub truncation: Truncation,
    pub warnings: Vec<String>,
    pub summary: Summary,
    pub checks: Vec<CheckRecord>,
    /// Present only when asked for, since it would break byte-identical
    /// reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

impl Report {
    pub fn new(config: Config, warnings: Vec<String>, checks: Vec<CheckRecord>) -> Report {
        let mut summary = Summary::default();
        for r in &checks {
            match r.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Error => summary.errors += 1,
            }
        }
        Report {
            version: env!("CARGO_PKG_VERSION"),
            level_bounds: config.level_bounds(),
            truncation: Truncation {
                code_depth: config.depth,
                universe_depth: config.universe_depth,
                reduced: config.reduce,
            },
            config,
            warnings,
            summary,
            checks,
            wall_time_secs: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }
}
