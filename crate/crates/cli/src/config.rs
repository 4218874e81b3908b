//! Model-verification configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use obtt_core::presheaf::Mode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Longest code stream, stage set or family list allowed.
    #[serde(default = "default_cap")]
    pub codes: usize,
    /// Give up on checks still running after this many seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline_secs: Option<u64>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            codes: default_cap(),
            deadline_secs: None,
        }
    }
}

fn default_cap() -> usize {
    1_000_000
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Base category, relative to the config file.
    pub base: PathBuf,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_levels")]
    pub levels: u32,
    #[serde(default = "default_bounds")]
    pub bounds: Vec<usize>,
    #[serde(default = "default_depth")]
    pub depth: u32,
    /// Depth of the code approximant named by `uni(k)`.
    #[serde(default = "default_universe_depth")]
    pub universe_depth: u32,
    #[serde(default = "default_family_bound")]
    pub family_bound: usize,
    #[serde(default = "default_reduce")]
    pub reduce: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub caps: Caps,
}

fn default_mode() -> Mode {
    Mode::Strict
}
fn default_levels() -> u32 {
    3
}
fn default_bounds() -> Vec<usize> {
    vec![2, 3]
}
fn default_depth() -> u32 {
    2
}
fn default_universe_depth() -> u32 {
    1
}
fn default_family_bound() -> usize {
    2
}
fn default_reduce() -> bool {
    true
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg: Config = toml::from_str(&text)?;
        if cfg.base.is_relative() {
            cfg.base = path.parent().unwrap_or(Path::new(".")).join(&cfg.base);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if let Some(w) = self.bounds.windows(2).find(|w| w[0] >= w[1]) {
            return bad(format!("bounds must be strictly increasing, but {} is followed by {}", w[0], w[1]));
        }
        if self.bounds.is_empty() {
            return bad("bounds must not be empty".into());
        }
        if self.levels == 0 {
            return bad("levels must be positive".into());
        }
        if self.caps.codes == 0 {
            return bad("caps.codes must be positive".into());
        }
        if self.caps.deadline_secs == Some(0) {
            return bad("caps.deadline_secs must be positive".into());
        }
        Ok(())
    }

    /// One bound per level. Missing bounds continue the last one upward in
    /// steps of one.
    pub fn level_bounds(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.bounds.iter().copied().take(self.levels as usize).collect();
        while out.len() < self.levels as usize {
            out.push(out.last().unwrap() + 1);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Config {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = parse("base = \"b.json\"");
        assert_eq!(c.bounds, vec![2, 3]);
        assert_eq!(c.level_bounds(), vec![2, 3, 4]);
        assert_eq!(c.mode, Mode::Strict);
        assert_eq!(c.caps.codes, 1_000_000);
        c.validate().unwrap();
    }

    #[test]
    fn non_increasing_bounds_are_named() {
        let c = parse("base = \"b.json\"\nbounds = [2, 2]");
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("strictly increasing"), "{e}");
        assert!(e.contains("2 is followed by 2"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Config>("base = \"b.json\"\nbounds_typo = [1]").is_err());
    }
}
