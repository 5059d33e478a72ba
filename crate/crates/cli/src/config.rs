//! Run configuration as flat `key=value` lines.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use skelss_core::metrics::PathKind;
use skelss_core::paths::{branch_pruning_path, compression_path, random_path};
use skelss_core::scale_space::PathGenerator;
use skelss_core::Backend;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathChoice {
    Random,
    #[default]
    Compression,
    Prune,
}

impl PathChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            PathChoice::Random => "random",
            PathChoice::Compression => "compression",
            PathChoice::Prune => "prune",
        }
    }
}

impl fmt::Display for PathChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PathChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(PathChoice::Random),
            "compression" => Ok(PathChoice::Compression),
            "prune" => Ok(PathChoice::Prune),
            other => Err(format!("unknown path `{other}` (expected random, compression or prune)")),
        }
    }
}

/// Everything needed to reproduce an `evolve` run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub backend: Backend,
    pub path: PathChoice,
    pub r: usize,
    pub seed: u64,
    pub stride: usize,
    pub checkpoints: Vec<usize>,
}

impl RunConfig {
    pub fn new(input: PathBuf) -> Self {
        Self {
            input,
            backend: Backend::default(),
            path: PathChoice::default(),
            r: 1,
            seed: 0,
            stride: 1,
            checkpoints: Vec::new(),
        }
    }

    pub fn path_kind(&self) -> PathKind {
        match self.path {
            PathChoice::Random => PathKind::Random {
                seed: self.seed,
                per_step: self.r,
            },
            PathChoice::Compression => PathKind::Compression { per_step: self.r },
            PathChoice::Prune => PathKind::Prune,
        }
    }

    pub fn generator(&self) -> Box<dyn PathGenerator> {
        match self.path {
            PathChoice::Random => Box::new(random_path(self.seed, self.r)),
            PathChoice::Compression => Box::new(compression_path(self.r)),
            PathChoice::Prune => Box::new(branch_pruning_path()),
        }
    }

    /// Canonical `config.txt` text. The output directory is not part of it,
    /// so the same run written to two places yields identical trees.
    pub fn to_text(&self) -> String {
        let checkpoints: Vec<String> = self.checkpoints.iter().map(usize::to_string).collect();
        format!(
            "input={}\nbackend={}\npath={}\nr={}\nseed={}\nstride={}\ncheckpoints={}\n",
            self.input.display(),
            self.backend,
            self.path,
            self.r,
            self.seed,
            self.stride,
            checkpoints.join(",")
        )
    }

    /// Parse `key=value` lines; `#` starts a comment. Unknown keys are
    /// rejected. An `out` key is returned separately.
    pub fn parse(text: &str) -> Result<(RunConfig, Option<PathBuf>), CliError> {
        let mut cfg = RunConfig::new(PathBuf::new());
        let mut have_input = false;
        let mut out = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", idx + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |msg: String| CliError::Usage(format!("config line {}: {msg}", idx + 1));
            match key {
                "input" => {
                    cfg.input = PathBuf::from(value);
                    have_input = true;
                }
                "out" => out = Some(PathBuf::from(value)),
                "backend" => cfg.backend = value.parse().map_err(|e: String| bad(e))?,
                "path" => cfg.path = value.parse().map_err(bad)?,
                "r" => cfg.r = parse_positive(value).map_err(bad)?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad(format!("bad seed `{value}`")))?,
                "stride" => cfg.stride = parse_positive(value).map_err(bad)?,
                "checkpoints" => cfg.checkpoints = parse_checkpoints(value).map_err(bad)?,
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        if !have_input {
            return Err(CliError::Usage("config has no `input` key".into()));
        }
        Ok((cfg, out))
    }
}

pub fn parse_positive(value: &str) -> Result<usize, String> {
    match value.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, found `{value}`")),
    }
}

/// Comma-separated skeleton sizes; empty text gives an empty list.
pub fn parse_checkpoints(value: &str) -> Result<Vec<usize>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse().map_err(|_| format!("bad checkpoint `{v}`")))
        .collect()
}
