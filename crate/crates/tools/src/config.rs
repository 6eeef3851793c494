//! Run configuration: one flat JSON file per run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Which space the run works on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    RoundSphere {},
    Snowball {},
    AlphaPatch { alpha: f64, cap: f64 },
    /// Round sphere pushed radially by a random bilipschitz map.
    Warp { lipschitz: f64, seed: u64 },
    /// Single-level OFF mesh; only level 0 is available.
    Mesh { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricChoice {
    Chordal,
    Angular,
    Geodesic,
}

fn default_space() -> SpaceSpec {
    SpaceSpec::RoundSphere {}
}
fn default_metric() -> MetricChoice {
    MetricChoice::Chordal
}
fn default_levels() -> [usize; 2] {
    [1, 2]
}
fn default_q() -> f64 {
    2.0
}
fn default_lambda() -> f64 {
    2.0
}
fn default_tol() -> f64 {
    1e-9
}
fn default_pack_tol() -> f64 {
    1e-12
}
fn default_tuples() -> usize {
    600
}
fn default_pairs() -> usize {
    6
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_space")]
    pub space: SpaceSpec,
    #[serde(default = "default_metric")]
    pub metric: MetricChoice,
    /// Approximation levels, inclusive.
    #[serde(default = "default_levels")]
    pub levels: [usize; 2],
    /// Mesh level carrying the sample `Z`; defaults to one past the last
    /// approximation level (capped by the generator).
    #[serde(default)]
    pub sample_level: Option<usize>,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub seed: u64,
    /// Modulus solver tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Packing angle-sum tolerance.
    #[serde(default = "default_pack_tol")]
    pub pack_tol: f64,
    /// Sampled 4-tuples for distortion fits.
    #[serde(default = "default_tuples")]
    pub tuples: usize,
    /// Continuum pairs and annulus balls for the modulus tables.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    /// Two-scale tables use the `4K` hop separation and drop continua
    /// inside a `K`-star; otherwise only adjacency is excluded.
    #[serde(default)]
    pub strict_separation: bool,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults parse")
    }
}

/// Deepest round-sphere sample (10 242 points).
pub const MAX_SPHERE_LEVEL: usize = 5;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(CliError::FileMissing(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e.to_string()))?;
        Self::from_json(&text)
    }

    fn max_level(&self) -> usize {
        match self.space {
            SpaceSpec::Snowball {} => qsunif::spaces::snowball::MAX_LEVEL as usize - 1,
            SpaceSpec::Mesh { .. } => 0,
            _ => MAX_SPHERE_LEVEL,
        }
    }

    /// Level of the sample mesh.
    pub fn sample(&self) -> usize {
        self.sample_level.unwrap_or((self.levels[1] + 1).min(self.max_level()))
    }

    /// Checks ranges and referenced files.
    pub fn validate(&self) -> Result<()> {
        if !(self.q.is_finite() && self.q >= 1.0) {
            return Err(bad(format!("q = {} must be a finite number >= 1", self.q)));
        }
        if !(self.lambda.is_finite() && self.lambda > 1.0) {
            return Err(bad(format!("lambda = {} must exceed 1", self.lambda)));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(bad(format!("tol = {} outside (0, 1e-2]", self.tol)));
        }
        if !(self.pack_tol >= 0.0 && self.pack_tol <= 1e-6) {
            return Err(bad(format!("pack_tol = {} outside [0, 1e-6]", self.pack_tol)));
        }
        let [a, b] = self.levels;
        if a > b {
            return Err(bad(format!("levels {a}..{b} are decreasing")));
        }
        let s = self.sample();
        if b > s || s > self.max_level() {
            return Err(bad(format!("levels {a}..{b} with sample level {s} exceed the generator cap {}", self.max_level())));
        }
        if self.tuples < 4 || self.tuples > 1_000_000 {
            return Err(bad("tuples outside 4..=1000000"));
        }
        if self.pairs > 1000 {
            return Err(bad("pairs above 1000"));
        }
        match &self.space {
            SpaceSpec::AlphaPatch { alpha, cap } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(bad(format!("alpha = {alpha} outside (0, 1)")));
                }
                if !(*cap > 0.0 && *cap < 2.5) {
                    return Err(bad(format!("cap = {cap} outside (0, 2.5)")));
                }
            }
            SpaceSpec::Warp { lipschitz, .. } => {
                if !(lipschitz.is_finite() && *lipschitz >= 1.0) {
                    return Err(bad(format!("lipschitz = {lipschitz} must be >= 1")));
                }
            }
            SpaceSpec::Mesh { path } => {
                if !path.exists() {
                    return Err(CliError::FileMissing(path.clone()));
                }
            }
            SpaceSpec::RoundSphere {} | SpaceSpec::Snowball {} => {}
        }
        if matches!(self.space, SpaceSpec::AlphaPatch { .. }) && self.metric != MetricChoice::Chordal {
            return Err(bad("the alpha patch carries its own metric; use metric = chordal"));
        }
        Ok(())
    }
}

/// Parses `a..b` (inclusive) or a single level.
pub fn parse_levels(s: &str) -> Result<[usize; 2]> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad(format!("bad level range '{s}'")));
    match s.split_once("..") {
        Some((a, b)) => Ok([num(a)?, num(b.trim_start_matches('='))?]),
        None => {
            let l = num(s)?;
            Ok([l, l])
        }
    }
}
