//! JSON experiment configuration, schema version 1. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::banditdist::BanditParams;
use crate::env::{ArmModel, Order, TabEnv};
use crate::error::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Lln,
    Clt,
    Power,
    Ldp,
    Test,
    Dist,
    Parrondo,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        Self::Lln,
        Self::Clt,
        Self::Power,
        Self::Ldp,
        Self::Test,
        Self::Dist,
        Self::Parrondo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Lln => "lln",
            Self::Clt => "clt",
            Self::Power => "power",
            Self::Ldp => "ldp",
            Self::Test => "test",
            Self::Dist => "dist",
            Self::Parrondo => "parrondo",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// One arm's law as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase", deny_unknown_fields)]
pub enum ArmSpec {
    Bernoulli { p: f64 },
    Gaussian { mean: f64, sd: f64 },
    Finite { values: Vec<f64>, probs: Vec<f64> },
}

impl ArmSpec {
    pub fn build(&self) -> Result<ArmModel> {
        match self {
            Self::Bernoulli { p } => ArmModel::bernoulli(*p),
            Self::Gaussian { mean, sd } => ArmModel::gaussian(*mean, *sd),
            Self::Finite { values, probs } => ArmModel::finite(values.clone(), probs.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmsEnv {
    pub left: ArmSpec,
    pub right: ArmSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernoulliEnv {
    pub p_max: f64,
    pub p_min: f64,
    #[serde(default = "default_order")]
    pub order: Order,
}

fn default_order() -> Order {
    Order::H0
}

/// Either two explicit arms or a `±1` Bernoulli pair with an order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvSpec {
    Arms(ArmsEnv),
    Bernoulli(BernoulliEnv),
}

impl EnvSpec {
    pub fn bernoulli(p_max: f64, p_min: f64, order: Order) -> Self {
        Self::Bernoulli(BernoulliEnv { p_max, p_min, order })
    }

    pub fn build(&self) -> Result<TabEnv> {
        match self {
            Self::Arms(a) => Ok(TabEnv::new(a.left.build()?, a.right.build()?)),
            Self::Bernoulli(b) => TabEnv::bernoulli_ordered(b.p_max, b.p_min, b.order),
        }
    }
}

/// Inclusive evenly spaced grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RangeSpec {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.stop >= self.start && self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config(format!("bad range {self:?}")));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        if count > 10_000_000 {
            return Err(Error::Config(format!("range {self:?} has too many points")));
        }
        Ok((0..count).map(|i| self.start + self.step * i as f64).collect())
    }
}

/// Experiment-specific grids; each experiment reads the keys it knows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centres: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<RangeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<RangeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<BanditParams>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sde: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub experiment: ExperimentId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env: Option<EnvSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

impl ExperimentConfig {
    /// Config with every optional field left to the experiment's defaults.
    pub fn new(experiment: ExperimentId) -> Self {
        Self {
            version: CONFIG_VERSION,
            experiment,
            env: None,
            strategy: None,
            n: None,
            reps: None,
            seed: None,
            level: None,
            grid: GridSpec::default(),
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn env_or(&self, default: EnvSpec) -> Result<TabEnv> {
        self.env.as_ref().unwrap_or(&default).build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and_full_configs() {
        let cfg = ExperimentConfig::from_json(r#"{"version":1,"experiment":"clt"}"#).unwrap();
        assert_eq!(cfg, ExperimentConfig::new(ExperimentId::Clt));
        let text = r#"{
            "version": 1, "experiment": "test",
            "env": {"p_max": 0.55, "p_min": 0.45, "order": "H1"},
            "n": 100, "reps": 1000, "seed": 3, "level": 0.05,
            "grid": {"x": {"start": 0.0, "stop": 1.0, "step": 0.5}},
            "out": "/tmp/x"
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.env, Some(EnvSpec::bernoulli(0.55, 0.45, Order::H1)));
        assert_eq!(cfg.grid.x.unwrap().points().unwrap(), vec![0.0, 0.5, 1.0]);
        let arms = r#"{"version":1,"experiment":"ldp","env":{"left":{"law":"gaussian","mean":0,"sd":1},
            "right":{"law":"finite","values":[-1,1],"probs":[0.5,0.5]}}}"#;
        let env = ExperimentConfig::from_json(arms).unwrap().env.unwrap().build().unwrap();
        assert_eq!(env.right.mean(), 0.0);
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        assert!(ExperimentConfig::from_json(r#"{"version":1,"experiment":"clt","bogus":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"version":1,"experiment":"clt","grid":{"bogus":1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"version":2,"experiment":"clt"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"version":1,"experiment":"nope"}"#).is_err());
        let bad_arm = r#"{"version":1,"experiment":"ldp","env":{"left":{"law":"bernoulli","p":0.5,"q":1},
            "right":{"law":"bernoulli","p":0.5}}}"#;
        assert!(ExperimentConfig::from_json(bad_arm).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let mut cfg = ExperimentConfig::new(ExperimentId::Dist);
        cfg.grid.params = Some(vec![BanditParams::new(-1.0, 0.0, 0.0).unwrap()]);
        cfg.seed = Some(9);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn range_points() {
        assert_eq!(RangeSpec::new(-1.0, 1.0, 0.01).points().unwrap().len(), 201);
        assert!(RangeSpec::new(1.0, 0.0, 0.1).points().is_err());
        assert!(RangeSpec::new(0.0, 1.0, 0.0).points().is_err());
    }
}
