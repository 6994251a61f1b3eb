//! Experiment driver behind the `banditlab` command line.
//!
//! Each experiment turns an [`ExperimentConfig`] into an [`ExperimentReport`]
//! holding named checks and CSV tables. Runs are bit-reproducible from the
//! config and seed: replication `i` of sub-run `k` always draws from stream
//! `i` of `sub_seed(seed, k)`.

mod clt;
pub mod config;
mod dist;
mod ldp;
mod lln;
mod parrondo;
mod power;
pub mod report;

pub use config::{
    ArmSpec, ArmsEnv, BernoulliEnv, EnvSpec, ExperimentConfig, ExperimentId, GridSpec, RangeSpec, CONFIG_VERSION,
};
pub use parrondo::Switcher;
pub use power::figure_grids;
pub use report::{Check, ExperimentReport, Table};

use crate::error::{Error, Result};

/// Run the configured experiment; tables are written when `out` is set.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let report = match cfg.experiment {
        ExperimentId::Lln => lln::run(cfg)?,
        ExperimentId::Clt => clt::run(cfg)?,
        ExperimentId::Power => power::run(cfg)?,
        ExperimentId::Ldp => ldp::run(cfg)?,
        ExperimentId::Test => test::run(cfg)?,
        ExperimentId::Dist => dist::run(cfg)?,
        ExperimentId::Parrondo => parrondo::run(cfg)?,
    };
    if let Some(dir) = &cfg.out {
        report
            .write_to(dir)
            .map_err(|e| Error::Config(format!("writing to {}: {e}", dir.display())))?;
    }
    Ok(report)
}

fn positive(name: &str, v: usize) -> Result<usize> {
    if v == 0 {
        Err(Error::Config(format!("{name} must be at least 1")))
    } else {
        Ok(v)
    }
}
