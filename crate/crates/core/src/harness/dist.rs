//! Bandit density and distribution tables, with Euler paths of the drift
//! diffusion checked against the closed-form law.

use rayon::prelude::*;
use serde_json::json;

use super::config::{ExperimentConfig, RangeSpec};
use super::report::{sub_seed, Check, ExperimentReport, Table};
use crate::banditdist::{bandit_pdf, sample_sde, BanditCdf, BanditParams, SdeConfig};
use crate::error::Result;
use crate::ks::ks_distance;
use crate::quadrature::integrate;
use crate::rng::RngStream;

const MASS_TOL: f64 = 1e-6;
const NEG_TOL: f64 = 1e-12;
const SDE_KS: f64 = 0.005;

fn default_params() -> Vec<BanditParams> {
    [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]
        .into_iter()
        .map(|alpha| BanditParams {
            alpha,
            beta: 0.0,
            centre: 0.0,
        })
        .collect()
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let seed = cfg.seed();
    let params = cfg.grid.params.clone().unwrap_or_else(default_params);
    let ys = cfg.grid.y.unwrap_or(RangeSpec::new(-6.0, 6.0, 0.01)).points()?;
    let mut report = ExperimentReport::new(cfg.experiment, seed);
    let mut listed = Vec::new();

    for (i, p) in params.iter().enumerate() {
        let p = BanditParams::new(p.alpha, p.beta, p.centre)?;
        let cdf = BanditCdf::new(p)?;
        let (lo, hi) = p.window();
        let mass = integrate(|y| bandit_pdf(&p, y).unwrap_or(f64::NAN), lo, hi, &[p.centre], 1e-10)?.value;
        let mut table = Table::new(format!("dist_{i}.csv"), "y,pdf,cdf");
        let (mut min_pdf, mut prev, mut monotone) = (f64::INFINITY, 0.0, true);
        for &y in &ys {
            let (f, c) = (bandit_pdf(&p, y)?, cdf.cdf(y)?);
            min_pdf = min_pdf.min(f);
            monotone &= c >= prev;
            prev = c;
            table.push_floats(&[y, f, c]);
        }
        report.add_table(table);
        let tag = format!("a{}_b{}_c{}", p.alpha, p.beta, p.centre);
        report.checks.push(Check::at_most(
            format!("dist_mass_{tag}"),
            (mass - 1.0).abs(),
            MASS_TOL,
            format!("|integral of f - 1| over [{lo}, {hi}]"),
        ));
        report.checks.push(Check::at_least(
            format!("dist_nonnegative_{tag}"),
            min_pdf,
            -NEG_TOL,
            "smallest density value on the grid",
        ));
        report.checks.push(Check::at_least(
            format!("dist_monotone_{tag}"),
            f64::from(u8::from(monotone)),
            1.0,
            "distribution function non-decreasing on the grid",
        ));
        listed.push(json!({ "file": format!("dist_{i}.csv"), "params": p, "mass": mass }));
    }

    let paths = cfg.reps.unwrap_or(1_000_000);
    let dt = cfg.grid.dt.unwrap_or(1e-3);
    let cases = cfg
        .grid
        .sde
        .clone()
        .unwrap_or_else(|| vec![[-1.0, 0.0], [1.0, 0.0], [-0.2, 0.5]]);
    let mut sde_rows = Vec::new();
    if paths > 0 {
        let mut table = Table::new("sde_ks.csv", "alpha,centre,dt,paths,ks");
        for (k, &[alpha, centre]) in cases.iter().enumerate() {
            let sde = SdeConfig::new(dt, 0.0, alpha, centre)?;
            let base = sub_seed(seed, k as u64);
            let mut ys: Vec<f64> = (0..paths as u64)
                .into_par_iter()
                .map(|i| sample_sde(&sde, &mut RngStream::new(base, i)))
                .collect();
            let cdf = BanditCdf::new(sde.terminal_law())?;
            let ks = ks_distance(&mut ys, |y| cdf.cdf(y))?;
            table.push_floats(&[alpha, centre, dt, paths as f64, ks]);
            report.checks.push(Check::at_most(
                format!("dist_sde_ks_a{alpha}_c{centre}"),
                ks,
                SDE_KS,
                format!("KS distance of {paths} Euler paths (dt = {dt}) to the time-one Bandit law"),
            ));
            sde_rows.push(json!({ "alpha": alpha, "centre": centre, "ks": ks }));
        }
        report.add_table(table);
    }
    report.summary = json!({ "tables": listed, "sde": sde_rows, "paths": paths, "dt": dt });
    Ok(report)
}
