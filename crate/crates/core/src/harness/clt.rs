//! Empirical law of `T_{n,n}` under the threshold strategy against the
//! Bandit limit, for both arm orders.

use rayon::prelude::*;
use serde_json::json;

use super::config::{EnvSpec, ExperimentConfig, RangeSpec};
use super::positive;
use super::report::{sub_seed, Check, ExperimentReport, Table};
use crate::banditdist::{BanditCdf, BanditParams};
use crate::env::{simulate, Order, TabEnv};
use crate::error::{Error, Result};
use crate::fmt::fmt_f64;
use crate::ks::ks_distance;
use crate::rng::RngStream;
use crate::strategies::StrategySpec;

const KS_BOUND: f64 = 0.01;
// zero drift: the limit is a plain normal and the bound tightens
const KS_BOUND_NORMAL: f64 = 0.005;

fn order_name(o: Order) -> &'static str {
    match o {
        Order::H0 => "H0",
        Order::H1 => "H1",
    }
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let env = cfg.env_or(EnvSpec::bernoulli(0.6, 0.4, Order::H0))?;
    let n = positive("n", cfg.n.unwrap_or(10_000))?;
    let reps = positive("reps", cfg.reps.unwrap_or(100_000))?;
    let seed = cfg.seed();
    let centres = match (&cfg.strategy, &cfg.grid.centres) {
        (Some(s), _) => match s.parse::<StrategySpec>()? {
            StrategySpec::Clt { centre } => vec![centre],
            other => {
                return Err(Error::Config(format!(
                    "clt experiment runs clt strategies, got `{other}`"
                )));
            }
        },
        (None, Some(c)) => c.clone(),
        (None, None) => vec![0.0, 0.5],
    };
    let summary = env.summary();
    if !summary.common_variance {
        return Err(Error::VarianceMismatch {
            left: env.left.variance(),
            right: env.right.variance(),
        });
    }
    let (hi, lo) = (summary.mu_hi, summary.mu_lo);
    let identical = env.left == env.right;
    let swapped = TabEnv::new(env.right.clone(), env.left.clone());
    let envs: Vec<&TabEnv> = if identical { vec![&env] } else { vec![&env, &swapped] };
    let bound = if hi == lo { KS_BOUND_NORMAL } else { KS_BOUND };

    let mut report = ExperimentReport::new(cfg.experiment, seed);
    let mut ks_table = Table::new("clt_ks.csv", "order,centre,alpha,beta,ks,bound");
    let mut cdf_table = Table::new("clt_cdf.csv", "order,centre,y,empirical,bandit");
    let mut rows = Vec::new();
    let mut tag = 0u64;
    for e in envs {
        let order = e.order();
        for &c in &centres {
            let strategy = StrategySpec::Clt { centre: c }.resolve(e, n)?;
            let base = sub_seed(seed, tag);
            tag += 1;
            let mut samples = (0..reps as u64)
                .into_par_iter()
                .map(|i| {
                    let out = simulate(e, &strategy, n, &mut RngStream::new(base, i))?;
                    Ok(out.t.expect("threshold strategy tracks T"))
                })
                .collect::<Result<Vec<f64>>>()?;
            let limit = BanditParams::strategic_limit(hi, lo, c, order);
            let cdf = BanditCdf::new(limit)?;
            let ks = ks_distance(&mut samples, |y| cdf.cdf(y))?;
            let label = order_name(order);
            ks_table.push(vec![
                label.into(),
                fmt_f64(c),
                fmt_f64(limit.alpha),
                fmt_f64(limit.beta),
                fmt_f64(ks),
                fmt_f64(bound),
            ]);
            let ys = cfg
                .grid
                .y
                .unwrap_or(RangeSpec::new(limit.beta - 4.0, limit.beta + 4.0, 0.1))
                .points()?;
            for y in ys {
                let empirical = samples.partition_point(|&s| s <= y) as f64 / reps as f64;
                cdf_table.push(vec![
                    label.into(),
                    fmt_f64(c),
                    fmt_f64(y),
                    fmt_f64(empirical),
                    fmt_f64(cdf.cdf(y)?),
                ]);
            }
            report.checks.push(Check::at_most(
                format!("clt_ks_{label}_c{c}"),
                ks,
                bound,
                format!(
                    "KS distance of {reps} draws of T at n = {n} to B({:.4}, {:.4}, {c})",
                    limit.alpha, limit.beta
                ),
            ));
            rows.push(json!({ "order": label, "centre": c, "alpha": limit.alpha, "beta": limit.beta, "ks": ks }));
        }
    }
    report.add_table(ks_table);
    report.add_table(cdf_table);
    report.summary = json!({ "n": n, "reps": reps, "mu_hi": hi, "mu_lo": lo, "runs": rows });
    Ok(report)
}
