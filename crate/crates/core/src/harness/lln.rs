//! Averaged reward of the gamma strategy against `h = γμ̄ + (1-γ)μ_`.

use rayon::prelude::*;
use serde_json::json;

use super::config::{EnvSpec, ExperimentConfig};
use super::positive;
use super::report::{sub_seed, Check, ExperimentReport, Table};
use crate::env::{simulate, Order};
use crate::error::Result;
use crate::fmt::fmt_f64;
use crate::rng::RngStream;
use crate::strategies::StrategyKind;

const TOL: f64 = 0.02;
const PASS_FRACTION: f64 = 0.95;

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let env = cfg.env_or(EnvSpec::bernoulli(0.6, 0.4, Order::H0))?;
    let n = positive("n", cfg.n.unwrap_or(1_000_000))?;
    let reps = positive("reps", cfg.reps.unwrap_or(100))?;
    let seed = cfg.seed();
    let (hi, lo) = (env.mu_hi(), env.mu_lo());
    let mut report = ExperimentReport::new(cfg.experiment, seed);

    let degenerate = hi == lo;
    if degenerate {
        report
            .warnings
            .push("arms share one mean; the gamma strategy is simulated but nothing is asserted".into());
    }
    let fair = (!degenerate && lo <= 0.0 && hi >= 0.0).then(|| lo / (lo - hi));
    // (gamma, is the fair-game row); user lists are taken as plain gammas
    let gammas: Vec<(f64, bool)> = match &cfg.grid.gammas {
        Some(g) => g.iter().map(|&g| (g, false)).collect(),
        None => {
            let mut g = vec![(0.0, false), (0.25, false), (0.5, false)];
            match fair {
                Some(f) => g.push((f, true)),
                None => report
                    .warnings
                    .push("zero is outside [mu_lo, mu_hi]; the fair-game gamma is skipped".into()),
            }
            g.push((1.0, false));
            g
        }
    };

    let mut table = Table::new("lln.csv", "gamma,h,seed_index,mean_reward,abs_error");
    let mut rows = Vec::new();
    for (k, &(gamma, is_fair)) in gammas.iter().enumerate() {
        let strategy = StrategyKind::gamma(gamma)?;
        let h = gamma * hi + (1.0 - gamma) * lo;
        let base = sub_seed(seed, k as u64);
        let means = (0..reps as u64)
            .into_par_iter()
            .map(|i| Ok(simulate(&env, &strategy, n, &mut RngStream::new(base, i))?.mean_reward()))
            .collect::<Result<Vec<f64>>>()?;
        let within = means.iter().filter(|m| (*m - h).abs() <= TOL).count();
        let fraction = within as f64 / reps as f64;
        for (i, m) in means.iter().enumerate() {
            table.push(vec![
                fmt_f64(gamma),
                fmt_f64(h),
                i.to_string(),
                fmt_f64(*m),
                fmt_f64((m - h).abs()),
            ]);
        }
        let name = if is_fair {
            "lln_gamma_fair".to_string()
        } else {
            format!("lln_gamma_{gamma}")
        };
        if !degenerate {
            report.checks.push(Check::at_least(
                name,
                fraction,
                PASS_FRACTION,
                format!("fraction of {reps} seeds with |S_n/n - {h:.6}| <= {TOL} at n = {n}"),
            ));
        }
        rows.push(json!({ "gamma": gamma, "h": h, "fraction_within": fraction, "fair": is_fair }));
    }
    report.add_table(table);
    report.summary = json!({ "n": n, "reps": reps, "mu_hi": hi, "mu_lo": lo, "gammas": rows });
    Ok(report)
}
