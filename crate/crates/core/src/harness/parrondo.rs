//! Frequency of `S_n/n >= μ̄ + ε` over a battery of strategies, including
//! history-driven switchers. A finite battery can only falsify the bound.

use rayon::prelude::*;
use serde_json::json;

use super::config::{EnvSpec, ExperimentConfig};
use super::positive;
use super::report::{sub_seed, Check, ExperimentReport, Table};
use crate::env::{simulate, Arm, ArmModel, Order, TabEnv};
use crate::error::Result;
use crate::fmt::fmt_f64;
use crate::ldp::binom_tail_logprob;
use crate::rng::RngStream;
use crate::strategies::{Policy, StrategyKind, StrategySpec, StrategyState};

const FREQ_BOUND: f64 = 0.01;
const SEEDED_SWITCHERS: u64 = 5;

/// History-driven rules outside the CLT and proportion families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Switcher {
    /// Repeat the last arm after a positive reward, switch otherwise.
    WinStayLoseShift,
    /// Try each arm once, then follow the higher running mean.
    Greedy,
    /// Try each arm once, then follow the lower running mean.
    Contrarian,
    /// Arm picked by hashing the round, last arm, last reward sign and pull count.
    Seeded(u64),
}

fn unexplored(state: &StrategyState) -> Option<Arm> {
    [Arm::Left, Arm::Right].into_iter().find(|&a| state.pulls(a) == 0)
}

impl Policy for Switcher {
    fn choose(&self, state: &StrategyState) -> Arm {
        match *self {
            Self::WinStayLoseShift => match state.last {
                None => Arm::Left,
                Some((arm, r)) if r > 0.0 => arm,
                Some((arm, _)) => arm.other(),
            },
            Self::Greedy | Self::Contrarian => {
                if let Some(a) = unexplored(state) {
                    return a;
                }
                let l = state.running_mean(Arm::Left).expect("pulled");
                let r = state.running_mean(Arm::Right).expect("pulled");
                let left_better = l >= r;
                if left_better == (*self == Self::Greedy) {
                    Arm::Left
                } else {
                    Arm::Right
                }
            }
            Self::Seeded(seed) => {
                let key = match state.last {
                    None => 0,
                    Some((arm, r)) => 1 + 2 * arm.slot() as u64 + u64::from(r > 0.0) * 4,
                };
                let word = RngStream::output(
                    seed,
                    key,
                    (state.round as u64) << 20 | state.pulls(Arm::Left) as u64 & 0xfffff,
                );
                if word >> 63 == 0 {
                    Arm::Left
                } else {
                    Arm::Right
                }
            }
        }
    }

    fn label(&self) -> String {
        match self {
            Self::WinStayLoseShift => "switch:win_stay_lose_shift".into(),
            Self::Greedy => "switch:greedy".into(),
            Self::Contrarian => "switch:contrarian".into(),
            Self::Seeded(s) => format!("switch:seeded:{s}"),
        }
    }
}

enum Member {
    Kind(StrategyKind),
    Switch(Switcher),
}

impl Member {
    fn policy(&self) -> &dyn Policy {
        match self {
            Self::Kind(k) => k,
            Self::Switch(s) => s,
        }
    }
}

fn battery(env: &TabEnv, n: usize, seed: u64, extra: Option<&str>) -> Result<(Vec<Member>, Vec<String>)> {
    let mut members = vec![
        Member::Kind(StrategyKind::ConstantArm(Arm::Left)),
        Member::Kind(StrategyKind::ConstantArm(Arm::Right)),
    ];
    for g in [0.0, 0.5, 1.0] {
        members.push(Member::Kind(StrategyKind::gamma(g)?));
    }
    for a in [0.0, 0.5, 1.0] {
        members.push(Member::Kind(StrategyKind::alpha(a)?));
    }
    let mut skipped = Vec::new();
    for spec in [StrategySpec::Clt { centre: 0.0 }, StrategySpec::HatClt { centre: 0.0 }] {
        match spec.resolve(env, n) {
            Ok(k) => members.push(Member::Kind(k)),
            Err(e) => skipped.push(format!("{spec} skipped: {e}")),
        }
    }
    members.push(Member::Switch(Switcher::WinStayLoseShift));
    members.push(Member::Switch(Switcher::Greedy));
    members.push(Member::Switch(Switcher::Contrarian));
    for k in 0..SEEDED_SWITCHERS {
        members.push(Member::Switch(Switcher::Seeded(sub_seed(seed, 1000 + k))));
    }
    if let Some(s) = extra {
        members.push(Member::Kind(s.parse::<StrategySpec>()?.resolve(env, n)?));
    }
    Ok((members, skipped))
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let env = cfg.env_or(EnvSpec::bernoulli(0.6, 0.4, Order::H0))?;
    let n = positive("n", cfg.n.unwrap_or(10_000))?;
    let reps = positive("reps", cfg.reps.unwrap_or(10_000))?;
    let eps = cfg.grid.epsilon.unwrap_or(0.05);
    let seed = cfg.seed();
    let hi = env.mu_hi();
    let mut report = ExperimentReport::new(cfg.experiment, seed);
    let (members, skipped) = battery(&env, n, seed, cfg.strategy.as_deref())?;
    report.warnings.extend(skipped);
    report.notes.push(
        "the battery is finite: it can falsify the bound but not certify the supremum over all strategies".into(),
    );

    let nf = n as f64;
    let hits = |sums: &[f64], t: f64| sums.iter().filter(|&&s| s >= nf * t - 1e-9 * nf).count();
    let mut table = Table::new("parrondo.csv", "strategy,epsilon,hits,reps,frequency");
    let (mut worst, mut worst_label, mut unit_hits) = (0.0f64, String::new(), 0usize);
    let mut arm1_freq = None;
    for (k, m) in members.iter().enumerate() {
        let policy = m.policy();
        let base = sub_seed(seed, k as u64);
        let sums = (0..reps as u64)
            .into_par_iter()
            .map(|i| Ok(simulate(&env, policy, n, &mut RngStream::new(base, i))?.sum()))
            .collect::<Result<Vec<f64>>>()?;
        let label = policy.label();
        for e in [eps, 1.0] {
            let h = hits(&sums, hi + e);
            let freq = h as f64 / reps as f64;
            table.push(vec![
                label.clone(),
                fmt_f64(e),
                h.to_string(),
                reps.to_string(),
                fmt_f64(freq),
            ]);
            if e == 1.0 {
                unit_hits += h;
            } else if freq > worst || worst_label.is_empty() {
                worst = worst.max(freq);
                worst_label = label.clone();
            }
            if e == eps && matches!(m, Member::Kind(StrategyKind::ConstantArm(Arm::Left))) {
                arm1_freq = Some(freq);
            }
        }
    }
    report.add_table(table);
    report.checks.push(Check::at_most(
        "parrondo_max_frequency",
        worst,
        FREQ_BOUND,
        format!(
            "largest frequency of S_n/n >= mu_hi + {eps} over {} strategies ({worst_label})",
            members.len()
        ),
    ));
    let bounded = [&env.left, &env.right]
        .iter()
        .all(|a| matches!(a, ArmModel::BernoulliPm1 { .. }));
    if bounded && hi + 1.0 > 1.0 {
        report.checks.push(Check::at_most(
            "parrondo_unit_epsilon",
            unit_hits as f64,
            0.0,
            "hits of S_n/n >= mu_hi + 1, impossible for rewards bounded by 1",
        ));
    }
    if let (ArmModel::BernoulliPm1 { p }, Some(freq)) = (&env.left, arm1_freq) {
        let x = hi + eps;
        let exact = if x <= 1.0 {
            binom_tail_logprob(*p, n, x).map(|v| (v * nf).exp()).unwrap_or(0.0)
        } else {
            0.0
        };
        let allowance = 3.0 * (exact * (1.0 - exact) / reps as f64).sqrt() + 1.0 / reps as f64;
        report.checks.push(Check::at_most(
            "parrondo_single_arm",
            (freq - exact).abs(),
            allowance,
            format!("arm 1 frequency against the exact binomial tail {exact:.3e}"),
        ));
    }
    report.summary = json!({
        "n": n,
        "reps": reps,
        "epsilon": eps,
        "members": members.iter().map(|m| m.policy().label()).collect::<Vec<_>>(),
        "max_frequency": worst,
    });
    Ok(report)
}
