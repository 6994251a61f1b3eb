//! Testing `H0: (μ_L, μ_R) = (μ̄, μ_)` against the swapped order.
//!
//! The strategic test plays the hypothesised-mean threshold strategy with
//! centre 0 and rejects when `|T̂_{n,n}| > z_α`. The traditional test pulls
//! arm 1 only and rejects when `|M_n| > u_{α/2}`. Only the symmetric case
//! `μ̄ = -μ_` is implemented.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banditdist::{abs_interval_h0, abs_interval_h1};
use crate::env::{simulate, Arm, TabEnv};
use crate::error::{invalid, Error, Result};
use crate::normal::{normal_cdf, normal_quantile};
use crate::rng::RngStream;
use crate::strategies::{CltParams, StrategyKind};

const SYMMETRY_TOL: f64 = 1e-12;
const BISECTION_HI: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    pub mu_hi: f64,
    pub mu_lo: f64,
    pub sigma: f64,
    pub horizon: usize,
    pub level: f64,
}

impl TestSpec {
    pub fn new(mu_hi: f64, mu_lo: f64, sigma: f64, horizon: usize, level: f64) -> Result<Self> {
        if !(mu_hi >= 0.0 && mu_hi.is_finite()) {
            return Err(invalid(format!("mu_hi must be finite and non-negative, got {mu_hi}")));
        }
        if (mu_hi + mu_lo).abs() > SYMMETRY_TOL {
            return Err(invalid(format!(
                "only mu_hi = -mu_lo is supported, got ({mu_hi}, {mu_lo})"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("sigma must be positive, got {sigma}")));
        }
        if horizon == 0 {
            return Err(invalid("horizon must be at least 1"));
        }
        if !(level > 0.0 && level < 0.5) {
            return Err(invalid(format!("level must lie in (0, 0.5), got {level}")));
        }
        Ok(Self {
            mu_hi,
            mu_lo,
            sigma,
            horizon,
            level,
        })
    }

    /// `±1` rewards with success probabilities `p_max` and `1 - p_max`.
    pub fn bernoulli(p_max: f64, horizon: usize, level: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&p_max) {
            return Err(invalid(format!("p_max must lie in [0.5, 1], got {p_max}")));
        }
        let mu = 2.0 * p_max - 1.0;
        let sigma = 2.0 * (p_max * (1.0 - p_max)).sqrt();
        Self::new(mu, -mu, sigma, horizon, level)
    }

    pub fn with_horizon(mut self, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("horizon must be at least 1"));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn strategic_critical_value(&self) -> Result<f64> {
        critical_value_strategic(self.level, self.mu_hi)
    }

    pub fn traditional_critical_value(&self) -> Result<f64> {
        critical_value_traditional(self.level)
    }

    pub fn power_strategic(&self) -> Result<f64> {
        let z = self.strategic_critical_value()?;
        power_strategic(self.horizon, self.sigma, self.mu_hi, self.mu_lo, z)
    }

    pub fn power_traditional(&self) -> Result<f64> {
        let u = self.traditional_critical_value()?;
        Ok(power_traditional(self.horizon, self.sigma, self.mu_hi, u))
    }

    fn strategy(&self) -> Result<StrategyKind> {
        Ok(StrategyKind::HatClt(CltParams::new(
            self.horizon,
            0.0,
            self.mu_hi,
            self.mu_lo,
            self.sigma,
        )?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Strategic,
    Traditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    RejectH0,
    FailToReject,
}

impl Decision {
    pub fn from_statistic(statistic: f64, critical: f64) -> Self {
        if statistic.abs() > critical {
            Self::RejectH0
        } else {
            Self::FailToReject
        }
    }

    pub fn rejects(self) -> bool {
        self == Self::RejectH0
    }
}

/// Monte Carlo rejection frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RejectionRate {
    pub rate: f64,
    pub std_error: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: TestKind,
    pub statistic: f64,
    pub critical_value: f64,
    pub decision: Decision,
    pub analytic_power: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<RejectionRate>,
}

/// `z_α` solving `Φ(μ̄ + z) - e^{-2μ̄z} Φ(μ̄ - z) = 1 - α`, by bisection on `[0, 20]`.
pub fn critical_value_strategic(level: f64, mu_hi: f64) -> Result<f64> {
    if !(level > 0.0 && level < 0.5) {
        return Err(invalid(format!("level must lie in (0, 0.5), got {level}")));
    }
    if !(mu_hi >= 0.0 && mu_hi.is_finite()) {
        return Err(Error::NoSignChange(format!("mu_hi = {mu_hi}")));
    }
    let target = 1.0 - level;
    let excess = |z: f64| -> Result<f64> {
        if z == 0.0 {
            Ok(-target)
        } else {
            Ok(abs_interval_h0(mu_hi, z)? - target)
        }
    };
    let (mut lo, mut hi) = (0.0, BISECTION_HI);
    if excess(hi)? < 0.0 {
        return Err(Error::NoSignChange(format!(
            "no root below {BISECTION_HI} for mu_hi = {mu_hi}"
        )));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `u_{α/2}` with `Φ(u) = 1 - α/2`.
pub fn critical_value_traditional(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!("level must lie in (0, 1), got {level}")));
    }
    normal_quantile(1.0 - level / 2.0)
}

/// Approximate power of the strategic test at horizon `n`.
pub fn power_strategic(n: usize, sigma: f64, mu_hi: f64, mu_lo: f64, z: f64) -> Result<f64> {
    Ok(1.0 - abs_interval_h1(n, sigma, mu_hi, mu_lo, z)?)
}

/// Power of the single-arm test, `1 - Φ(2μ̄√n/σ + u) + Φ(2μ̄√n/σ - u)`.
pub fn power_traditional(n: usize, sigma: f64, mu_hi: f64, u: f64) -> f64 {
    let shift = 2.0 * mu_hi * (n as f64).sqrt() / sigma;
    1.0 - normal_cdf(shift + u) + normal_cdf(shift - u)
}

fn check_env(env: &TabEnv) -> Result<()> {
    let s = env.summary();
    if !s.common_variance {
        return Err(Error::VarianceMismatch {
            left: env.left.variance(),
            right: env.right.variance(),
        });
    }
    Ok(())
}

fn strategic_statistic(env: &TabEnv, strategy: &StrategyKind, spec: &TestSpec, rng: &mut RngStream) -> Result<f64> {
    let out = simulate(env, strategy, spec.horizon, rng)?;
    Ok(out.t_hat.expect("threshold strategy tracks T-hat"))
}

fn traditional_statistic(env: &TabEnv, spec: &TestSpec, rng: &mut RngStream) -> Result<f64> {
    let out = simulate(env, &StrategyKind::ConstantArm(Arm::Left), spec.horizon, rng)?;
    let n = spec.horizon as f64;
    Ok((out.sum() - n * spec.mu_hi) / (spec.sigma * n.sqrt()))
}

/// One run of the strategic test on `env`.
pub fn run_strategic_test(env: &TabEnv, spec: &TestSpec, rng: &mut RngStream) -> Result<TestReport> {
    check_env(env)?;
    let z = spec.strategic_critical_value()?;
    let statistic = strategic_statistic(env, &spec.strategy()?, spec, rng)?;
    Ok(TestReport {
        test: TestKind::Strategic,
        statistic,
        critical_value: z,
        decision: Decision::from_statistic(statistic, z),
        analytic_power: spec.power_strategic()?,
        empirical: None,
    })
}

/// One run of the single-arm test on `env`.
pub fn run_traditional_test(env: &TabEnv, spec: &TestSpec, rng: &mut RngStream) -> Result<TestReport> {
    let u = spec.traditional_critical_value()?;
    let statistic = traditional_statistic(env, spec, rng)?;
    Ok(TestReport {
        test: TestKind::Traditional,
        statistic,
        critical_value: u,
        decision: Decision::from_statistic(statistic, u),
        analytic_power: spec.power_traditional()?,
        empirical: None,
    })
}

/// Rejection frequency over `reps` runs; run `i` draws from stream `i` of `seed`.
pub fn rejection_rate(env: &TabEnv, spec: &TestSpec, kind: TestKind, reps: usize, seed: u64) -> Result<RejectionRate> {
    if reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    let rejections = match kind {
        TestKind::Strategic => {
            check_env(env)?;
            let z = spec.strategic_critical_value()?;
            let strategy = spec.strategy()?;
            (0..reps as u64)
                .into_par_iter()
                .map(|i| {
                    let t = strategic_statistic(env, &strategy, spec, &mut RngStream::new(seed, i))?;
                    Ok(usize::from(t.abs() > z))
                })
                .sum::<Result<usize>>()?
        }
        TestKind::Traditional => {
            let u = spec.traditional_critical_value()?;
            (0..reps as u64)
                .into_par_iter()
                .map(|i| {
                    let m = traditional_statistic(env, spec, &mut RngStream::new(seed, i))?;
                    Ok(usize::from(m.abs() > u))
                })
                .sum::<Result<usize>>()?
        }
    };
    let rate = rejections as f64 / reps as f64;
    Ok(RejectionRate {
        rate,
        std_error: (rate * (1.0 - rate) / reps as f64).sqrt(),
        reps,
    })
}
