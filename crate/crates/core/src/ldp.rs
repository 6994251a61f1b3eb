//! Cumulant generating functions, their Legendre transforms and the rate
//! function of the averaged reward over all strategies.
//!
//! `I(x)` is `Λ*` of the higher-mean arm above `μ̄`, `Λ*` of the lower-mean
//! arm below `μ_`, and zero in between. This presumes the cumulant ordering
//! checked by [`check_mgf2`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{Arm, ArmModel, TabEnv};
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;
use crate::strategies::Policy;

const BRACKET: f64 = 50.0;
const MAX_BRACKET: f64 = 1e6;
const MGF_TOL: f64 = 1e-12;

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Atoms `(value, ln prob)` of a discrete law, zero-mass atoms dropped.
fn atoms(arm: &ArmModel) -> Option<Vec<(f64, f64)>> {
    match arm {
        ArmModel::BernoulliPm1 { p } => Some(
            [(1.0, *p), (-1.0, 1.0 - p)]
                .into_iter()
                .filter(|&(_, q)| q > 0.0)
                .map(|(v, q)| (v, q.ln()))
                .collect(),
        ),
        ArmModel::Finite(law) => Some(
            law.values()
                .iter()
                .zip(law.probs())
                .filter(|&(_, &q)| q > 0.0)
                .map(|(&v, &q)| (v, q.ln()))
                .collect(),
        ),
        ArmModel::Gaussian { .. } => None,
    }
}

/// `Λ(λ) = ln E e^{λW}`.
pub fn cgf(arm: &ArmModel, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let v = match arm {
        ArmModel::Gaussian { mean, sd } => lambda * mean + 0.5 * lambda * lambda * sd * sd,
        _ => {
            let a = atoms(arm).expect("discrete law");
            log_sum_exp(a.iter().map(|&(v, lp)| lp + lambda * v))
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!(
            "cumulant generating function at lambda = {lambda}"
        )))
    }
}

/// `Λ'(λ)`, the mean of the exponentially tilted law.
pub fn cgf_derivative(arm: &ArmModel, lambda: f64) -> f64 {
    match arm {
        ArmModel::Gaussian { mean, sd } => mean + lambda * sd * sd,
        _ => {
            let a = atoms(arm).expect("discrete law");
            let m = a
                .iter()
                .map(|&(v, lp)| lp + lambda * v)
                .fold(f64::NEG_INFINITY, f64::max);
            let (num, den) = a.iter().fold((0.0, 0.0), |(n, d), &(v, lp)| {
                let w = (lp + lambda * v - m).exp();
                (n + v * w, d + w)
            });
            num / den
        }
    }
}

/// Closed interval spanned by the support; infinite for Gaussian laws.
pub fn support_hull(arm: &ArmModel) -> (f64, f64) {
    match atoms(arm) {
        None => (f64::NEG_INFINITY, f64::INFINITY),
        Some(a) => a.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(v, _)| {
            (lo.min(v), hi.max(v))
        }),
    }
}

/// `Λ*(x) = sup_λ {λx - Λ(λ)}`, found by bisection on `Λ'(λ) = x`.
pub fn legendre(arm: &ArmModel, x: f64) -> Result<f64> {
    if !(arm.variance() > 0.0) {
        return Err(invalid("Legendre transform of a degenerate law"));
    }
    if x.is_nan() {
        return Err(Error::NonFinite("legendre argument".into()));
    }
    let (lo, hi) = support_hull(arm);
    if x < lo || x > hi {
        return Ok(f64::INFINITY);
    }
    if x == lo || x == hi {
        // sup is approached as λ → ±∞: -ln P(W = endpoint)
        let a = atoms(arm).expect("bounded support is discrete");
        let lp = log_sum_exp(a.iter().filter(|&&(v, _)| v == x).map(|&(_, lp)| lp));
        return Ok(-lp);
    }
    if x == arm.mean() {
        return Ok(0.0);
    }
    let mut bound = BRACKET;
    while !(cgf_derivative(arm, -bound) < x && cgf_derivative(arm, bound) > x) {
        bound *= 2.0;
        if bound > MAX_BRACKET {
            return Err(Error::NoSignChange(format!(
                "tilt for x = {x} beyond |lambda| = {MAX_BRACKET}"
            )));
        }
    }
    let (mut a, mut b) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if cgf_derivative(arm, mid) < x {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-15 * mid.abs().max(1.0) {
            break;
        }
    }
    let lambda = 0.5 * (a + b);
    Ok((lambda * x - cgf(arm, lambda)?).max(0.0))
}

/// Closed-form `Λ*` of a `±1` reward with success probability `p`, on `(-1, 1)`.
pub fn bernoulli_rate_closed(p: f64, x: f64) -> f64 {
    let up = 0.5 * (1.0 + x);
    let down = 0.5 * (1.0 - x);
    up * (up / p).ln() + down * (down / (1.0 - p)).ln()
}

/// Outcome of the cumulant ordering check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mgf2Check {
    pub holds: bool,
    pub first_violation: Option<f64>,
}

/// 401 points evenly spaced on `[-20, 20]`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=400).map(|i| -20.0 + 0.1 * i as f64).collect()
}

fn ordering_violation(upper: &ArmModel, lower: &ArmModel, grid: &[f64]) -> Result<Option<f64>> {
    for &lambda in grid {
        let (u, l) = (cgf(upper, lambda)?, cgf(lower, lambda)?);
        let max = u.max(l);
        let expected = if lambda >= 0.0 { u } else { l };
        if (max - expected).abs() > MGF_TOL * max.abs().max(1.0) {
            return Ok(Some(lambda));
        }
    }
    Ok(None)
}

/// Checks that the higher-mean arm has the larger cumulant for `λ >= 0` and
/// the lower-mean arm for `λ < 0`.
pub fn check_mgf2(env: &TabEnv, grid: &[f64]) -> Result<Mgf2Check> {
    let (l, r) = (&env.left, &env.right);
    let first = if l.mean() > r.mean() {
        ordering_violation(l, r, grid)?
    } else if r.mean() > l.mean() {
        ordering_violation(r, l, grid)?
    } else {
        // equal means: either labelling may serve
        match ordering_violation(l, r, grid)? {
            None => None,
            Some(v) => ordering_violation(r, l, grid)?.map(|w| v.min(w)),
        }
    };
    Ok(Mgf2Check {
        holds: first.is_none(),
        first_violation: first,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateBranch {
    Upper,
    Lower,
    Flat,
}

impl RateBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Upper => "upper",
            Self::Lower => "lower",
            Self::Flat => "flat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub x: f64,
    pub value: f64,
    pub branch: RateBranch,
}

/// `I` for one environment, with the ordering assumption checked once.
#[derive(Debug, Clone)]
pub struct RateFunction {
    upper: ArmModel,
    lower: ArmModel,
    mu_hi: f64,
    mu_lo: f64,
}

impl RateFunction {
    pub fn new(env: &TabEnv) -> Result<Self> {
        let check = check_mgf2(env, &default_lambda_grid())?;
        if let Some(lambda) = check.first_violation {
            return Err(Error::Mgf2Violated { lambda });
        }
        let (upper, lower) = if env.left.mean() >= env.right.mean() {
            (Arm::Left, Arm::Right)
        } else {
            (Arm::Right, Arm::Left)
        };
        Ok(Self {
            upper: env.arm(upper).clone(),
            lower: env.arm(lower).clone(),
            mu_hi: env.mu_hi(),
            mu_lo: env.mu_lo(),
        })
    }

    pub fn eval(&self, x: f64) -> Result<RatePoint> {
        let (value, branch) = if x > self.mu_hi {
            (legendre(&self.upper, x)?, RateBranch::Upper)
        } else if x < self.mu_lo {
            (legendre(&self.lower, x)?, RateBranch::Lower)
        } else if x.is_nan() {
            return Err(Error::NonFinite("rate function argument".into()));
        } else {
            (0.0, RateBranch::Flat)
        };
        Ok(RatePoint { x, value, branch })
    }
}

pub fn rate_function(env: &TabEnv, x: f64) -> Result<RatePoint> {
    RateFunction::new(env)?.eval(x)
}

/// `(1/n) ln P(S_n/n >= x)` for a single `±1` arm with success probability
/// `p`, summed exactly in the log domain.
pub fn binom_tail_logprob(p: f64, n: usize, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || n == 0 {
        return Err(invalid("need p in [0, 1] and n >= 1"));
    }
    let nf = n as f64;
    // S_n = 2K - n >= n x  <=>  K >= n (1 + x) / 2
    let kmin = (nf * (1.0 + x) / 2.0 - 1e-9).ceil().max(0.0) as usize;
    if kmin > n {
        return Err(Error::EmptyTail(format!("S_n/n >= {x} is impossible")));
    }
    if p == 0.0 && kmin > 0 || p == 1.0 && kmin > n {
        return Err(Error::EmptyTail(format!("zero probability at p = {p}")));
    }
    let mut ln_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let term = |k: usize| {
        let mut t = ln_fact[n] - ln_fact[k] - ln_fact[n - k];
        if k > 0 {
            t += k as f64 * lp;
        }
        if k < n {
            t += (n - k) as f64 * lq;
        }
        t
    };
    Ok(log_sum_exp((kmin..=n).map(term)) / nf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    /// `(1/n) ln` of the hit frequency; NaN when nothing hit.
    pub value: f64,
    pub hits: usize,
    pub reps: usize,
}

/// Monte Carlo `(1/n) ln P(S_n/n >= x)` under `policy`.
pub fn ldp_empirical<P: Policy + ?Sized>(
    env: &TabEnv,
    policy: &P,
    n: usize,
    x: f64,
    reps: usize,
    seed: u64,
) -> Result<TailEstimate> {
    if reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    let nf = n as f64;
    let hits = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let out = crate::env::simulate(env, policy, n, &mut RngStream::new(seed, i))?;
            Ok(usize::from(out.sum() >= nf * x - 1e-9 * nf))
        })
        .sum::<Result<usize>>()?;
    let value = if hits == 0 {
        f64::NAN
    } else {
        (hits as f64 / reps as f64).ln() / nf
    };
    Ok(TailEstimate { value, hits, reps })
}
