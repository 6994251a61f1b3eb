//! Sampling strategies as pure decision functions over the running history.
//!
//! Every rule here looks only at [`StrategyState`], which summarises rounds
//! `1..=k`, and returns the arm for round `k + 1`. None of them consume
//! randomness, so a strategy is admissible by construction: replaying the
//! recorded prefix of a trajectory reproduces every decision.

use std::fmt;
use std::str::FromStr;

use crate::env::{Arm, TabEnv};
use crate::error::{invalid, Error, Result};
use crate::statistics::StatParams;

/// Sufficient statistics of the history after `round` completed rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyState {
    pub round: usize,
    pub pulls: [usize; 2],
    pub sums: [f64; 2],
    /// Rewards summed in round order, so it equals the recorded `S` exactly.
    pub sum: f64,
    pub last: Option<(Arm, f64)>,
    /// `T_{round,n}` with true conditional means (0 when not tracked).
    pub t: f64,
    /// `T̂_{round,n}` with hypothesised means (0 when not tracked).
    pub t_hat: f64,
}

impl Default for StrategyState {
    fn default() -> Self {
        Self::new()
    }
}

impl StrategyState {
    pub fn new() -> Self {
        Self {
            round: 0,
            pulls: [0, 0],
            sums: [0.0, 0.0],
            sum: 0.0,
            last: None,
            t: 0.0,
            t_hat: 0.0,
        }
    }

    #[inline]
    pub fn pulls(&self, arm: Arm) -> usize {
        self.pulls[arm.slot()]
    }

    /// Arithmetic mean of the rewards seen on `arm`, if it has been pulled.
    #[inline]
    pub fn running_mean(&self, arm: Arm) -> Option<f64> {
        let m = self.pulls[arm.slot()];
        (m > 0).then(|| self.sums[arm.slot()] / m as f64)
    }

    #[inline]
    pub fn record(&mut self, arm: Arm, reward: f64) {
        self.round += 1;
        self.pulls[arm.slot()] += 1;
        self.sums[arm.slot()] += reward;
        self.sum += reward;
        self.last = Some((arm, reward));
    }

    pub fn total(&self) -> f64 {
        self.sum
    }
}

/// Anything that picks an arm from the strictly prior history.
pub trait Policy: Sync {
    fn choose(&self, state: &StrategyState) -> Arm;

    /// Horizon the policy was built for, when it depends on one.
    fn horizon(&self) -> Option<usize> {
        None
    }

    /// Parameters of the running statistics the policy reads, if any.
    fn statistic_params(&self) -> Option<StatParams> {
        None
    }

    fn label(&self) -> String;
}

/// Parameters of the threshold strategies built on `T` or `T̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltParams {
    pub horizon: usize,
    pub centre: f64,
    pub mu_hi: f64,
    pub mu_lo: f64,
    pub sigma: f64,
}

impl CltParams {
    pub fn new(horizon: usize, centre: f64, mu_hi: f64, mu_lo: f64, sigma: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("horizon must be at least 1"));
        }
        if !(centre.is_finite() && mu_hi.is_finite() && mu_lo.is_finite()) {
            return Err(invalid("centre and means must be finite"));
        }
        if mu_lo > mu_hi {
            return Err(invalid(format!("mu_lo {mu_lo} exceeds mu_hi {mu_hi}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self {
            horizon,
            centre,
            mu_hi,
            mu_lo,
            sigma,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyKind {
    ConstantArm(Arm),
    GammaLln { gamma: f64 },
    Clt(CltParams),
    HatClt(CltParams),
    ProportionAlpha { alpha: f64 },
}

impl StrategyKind {
    pub fn gamma(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(invalid(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        Ok(Self::GammaLln { gamma })
    }

    pub fn alpha(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(Self::ProportionAlpha { alpha })
    }
}

impl Policy for StrategyKind {
    #[inline]
    fn choose(&self, state: &StrategyState) -> Arm {
        match *self {
            Self::ConstantArm(arm) => arm,
            Self::GammaLln { gamma } => decide_gamma(state, gamma),
            Self::Clt(p) => decide_clt(state.t, state.round + 1, p.horizon, p.centre, p.mu_hi, p.mu_lo),
            Self::HatClt(p) => decide_hat_clt(state.t_hat, state.round + 1, p.horizon, p.centre, p.mu_hi, p.mu_lo),
            Self::ProportionAlpha { alpha } => decide_alpha(state, alpha, state.round + 1),
        }
    }

    fn horizon(&self) -> Option<usize> {
        match self {
            Self::Clt(p) | Self::HatClt(p) => Some(p.horizon),
            _ => None,
        }
    }

    fn statistic_params(&self) -> Option<StatParams> {
        match self {
            Self::Clt(p) | Self::HatClt(p) => Some(StatParams {
                sigma: p.sigma,
                mu_hi: p.mu_hi,
                mu_lo: p.mu_lo,
            }),
            _ => None,
        }
    }

    fn label(&self) -> String {
        match self {
            Self::ConstantArm(arm) => format!("arm:{}", arm.index()),
            Self::GammaLln { gamma } => format!("gamma:{gamma}"),
            Self::Clt(p) => format!("clt:c={}", p.centre),
            Self::HatClt(p) => format!("hatclt:c={}", p.centre),
            Self::ProportionAlpha { alpha } => format!("alpha:{alpha}"),
        }
    }
}

/// Rounds 1, 2 and every `2^i - 1`, `2^i` with `i > 1` are forced
/// exploration rounds of the gamma strategy.
#[inline]
pub fn is_forced_round(k: usize) -> bool {
    k == 1 || k == 2 || (k >= 3 && ((k + 1).is_power_of_two() || k.is_power_of_two()))
}

/// Strong-LLN strategy: forced exploration on a doubling schedule, otherwise
/// keep the fraction of pulls on the empirically better arm near `gamma`.
///
/// Ties between running means go to the left arm.
#[inline]
pub fn decide_gamma(state: &StrategyState, gamma: f64) -> Arm {
    let k = state.round + 1;
    if k == 1 {
        return Arm::Left;
    }
    if k == 2 {
        return Arm::Right;
    }
    if (k + 1).is_power_of_two() {
        return Arm::Left;
    }
    if k.is_power_of_two() {
        return Arm::Right;
    }
    let prev = (k - 1) as f64;
    let (mean_l, mean_r) = match (state.running_mean(Arm::Left), state.running_mean(Arm::Right)) {
        (Some(l), Some(r)) => (l, r),
        _ => panic!("gamma strategy reached round {k} without pulling both arms"),
    };
    if mean_l >= mean_r {
        if (state.pulls[0] as f64) / prev < gamma {
            Arm::Left
        } else {
            Arm::Right
        }
    } else if (state.pulls[1] as f64) / prev < gamma {
        Arm::Right
    } else {
        Arm::Left
    }
}

/// Threshold that `T_{m-1,n}` is compared against at round `m`.
#[inline]
pub fn clt_threshold(m: usize, n: usize, centre: f64, mu_hi: f64, mu_lo: f64) -> f64 {
    centre - (1.0 - (m as f64 - 1.0) / n as f64) * (mu_hi + mu_lo) / 2.0
}

/// Arm 1 iff `T_{m-1,n} <= c - (1 - (m-1)/n)(mu_hi + mu_lo)/2`.
#[inline]
pub fn decide_clt(t_prev: f64, m: usize, n: usize, centre: f64, mu_hi: f64, mu_lo: f64) -> Arm {
    if t_prev <= clt_threshold(m, n, centre, mu_hi, mu_lo) {
        Arm::Left
    } else {
        Arm::Right
    }
}

/// Same rule as [`decide_clt`] driven by the hypothesised-mean statistic.
#[inline]
pub fn decide_hat_clt(t_hat_prev: f64, m: usize, n: usize, centre: f64, mu_hi: f64, mu_lo: f64) -> Arm {
    decide_clt(t_hat_prev, m, n, centre, mu_hi, mu_lo)
}

/// Deterministic proportional filler: arm 1 whenever its share of past
/// pulls is below `alpha`.
#[inline]
pub fn decide_alpha(state: &StrategyState, alpha: f64, n_next: usize) -> Arm {
    match n_next {
        1 => Arm::Left,
        2 => Arm::Right,
        3 => {
            if 0.5 < alpha {
                Arm::Left
            } else {
                Arm::Right
            }
        }
        _ => {
            if (state.pulls[0] as f64) / ((n_next - 1) as f64) < alpha {
                Arm::Left
            } else {
                Arm::Right
            }
        }
    }
}

/// Strategy as written in configs and on the command line, before the
/// environment fills in horizon, means and sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategySpec {
    Arm(Arm),
    Gamma(f64),
    Clt { centre: f64 },
    HatClt { centre: f64 },
    Alpha(f64),
}

impl StrategySpec {
    pub fn resolve(&self, env: &TabEnv, horizon: usize) -> Result<StrategyKind> {
        match *self {
            Self::Arm(arm) => Ok(StrategyKind::ConstantArm(arm)),
            Self::Gamma(g) => StrategyKind::gamma(g),
            Self::Alpha(a) => StrategyKind::alpha(a),
            Self::Clt { centre } | Self::HatClt { centre } => {
                let s = env.summary();
                if !s.common_variance {
                    return Err(Error::VarianceMismatch {
                        left: env.left.variance(),
                        right: env.right.variance(),
                    });
                }
                let p = CltParams::new(horizon, centre, s.mu_hi, s.mu_lo, s.var_hi.sqrt())?;
                Ok(match self {
                    Self::Clt { .. } => StrategyKind::Clt(p),
                    _ => StrategyKind::HatClt(p),
                })
            }
        }
    }
}

fn parse_centre(arg: Option<&str>) -> Result<f64> {
    let Some(arg) = arg else { return Ok(0.0) };
    let v = arg.strip_prefix("c=").unwrap_or(arg);
    v.parse::<f64>().map_err(|_| invalid(format!("bad centre '{arg}'")))
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let number = |what: &str| -> Result<f64> {
            let a = arg.ok_or_else(|| invalid(format!("strategy '{name}' needs a {what}")))?;
            a.parse::<f64>().map_err(|_| invalid(format!("bad {what} '{a}'")))
        };
        match name {
            "arm" => match arg {
                Some("1") => Ok(Self::Arm(Arm::Left)),
                Some("2") => Ok(Self::Arm(Arm::Right)),
                _ => Err(invalid("arm strategy takes 1 or 2")),
            },
            "gamma" => {
                let g = number("gamma")?;
                StrategyKind::gamma(g)?;
                Ok(Self::Gamma(g))
            }
            "alpha" => {
                let a = number("alpha")?;
                StrategyKind::alpha(a)?;
                Ok(Self::Alpha(a))
            }
            "clt" => Ok(Self::Clt {
                centre: parse_centre(arg)?,
            }),
            "hatclt" => Ok(Self::HatClt {
                centre: parse_centre(arg)?,
            }),
            _ => Err(invalid(format!("unknown strategy '{s}'"))),
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Arm(a) => write!(f, "arm:{}", a.index()),
            Self::Gamma(g) => write!(f, "gamma:{g}"),
            Self::Clt { centre } => write!(f, "clt:c={centre}"),
            Self::HatClt { centre } => write!(f, "hatclt:c={centre}"),
            Self::Alpha(a) => write!(f, "alpha:{a}"),
        }
    }
}
