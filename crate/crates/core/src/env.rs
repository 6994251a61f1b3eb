//! Reward laws, the two-armed environment and the play loop.

use std::io::{self, BufRead, Write};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fmt::fmt_f64;
use crate::rng::RngStream;
use crate::statistics::{StatParams, StatState};
use crate::strategies::{Policy, StrategyState};

const PROB_SUM_TOL: f64 = 1e-12;
const COMMON_VARIANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    /// Arm L, written `1`.
    Left,
    /// Arm R, written `2`.
    Right,
}

impl Arm {
    #[inline(always)]
    pub fn slot(self) -> usize {
        match self {
            Arm::Left => 0,
            Arm::Right => 1,
        }
    }

    /// 1 for the left arm, 2 for the right arm.
    pub fn index(self) -> u8 {
        self.slot() as u8 + 1
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Arm::Left),
            2 => Some(Arm::Right),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Arm::Left => Arm::Right,
            Arm::Right => Arm::Left,
        }
    }
}

/// Which arm carries the larger mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    /// `(mu_L, mu_R) = (mu_hi, mu_lo)`
    H0,
    /// `(mu_L, mu_R) = (mu_lo, mu_hi)`
    H1,
}

/// Finite discrete law; `cumulative` ends at exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLaw {
    values: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl FiniteLaw {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    fn sample(&self, u: f64) -> f64 {
        let i = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.values.len() - 1);
        self.values[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArmModel {
    /// Reward `+1` with probability `p`, `-1` otherwise.
    BernoulliPm1 {
        p: f64,
    },
    Gaussian {
        mean: f64,
        sd: f64,
    },
    Finite(FiniteLaw),
}

impl ArmModel {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("probability must lie in [0, 1], got {p}")));
        }
        Ok(Self::BernoulliPm1 { p })
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() || !(sd > 0.0 && sd.is_finite()) {
            return Err(invalid(format!(
                "gaussian needs finite mean and sd > 0, got ({mean}, {sd})"
            )));
        }
        Ok(Self::Gaussian { mean, sd })
    }

    pub fn finite(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(invalid("finite law needs equally many values and probabilities"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("finite law values must be finite"));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(invalid("finite law probabilities must lie in [0, 1]"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(invalid(format!("finite law probabilities sum to {total}")));
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cumulative.last_mut().expect("non-empty") = 1.0;
        Ok(Self::Finite(FiniteLaw {
            values,
            probs,
            cumulative,
        }))
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::BernoulliPm1 { p } => 2.0 * p - 1.0,
            Self::Gaussian { mean, .. } => *mean,
            Self::Finite(law) => law.values.iter().zip(&law.probs).map(|(v, p)| v * p).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::BernoulliPm1 { p } => 4.0 * p * (1.0 - p),
            Self::Gaussian { sd, .. } => sd * sd,
            Self::Finite(law) => {
                let m = self.mean();
                law.values
                    .iter()
                    .zip(&law.probs)
                    .map(|(v, p)| p * (v - m) * (v - m))
                    .sum()
            }
        }
    }

    /// One draw from the law.
    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            Self::BernoulliPm1 { p } => {
                if rng.next_f64() < *p {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::Gaussian { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            Self::Finite(law) => law.sample(rng.next_f64()),
        }
    }
}

/// Exact moments of an environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvSummary {
    pub mu_hi: f64,
    pub mu_lo: f64,
    pub var_hi: f64,
    pub var_lo: f64,
    pub common_variance: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabEnv {
    pub left: ArmModel,
    pub right: ArmModel,
}

impl TabEnv {
    pub fn new(left: ArmModel, right: ArmModel) -> Self {
        Self { left, right }
    }

    /// Bernoulli pair with `p_max` on the arm the order assigns the larger mean.
    pub fn bernoulli_ordered(p_max: f64, p_min: f64, order: Order) -> Result<Self> {
        if p_max < p_min {
            return Err(invalid(format!("p_max {p_max} below p_min {p_min}")));
        }
        let hi = ArmModel::bernoulli(p_max)?;
        let lo = ArmModel::bernoulli(p_min)?;
        Ok(match order {
            Order::H0 => Self::new(hi, lo),
            Order::H1 => Self::new(lo, hi),
        })
    }

    #[inline]
    pub fn arm(&self, arm: Arm) -> &ArmModel {
        match arm {
            Arm::Left => &self.left,
            Arm::Right => &self.right,
        }
    }

    #[inline]
    pub fn mean(&self, arm: Arm) -> f64 {
        self.arm(arm).mean()
    }

    pub fn mu_hi(&self) -> f64 {
        self.left.mean().max(self.right.mean())
    }

    pub fn mu_lo(&self) -> f64 {
        self.left.mean().min(self.right.mean())
    }

    /// H0 when the left arm has the (weakly) larger mean.
    pub fn order(&self) -> Order {
        if self.left.mean() >= self.right.mean() {
            Order::H0
        } else {
            Order::H1
        }
    }

    pub fn summary(&self) -> EnvSummary {
        let (vl, vr) = (self.left.variance(), self.right.variance());
        EnvSummary {
            mu_hi: self.mu_hi(),
            mu_lo: self.mu_lo(),
            var_hi: vl.max(vr),
            var_lo: vl.min(vr),
            common_variance: (vl - vr).abs() <= COMMON_VARIANCE_TOL,
        }
    }
}

/// One completed round, as seen by observers of [`run_policy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub arm: Arm,
    pub reward: f64,
    pub sum: f64,
    pub t: Option<f64>,
    pub t_hat: Option<f64>,
}

/// End-of-horizon summary of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub state: StrategyState,
    pub t: Option<f64>,
    pub t_hat: Option<f64>,
}

impl Outcome {
    pub fn sum(&self) -> f64 {
        self.state.total()
    }

    pub fn mean_reward(&self) -> f64 {
        self.state.total() / self.state.round as f64
    }
}

fn check_horizon<P: Policy + ?Sized>(policy: &P, n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("horizon must be at least 1"));
    }
    match policy.horizon() {
        Some(h) if h != n => Err(Error::HorizonMismatch {
            strategy: h,
            requested: n,
        }),
        _ => Ok(()),
    }
}

/// Run `policy` for `n` rounds, calling `observe` after each one.
///
/// Statistics are tracked with the policy's own parameters when it has
/// them, otherwise with `stats`. Each decision sees only rounds already
/// recorded.
pub fn run_policy<P, F>(
    env: &TabEnv,
    policy: &P,
    n: usize,
    stats: Option<StatParams>,
    rng: &mut RngStream,
    mut observe: F,
) -> Result<Outcome>
where
    P: Policy + ?Sized,
    F: FnMut(&RoundRecord),
{
    check_horizon(policy, n)?;
    let means = [env.left.mean(), env.right.mean()];
    let mut stat = policy
        .statistic_params()
        .or(stats)
        .map(|p| StatState::new(n, p))
        .transpose()?;
    let mut state = StrategyState::new();
    for round in 1..=n {
        let arm = policy.choose(&state);
        let reward = env.arm(arm).sample(rng);
        state.record(arm, reward);
        if let Some(s) = stat.as_mut() {
            *s = s.advance(reward, arm, means[arm.slot()]);
            state.t = s.t();
            state.t_hat = s.t_hat();
        }
        observe(&RoundRecord {
            round,
            arm,
            reward,
            sum: state.total(),
            t: stat.map(|s| s.t()),
            t_hat: stat.map(|s| s.t_hat()),
        });
    }
    Ok(Outcome {
        state,
        t: stat.map(|s| s.t()),
        t_hat: stat.map(|s| s.t_hat()),
    })
}

/// Run without recording anything but the end state.
pub fn simulate<P: Policy + ?Sized>(env: &TabEnv, policy: &P, n: usize, rng: &mut RngStream) -> Result<Outcome> {
    run_policy(env, policy, n, None, rng, |_| {})
}

/// Realised play record.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub arms: Vec<Arm>,
    pub rewards: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub t: Option<Vec<f64>>,
    pub t_hat: Option<Vec<f64>>,
}

pub const TRAJECTORY_CSV_HEADER: &str = "round,arm,reward,S,T,That";

impl Trajectory {
    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{TRAJECTORY_CSV_HEADER}")?;
        for i in 0..self.len() {
            let t = self.t.as_ref().map(|v| fmt_f64(v[i])).unwrap_or_default();
            let th = self.t_hat.as_ref().map(|v| fmt_f64(v[i])).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                i + 1,
                self.arms[i].index(),
                fmt_f64(self.rewards[i]),
                fmt_f64(self.partial_sums[i]),
                t,
                th
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let bad = |line: usize, what: &str| Error::InvalidParameter(format!("csv line {line}: {what}"));
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| bad(1, "missing header"))?
            .map_err(|e| bad(1, &e.to_string()))?;
        if header.trim() != TRAJECTORY_CSV_HEADER {
            return Err(bad(1, "unexpected header"));
        }
        let mut traj = Trajectory {
            arms: Vec::new(),
            rewards: Vec::new(),
            partial_sums: Vec::new(),
            t: None,
            t_hat: None,
        };
        let (mut t, mut t_hat) = (Vec::new(), Vec::new());
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| bad(lineno, &e.to_string()))?;
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(bad(lineno, "expected 6 columns"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(lineno, "bad number"));
            let arm = cols[1]
                .parse::<u8>()
                .ok()
                .and_then(Arm::from_index)
                .ok_or_else(|| bad(lineno, "bad arm"))?;
            traj.arms.push(arm);
            traj.rewards.push(num(cols[2])?);
            traj.partial_sums.push(num(cols[3])?);
            if !cols[4].is_empty() {
                t.push(num(cols[4])?);
            }
            if !cols[5].is_empty() {
                t_hat.push(num(cols[5])?);
            }
        }
        if !t.is_empty() {
            traj.t = Some(t);
        }
        if !t_hat.is_empty() {
            traj.t_hat = Some(t_hat);
        }
        Ok(traj)
    }
}

/// Play `n` rounds and keep the full record. `T` and `T̂` are filled when
/// the strategy carries statistic parameters or the arms share a variance.
pub fn play<P: Policy + ?Sized>(env: &TabEnv, strategy: &P, n: usize, rng: &mut RngStream) -> Result<Trajectory> {
    check_horizon(strategy, n)?;
    let stats = strategy.statistic_params().or_else(|| StatParams::from_env(env));
    let mut traj = Trajectory {
        arms: Vec::with_capacity(n),
        rewards: Vec::with_capacity(n),
        partial_sums: Vec::with_capacity(n),
        t: stats.map(|_| Vec::with_capacity(n)),
        t_hat: stats.map(|_| Vec::with_capacity(n)),
    };
    run_policy(env, strategy, n, stats, rng, |r| {
        traj.arms.push(r.arm);
        traj.rewards.push(r.reward);
        traj.partial_sums.push(r.sum);
        if let (Some(v), Some(t)) = (traj.t.as_mut(), r.t) {
            v.push(t);
        }
        if let (Some(v), Some(t)) = (traj.t_hat.as_mut(), r.t_hat) {
            v.push(t);
        }
    })?;
    Ok(traj)
}

/// Decisions `policy` makes when fed the recorded prefix of `traj` round by
/// round, without touching any random stream.
pub fn replay_decisions<P: Policy + ?Sized>(env: &TabEnv, policy: &P, traj: &Trajectory) -> Result<Vec<Arm>> {
    let n = traj.len();
    check_horizon(policy, n)?;
    let means = [env.left.mean(), env.right.mean()];
    let mut stat = policy
        .statistic_params()
        .or_else(|| StatParams::from_env(env))
        .map(|p| StatState::new(n, p))
        .transpose()?;
    let mut state = StrategyState::new();
    let mut out = Vec::with_capacity(n);
    for (&arm, &reward) in traj.arms.iter().zip(&traj.rewards) {
        out.push(policy.choose(&state));
        state.record(arm, reward);
        if let Some(s) = stat.as_mut() {
            *s = s.update(reward, arm, means[arm.slot()])?;
            state.t = s.t();
            state.t_hat = s.t_hat();
        }
    }
    Ok(out)
}

/// First round (1-based) whose recorded arm differs from the decision
/// recomputed from the prefix, or `None` if every decision reproduces.
pub fn audit_admissibility<P: Policy + ?Sized>(env: &TabEnv, policy: &P, traj: &Trajectory) -> Result<Option<usize>> {
    let replayed = replay_decisions(env, policy, traj)?;
    Ok(replayed.iter().zip(&traj.arms).position(|(a, b)| a != b).map(|i| i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{CltParams, StrategyKind};

    fn bern(p: f64) -> ArmModel {
        ArmModel::bernoulli(p).unwrap()
    }

    #[test]
    fn degenerate_bernoulli() {
        let arm = bern(1.0);
        let mut rng = RngStream::new(1, 0);
        assert!((0..1000).all(|_| arm.sample(&mut rng) == 1.0));
        let arm = bern(0.0);
        assert!((0..1000).all(|_| arm.sample(&mut rng) == -1.0));
    }

    #[test]
    fn sample_means() {
        let n = 1_000_000;
        let mut rng = RngStream::new(77, 0);
        let g = ArmModel::gaussian(0.0, 1.0).unwrap();
        let m: f64 = (0..n).map(|_| g.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!(m.abs() < 0.005, "gaussian mean {m}");
        let b = bern(0.6);
        let m: f64 = (0..n).map(|_| b.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((m - 0.2).abs() < 0.01, "bernoulli mean {m}");
        let f = ArmModel::finite(vec![-1.0, 0.0, 3.0], vec![0.5, 0.25, 0.25]).unwrap();
        let m: f64 = (0..n).map(|_| f.sample(&mut rng)).sum::<f64>() / n as f64;
        // exact mean 0.25, variance 2.6875
        assert!(
            (m - f.mean()).abs() < 4.0 * (f.variance() / n as f64).sqrt(),
            "finite mean {m}"
        );
    }

    #[test]
    fn exact_moments() {
        let f = ArmModel::finite(vec![-1.0, 0.0, 3.0], vec![0.5, 0.25, 0.25]).unwrap();
        assert!((f.mean() - 0.25).abs() < 1e-15);
        assert!((f.variance() - 2.6875).abs() < 1e-14);
        assert!((bern(0.6).variance() - 0.96).abs() < 1e-15);
    }

    #[test]
    fn invalid_laws_rejected() {
        assert!(ArmModel::bernoulli(1.1).is_err());
        assert!(ArmModel::bernoulli(-0.1).is_err());
        assert!(ArmModel::gaussian(0.0, 0.0).is_err());
        assert!(ArmModel::finite(vec![1.0, 2.0], vec![0.5, 0.6]).is_err());
        assert!(ArmModel::finite(vec![1.0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn summary_examples() {
        let s = TabEnv::new(bern(0.6), bern(0.4)).summary();
        assert!((s.mu_hi - 0.2).abs() < 1e-15 && (s.mu_lo + 0.2).abs() < 1e-15);
        assert!((s.var_hi - 0.96).abs() < 1e-15 && (s.var_lo - 0.96).abs() < 1e-15);
        assert!(s.common_variance);

        let g = ArmModel::gaussian(1.0, 1.0).unwrap();
        let s = TabEnv::new(g.clone(), g).summary();
        assert_eq!((s.mu_hi, s.mu_lo), (1.0, 1.0));
        assert!(s.common_variance);

        assert!(!TabEnv::new(bern(0.7), bern(0.4)).summary().common_variance);
    }

    #[test]
    fn constant_arm_play() {
        let env = TabEnv::new(bern(0.6), bern(0.4));
        let traj = play(
            &env,
            &StrategyKind::ConstantArm(Arm::Left),
            5,
            &mut RngStream::new(3, 0),
        )
        .unwrap();
        assert_eq!(traj.arms, vec![Arm::Left; 5]);
        let mut acc = 0.0;
        for (z, s) in traj.rewards.iter().zip(&traj.partial_sums) {
            acc += z;
            assert_eq!(acc, *s);
        }
    }

    #[test]
    fn gamma_play_opens_with_both_arms() {
        let env = TabEnv::new(bern(0.6), bern(0.4));
        let traj = play(&env, &StrategyKind::gamma(0.7).unwrap(), 10, &mut RngStream::new(3, 1)).unwrap();
        assert_eq!(traj.arms[0], Arm::Left);
        assert_eq!(traj.arms[1], Arm::Right);
    }

    #[test]
    fn clt_first_round_on_zero_threshold() {
        let env = TabEnv::new(bern(0.6), bern(0.4));
        let s = CltParams::new(20, 0.0, 0.2, -0.2, 0.96f64.sqrt()).unwrap();
        let traj = play(&env, &StrategyKind::Clt(s), 20, &mut RngStream::new(3, 2)).unwrap();
        assert_eq!(traj.arms[0], Arm::Left);
        assert_eq!(traj.t.as_ref().unwrap().len(), 20);
    }

    #[test]
    fn horizon_mismatch_rejected() {
        let env = TabEnv::new(bern(0.6), bern(0.4));
        let s = CltParams::new(20, 0.0, 0.2, -0.2, 0.96f64.sqrt()).unwrap();
        let err = play(&env, &StrategyKind::HatClt(s), 21, &mut RngStream::new(3, 2)).unwrap_err();
        assert_eq!(
            err,
            Error::HorizonMismatch {
                strategy: 20,
                requested: 21
            }
        );
    }

    #[test]
    fn replay_is_bit_identical() {
        let env = TabEnv::new(bern(0.55), bern(0.45));
        let strat = StrategyKind::gamma(0.5).unwrap();
        let a = play(&env, &strat, 500, &mut RngStream::new(11, 4)).unwrap();
        let b = play(&env, &strat, 500, &mut RngStream::new(11, 4)).unwrap();
        assert_eq!(a, b);
        let c = play(&env, &strat, 500, &mut RngStream::new(11, 5)).unwrap();
        assert_ne!(a.rewards, c.rewards);
    }

    #[test]
    fn csv_header_and_rows() {
        let env = TabEnv::new(bern(0.6), bern(0.4));
        let traj = play(&env, &StrategyKind::alpha(0.3).unwrap(), 7, &mut RngStream::new(1, 1)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_CSV_HEADER);
        assert_eq!(lines.len(), 8);
        assert!(lines[1].starts_with("1,1,"));
        let back = Trajectory::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, traj);
    }
}
