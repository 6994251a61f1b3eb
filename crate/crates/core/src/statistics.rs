//! Running reward statistics along a trajectory.
//!
//! For horizon `n` and common reward standard deviation `sigma`:
//!
//! ```text
//! T_m  = T_{m-1}  + Z_m / n + (Z_m - E[Z_m | history]) / (sigma * sqrt(n))
//! T̂_m  = T̂_{m-1}  + Z_m / n + (Z_m - mu_hyp(arm_m))   / (sigma * sqrt(n))
//! ```
//!
//! with `T_0 = T̂_0 = 0`. The conditional mean is the true mean of the arm
//! pulled; the hypothesised mean assigns `mu_hi` to arm 1 and `mu_lo` to
//! arm 2. Sums run in round order with no reordering.

use crate::env::{Arm, TabEnv};
use crate::error::{invalid, Error, Result};

/// Scale and hypothesised means used by `T` and `T̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatParams {
    pub sigma: f64,
    pub mu_hi: f64,
    pub mu_lo: f64,
}

impl StatParams {
    /// Parameters read off an environment with a common variance.
    pub fn from_env(env: &TabEnv) -> Option<Self> {
        let s = env.summary();
        (s.common_variance && s.var_hi > 0.0).then(|| Self {
            sigma: s.var_hi.sqrt(),
            mu_hi: s.mu_hi,
            mu_lo: s.mu_lo,
        })
    }
}

/// `E[Z_m | H_{m-1}]`: the true mean of the arm pulled at round `m`.
#[inline]
pub fn cond_mean(env: &TabEnv, arm: Arm) -> f64 {
    env.mean(arm)
}

/// Mean of `arm` under the order hypothesis `(mu_L, mu_R) = (mu_hi, mu_lo)`.
#[inline]
pub fn hyp_mean(mu_hi: f64, mu_lo: f64, arm: Arm) -> f64 {
    match arm {
        Arm::Left => mu_hi,
        Arm::Right => mu_lo,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatState {
    horizon: usize,
    round: usize,
    sum: f64,
    t: f64,
    t_hat: f64,
    params: StatParams,
    inv_n: f64,
    inv_scale: f64,
}

impl StatState {
    pub fn new(horizon: usize, params: StatParams) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("horizon must be at least 1"));
        }
        if !(params.sigma > 0.0 && params.sigma.is_finite()) {
            return Err(invalid(format!("sigma must be positive, got {}", params.sigma)));
        }
        Ok(Self {
            horizon,
            round: 0,
            sum: 0.0,
            t: 0.0,
            t_hat: 0.0,
            params,
            inv_n: 1.0 / horizon as f64,
            inv_scale: 1.0 / (params.sigma * (horizon as f64).sqrt()),
        })
    }

    /// Advance by one round: reward `reward` from `arm`, whose true mean is
    /// `cond_mean`. Updates `S`, `T` and `T̂` together.
    #[inline]
    pub fn update(self, reward: f64, arm: Arm, cond_mean: f64) -> Result<Self> {
        if self.round >= self.horizon {
            return Err(Error::HorizonExceeded(self.horizon));
        }
        Ok(self.advance(reward, arm, cond_mean))
    }

    // Unchecked step for the simulation loop, which never runs past the horizon.
    #[inline(always)]
    pub(crate) fn advance(mut self, reward: f64, arm: Arm, cond_mean: f64) -> Self {
        let mean_term = reward * self.inv_n;
        let hyp = hyp_mean(self.params.mu_hi, self.params.mu_lo, arm);
        self.round += 1;
        self.sum += reward;
        self.t += mean_term + (reward - cond_mean) * self.inv_scale;
        self.t_hat += mean_term + (reward - hyp) * self.inv_scale;
        self
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// `S_m`, the running reward sum.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn t_hat(&self) -> f64 {
        self.t_hat
    }

    pub fn params(&self) -> StatParams {
        self.params
    }
}

/// `T_{n,n}` and `T̂_{n,n}` recomputed in closed form from the whole record,
/// `(1/n) sum Z + (1/(sigma sqrt n)) sum (Z - mean)`.
pub fn recompute_statistics(
    arms: &[Arm],
    rewards: &[f64],
    true_means: [f64; 2],
    params: StatParams,
) -> Result<(f64, f64)> {
    if arms.len() != rewards.len() || arms.is_empty() {
        return Err(invalid("arms and rewards must be non-empty and of equal length"));
    }
    let n = arms.len() as f64;
    let sum: f64 = rewards.iter().sum();
    let centred_true: f64 = arms.iter().zip(rewards).map(|(a, z)| z - true_means[a.slot()]).sum();
    let centred_hyp: f64 = arms
        .iter()
        .zip(rewards)
        .map(|(&a, z)| z - hyp_mean(params.mu_hi, params.mu_lo, a))
        .sum();
    let scale = params.sigma * n.sqrt();
    Ok((sum / n + centred_true / scale, sum / n + centred_hyp / scale))
}

/// Single-arm statistic `M_n = (1/(sigma sqrt n)) sum (Z_i - mu_hi)`.
pub fn traditional_m(arms: &[Arm], rewards: &[f64], mu_hi: f64, sigma: f64) -> Result<f64> {
    if arms.len() != rewards.len() || arms.is_empty() {
        return Err(invalid("arms and rewards must be non-empty and of equal length"));
    }
    if !(sigma > 0.0) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    if arms.iter().any(|&a| a != Arm::Left) {
        return Err(Error::MixedArms);
    }
    let centred: f64 = rewards.iter().map(|z| z - mu_hi).sum();
    Ok(centred / (sigma * (rewards.len() as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ArmModel;

    fn params(sigma: f64, mu_hi: f64, mu_lo: f64) -> StatParams {
        StatParams { sigma, mu_hi, mu_lo }
    }

    #[test]
    fn means() {
        let env = TabEnv::new(ArmModel::bernoulli(0.6).unwrap(), ArmModel::bernoulli(0.4).unwrap());
        assert!((cond_mean(&env, Arm::Left) - 0.2).abs() < 1e-15);
        assert!((cond_mean(&env, Arm::Right) + 0.2).abs() < 1e-15);
        for arm in [Arm::Left, Arm::Right] {
            assert_eq!(cond_mean(&env, arm), hyp_mean(env.mu_hi(), env.mu_lo(), arm));
        }
        assert_eq!(hyp_mean(0.3, 0.3, Arm::Left), hyp_mean(0.3, 0.3, Arm::Right));
    }

    #[test]
    fn symmetric_cancellation() {
        let s = StatState::new(4, params(1.0, 0.0, 0.0)).unwrap();
        let s = s.update(1.0, Arm::Left, 0.0).unwrap();
        let s = s.update(-1.0, Arm::Left, 0.0).unwrap();
        assert_eq!(s.t(), 0.0);
        assert_eq!(s.t_hat(), 0.0);
        assert_eq!(s.sum(), 0.0);
        assert_eq!(s.round(), 2);
    }

    #[test]
    fn single_step_arithmetic() {
        let s = StatState::new(1, params(1.0, 0.2, -0.2)).unwrap();
        let s = s.update(1.0, Arm::Left, 0.2).unwrap();
        assert!((s.t() - 1.8).abs() < 1e-15);
        // hypothesised mean of arm 1 is also 0.2 here
        assert!((s.t_hat() - 1.8).abs() < 1e-15);
        // under the swapped order the hypothesised centring differs
        let s = StatState::new(1, params(1.0, 0.2, -0.2)).unwrap();
        let s = s.update(1.0, Arm::Right, 0.2).unwrap();
        assert!((s.t_hat() - 2.2).abs() < 1e-15);
    }

    #[test]
    fn zero_reward_at_mean_is_stationary() {
        let s = StatState::new(10, params(0.7, 0.0, -0.5)).unwrap();
        let s = s.update(0.3, Arm::Left, 0.1).unwrap();
        let before = s;
        let s = s.update(0.0, Arm::Left, 0.0).unwrap();
        assert_eq!(s.t(), before.t());
        assert_eq!(s.t_hat(), before.t_hat());
    }

    #[test]
    fn rejects_bad_sigma_and_overrun() {
        assert!(StatState::new(3, params(0.0, 0.0, 0.0)).is_err());
        assert!(StatState::new(3, params(-1.0, 0.0, 0.0)).is_err());
        let s = StatState::new(1, params(1.0, 0.0, 0.0)).unwrap();
        let s = s.update(1.0, Arm::Left, 0.0).unwrap();
        assert_eq!(s.update(1.0, Arm::Left, 0.0), Err(Error::HorizonExceeded(1)));
    }

    #[test]
    fn traditional_statistic() {
        let arms = [Arm::Left; 4];
        assert_eq!(traditional_m(&arms, &[0.5; 4], 0.5, 2.0).unwrap(), 0.0);
        let m = traditional_m(&arms, &[1.0, 1.0, -1.0, 1.0], 0.0, 1.0).unwrap();
        assert!((m - 1.0).abs() < 1e-15);
        let mixed = [Arm::Left, Arm::Right];
        assert_eq!(traditional_m(&mixed, &[1.0, 1.0], 0.0, 1.0), Err(Error::MixedArms));
    }
}
