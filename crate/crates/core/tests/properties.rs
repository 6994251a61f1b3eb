//! Property tests over random environments, strategies and records.

use banditlab::banditdist::{interval_prob_closed, transition_density};
use banditlab::env::{Trajectory, TRAJECTORY_CSV_HEADER};
use banditlab::ldp::RateFunction;
use banditlab::normal::normal_cdf;
use banditlab::statistics::{recompute_statistics, StatParams};
use banditlab::strategies::{decide_clt, CltParams};
use banditlab::{bandit_pdf, play, Arm, ArmModel, BanditParams, Order, RngStream, StrategyKind, TabEnv};
use proptest::prelude::*;

fn arb_env() -> impl Strategy<Value = TabEnv> {
    prop_oneof![
        (0.05f64..0.95, 0.05f64..0.95)
            .prop_map(|(a, b)| { TabEnv::new(ArmModel::bernoulli(a).unwrap(), ArmModel::bernoulli(b).unwrap()) }),
        (-1.0f64..1.0, -1.0f64..1.0, 0.2f64..3.0).prop_map(|(a, b, sd)| {
            TabEnv::new(ArmModel::gaussian(a, sd).unwrap(), ArmModel::gaussian(b, sd).unwrap())
        }),
    ]
}

fn arb_kind(n: usize) -> impl Strategy<Value = StrategyKind> {
    prop_oneof![
        Just(StrategyKind::ConstantArm(Arm::Left)),
        Just(StrategyKind::ConstantArm(Arm::Right)),
        (0.0f64..=1.0).prop_map(|g| StrategyKind::gamma(g).unwrap()),
        (0.0f64..=1.0).prop_map(|a| StrategyKind::alpha(a).unwrap()),
        (-1.0f64..1.0).prop_map(move |c| StrategyKind::Clt(CltParams::new(n, c, 0.2, -0.2, 0.98).unwrap())),
        (-1.0f64..1.0).prop_map(move |c| StrategyKind::HatClt(CltParams::new(n, c, 0.2, -0.2, 0.98).unwrap())),
    ]
}

fn arb_record() -> impl Strategy<Value = (Vec<Arm>, Vec<f64>)> {
    (1usize..200).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { Arm::Left } else { Arm::Right }), n),
            prop::collection::vec(-3.0f64..3.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_is_exact(env in arb_env(), kind in arb_kind(120), seed in any::<u64>()) {
        let traj = play(&env, &kind, 120, &mut RngStream::new(seed, 0)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        prop_assert!(text.starts_with(TRAJECTORY_CSV_HEADER));
        let back = Trajectory::read_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(back, traj);
    }

    #[test]
    fn record_shape_and_partial_sums(env in arb_env(), kind in arb_kind(150), seed in any::<u64>()) {
        let traj = play(&env, &kind, 150, &mut RngStream::new(seed, 3)).unwrap();
        prop_assert_eq!(traj.arms.len(), 150);
        prop_assert_eq!(traj.rewards.len(), 150);
        let mut s = 0.0;
        for (r, &ps) in traj.rewards.iter().zip(&traj.partial_sums) {
            s += r;
            prop_assert_eq!(s, ps);
        }
    }

    #[test]
    fn affine_shift_moves_t_by_delta((arms, rewards) in arb_record(), delta in -2.0f64..2.0,
                                     ml in -1.0f64..1.0, mr in -1.0f64..1.0, sigma in 0.3f64..2.0) {
        let params = StatParams { sigma, mu_hi: ml.max(mr), mu_lo: ml.min(mr) };
        let (t, th) = recompute_statistics(&arms, &rewards, [ml, mr], params).unwrap();
        let shifted: Vec<f64> = rewards.iter().map(|z| z + delta).collect();
        let sp = StatParams { sigma, mu_hi: params.mu_hi + delta, mu_lo: params.mu_lo + delta };
        let (t2, th2) = recompute_statistics(&arms, &shifted, [ml + delta, mr + delta], sp).unwrap();
        prop_assert!((t2 - t - delta).abs() <= 1e-12 * (1.0 + t.abs()) * arms.len() as f64);
        prop_assert!((th2 - th - delta).abs() <= 1e-12 * (1.0 + th.abs()) * arms.len() as f64);
    }

    #[test]
    fn clt_decision_depends_on_gap_only(t in -5.0f64..5.0, shift in -3.0f64..3.0, m in 1usize..500,
                                        c in -1.0f64..1.0, lo in -1.0f64..0.0, gap in 0.0f64..1.0) {
        // dyadic rationals keep both sides of the comparison exact
        let q = |x: f64| (x * 1024.0).round() / 1024.0;
        let (t, shift, c, lo, hi) = (q(t), q(shift), q(c), q(lo), q(lo + gap));
        let n = 512;
        prop_assert_eq!(
            decide_clt(t, m.min(n), n, c, hi, lo),
            decide_clt(t + shift, m.min(n), n, c + shift, hi, lo)
        );
    }

    #[test]
    fn running_t_matches_closed_form(env in arb_env(), c in -1.0f64..1.0, seed in any::<u64>()) {
        let s = env.summary();
        prop_assume!(s.common_variance);
        let n = 400;
        let p = CltParams::new(n, c, s.mu_hi, s.mu_lo, s.var_hi.sqrt()).unwrap();
        let traj = play(&env, &StrategyKind::Clt(p), n, &mut RngStream::new(seed, 8)).unwrap();
        let params = StatParams { sigma: p.sigma, mu_hi: p.mu_hi, mu_lo: p.mu_lo };
        let (t, th) = recompute_statistics(&traj.arms, &traj.rewards, [env.left.mean(), env.right.mean()], params).unwrap();
        prop_assert!((traj.t.as_ref().unwrap()[n - 1] - t).abs() <= 1e-12);
        prop_assert!((traj.t_hat.as_ref().unwrap()[n - 1] - th).abs() <= 1e-12);
    }

    #[test]
    fn proportion_share_tracks_alpha(alpha in 0.0f64..=1.0, n in 1usize..3000) {
        let env = TabEnv::bernoulli_ordered(0.6, 0.4, Order::H0).unwrap();
        let traj = play(&env, &StrategyKind::alpha(alpha).unwrap(), n, &mut RngStream::new(1, 1)).unwrap();
        let left = traj.arms.iter().filter(|&&a| a == Arm::Left).count() as f64;
        prop_assert!((left / n as f64 - alpha).abs() <= 2.0 / n as f64);
    }

    #[test]
    fn density_is_nonnegative(alpha in -4.0f64..4.0, beta in -2.0f64..2.0, c in -2.0f64..2.0, y in -15.0f64..15.0) {
        let p = BanditParams::new(alpha, beta, c).unwrap();
        prop_assert!(bandit_pdf(&p, y).unwrap() >= -1e-12);
    }

    #[test]
    fn zero_drift_density_is_normal(beta in -3.0f64..3.0, c in -3.0f64..3.0, y in -10.0f64..10.0) {
        let p = BanditParams::new(0.0, beta, c).unwrap();
        let normal = (-(y - beta) * (y - beta) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        prop_assert!((bandit_pdf(&p, y).unwrap() - normal).abs() <= 1e-12);
    }

    #[test]
    fn density_symmetric_about_its_centre(alpha in -3.0f64..3.0, c in -2.0f64..2.0, u in 0.0f64..8.0) {
        let p = BanditParams::new(alpha, c, c).unwrap();
        let (l, r) = (bandit_pdf(&p, c - u).unwrap(), bandit_pdf(&p, c + u).unwrap());
        prop_assert!((l - r).abs() <= 1e-14 * (1.0 + l.abs()));
    }

    #[test]
    fn interval_probabilities_are_probabilities(hi in -1.0f64..1.0, gap in 0.0f64..1.5, a in -5.0f64..5.0,
                                                w in 0.01f64..6.0, h1 in any::<bool>()) {
        let order = if h1 { Order::H1 } else { Order::H0 };
        let v = interval_prob_closed(hi, hi - gap, order, a, a + w).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
    }

    #[test]
    fn transition_kernel_starts_as_heat_kernel(x in -2.0f64..2.0, z in -4.0f64..4.0, s in 0.05f64..1.0) {
        let q = transition_density(0.0, x, s, z, 0.0, 0.3).unwrap();
        let heat = (-(x - z) * (x - z) / (2.0 * s)).exp() / (2.0 * std::f64::consts::PI * s).sqrt();
        prop_assert!((q - heat).abs() <= 1e-12);
    }

    #[test]
    fn normal_cdf_symmetry(x in -30.0f64..30.0) {
        prop_assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn rate_function_flat_exactly_on_mean_interval(pa in 0.05f64..0.95, pb in 0.05f64..0.95, u in 0.0f64..=1.0) {
        let env = TabEnv::new(ArmModel::bernoulli(pa).unwrap(), ArmModel::bernoulli(pb).unwrap());
        let rf = RateFunction::new(&env).unwrap();
        let (lo, hi) = (env.mu_lo(), env.mu_hi());
        let x = (lo + u * (hi - lo)).clamp(lo, hi);
        prop_assert_eq!(rf.eval(x).unwrap().value, 0.0);
        prop_assert!(rf.eval(hi + 0.05).unwrap().value > 0.0);
        prop_assert!(rf.eval(lo - 0.05).unwrap().value > 0.0);
    }

    #[test]
    fn rng_output_is_pure(seed in any::<u64>(), stream in any::<u64>(), skip in 0u64..64) {
        let mut rng = RngStream::new(seed, stream);
        for _ in 0..skip {
            rng.next_raw();
        }
        prop_assert_eq!(rng.next_raw(), RngStream::output(seed, stream, skip));
    }
}
