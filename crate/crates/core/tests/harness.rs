//! Small-scale runs of every experiment: table schemas, reproducibility and
//! config rejection.

use banditlab::harness::{run, ExperimentConfig, ExperimentId, ExperimentReport, RangeSpec};
use banditlab::{BanditParams, Error};

fn small(id: ExperimentId) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(id);
    cfg.seed = Some(11);
    match id {
        ExperimentId::Lln => {
            cfg.n = Some(2000);
            cfg.reps = Some(8);
        }
        ExperimentId::Clt => {
            cfg.n = Some(200);
            cfg.reps = Some(400);
        }
        ExperimentId::Power => {
            cfg.reps = Some(200);
            cfg.grid.mc_stride = Some(100);
            cfg.grid.size_n = Some(200);
        }
        ExperimentId::Ldp => {
            cfg.reps = Some(2000);
            cfg.n = Some(50);
            cfg.grid.tail_n = Some(100);
            cfg.grid.x = Some(RangeSpec::new(-1.0, 1.0, 0.1));
        }
        ExperimentId::Test => {
            cfg.n = Some(50);
            cfg.reps = Some(500);
        }
        ExperimentId::Dist => {
            cfg.reps = Some(500);
            cfg.grid.dt = Some(0.01);
            cfg.grid.y = Some(RangeSpec::new(-3.0, 3.0, 0.5));
            cfg.grid.params = Some(vec![BanditParams {
                alpha: 1.0,
                beta: 0.0,
                centre: 0.0,
            }]);
        }
        ExperimentId::Parrondo => {
            cfg.n = Some(100);
            cfg.reps = Some(200);
        }
    }
    cfg
}

fn header(report: &ExperimentReport, file: &str) -> String {
    report
        .table(file)
        .unwrap_or_else(|| panic!("missing {file}"))
        .header
        .clone()
}

#[test]
fn every_experiment_produces_consistent_tables() {
    for id in ExperimentId::ALL {
        let report = run(&small(id)).unwrap();
        assert_eq!(report.experiment, id);
        assert!(!report.checks.is_empty(), "{id} has no checks");
        let mut names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), report.checks.len(), "{id} repeats a check name");
        for t in &report.tables {
            assert!(!t.rows.is_empty(), "{id}: {} is empty", t.file);
            assert!(t.rows.iter().all(|r| r.len() == t.columns()), "{id}: ragged {}", t.file);
        }
    }
}

#[test]
fn golden_headers() {
    let lln = run(&small(ExperimentId::Lln)).unwrap();
    assert_eq!(header(&lln, "lln.csv"), "gamma,h,seed_index,mean_reward,abs_error");
    // gammas 0, 0.25, 0.5, the fair-game value and 1, each with 8 seeds
    assert_eq!(lln.table("lln.csv").unwrap().rows.len(), 5 * 8);

    let clt = run(&small(ExperimentId::Clt)).unwrap();
    assert_eq!(header(&clt, "clt_ks.csv"), "order,centre,alpha,beta,ks,bound");
    assert_eq!(clt.table("clt_ks.csv").unwrap().rows.len(), 4);
    assert_eq!(header(&clt, "clt_cdf.csv"), "order,centre,y,empirical,bandit");

    let power = run(&small(ExperimentId::Power)).unwrap();
    for (fig, rows) in [("fig4", 10), ("fig5", 10), ("fig6", 400), ("fig7", 400), ("fig8", 100)] {
        let file = format!("{fig}.csv");
        assert_eq!(header(&power, &file), "x,power_strategic,power_traditional");
        assert_eq!(power.table(&file).unwrap().rows.len(), rows);
    }
    assert_eq!(
        header(&power, "power_mc.csv"),
        "figure,p_max,n,power_strategic,mc_strategic,se_strategic,power_traditional,mc_traditional,se_traditional"
    );

    let ldp = run(&small(ExperimentId::Ldp)).unwrap();
    assert_eq!(header(&ldp, "rate_p0.6_0.4.csv"), "x,I,branch");
    assert_eq!(ldp.table("rate_p0.6_0.4.csv").unwrap().rows.len(), 21);
    assert_eq!(header(&ldp, "binom_tail.csv"), "p,x,n,exact,minus_rate,gap");
    assert_eq!(header(&ldp, "ldp_mc.csv"), "strategy,x,n,hits,reps,estimate,reference");

    let test = run(&small(ExperimentId::Test)).unwrap();
    assert_eq!(header(&test, "power_curve.csv"), "x,power_strategic,power_traditional");
    assert_eq!(test.table("power_curve.csv").unwrap().rows.len(), 50);
    assert!(test.files.contains(&"test_report.json".to_string()));

    let dist = run(&small(ExperimentId::Dist)).unwrap();
    assert_eq!(header(&dist, "dist_0.csv"), "y,pdf,cdf");
    assert_eq!(dist.table("dist_0.csv").unwrap().rows.len(), 13);
    assert_eq!(header(&dist, "sde_ks.csv"), "alpha,centre,dt,paths,ks");
    assert_eq!(dist.table("sde_ks.csv").unwrap().rows.len(), 3);

    let par = run(&small(ExperimentId::Parrondo)).unwrap();
    assert_eq!(header(&par, "parrondo.csv"), "strategy,epsilon,hits,reps,frequency");
    assert!(par.check("parrondo_unit_epsilon").unwrap().passed);
}

#[test]
fn same_seed_same_report() {
    for id in ExperimentId::ALL {
        let a = run(&small(id)).unwrap();
        let b = run(&small(id)).unwrap();
        assert_eq!(a, b, "{id} is not reproducible");
    }
    let mut other = small(ExperimentId::Lln);
    other.seed = Some(12);
    assert_ne!(
        run(&other).unwrap().tables,
        run(&small(ExperimentId::Lln)).unwrap().tables
    );
}

#[test]
fn analytic_checks_hold_at_small_scale() {
    let dist = run(&small(ExperimentId::Dist)).unwrap();
    for name in [
        "dist_mass_a1_b0_c0",
        "dist_nonnegative_a1_b0_c0",
        "dist_monotone_a1_b0_c0",
    ] {
        assert!(dist.check(name).unwrap().passed, "{name}");
    }
    let ldp = run(&small(ExperimentId::Ldp)).unwrap();
    for label in ["p0.6_0.4", "p0.55_0.45", "p0.51_0.49"] {
        for prefix in ["ldp_mgf2", "ldp_flat", "ldp_continuity", "ldp_convex"] {
            let name = format!("{prefix}_{label}");
            assert!(ldp.check(&name).unwrap().passed, "{name}");
        }
    }
    let power = run(&small(ExperimentId::Power)).unwrap();
    assert!(power.check("power_dominance").unwrap().passed);
}

#[test]
fn writes_tables_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(ExperimentId::Test);
    cfg.out = Some(dir.path().to_path_buf());
    let report = run(&cfg).unwrap();
    for file in &report.files {
        assert!(dir.path().join(file).is_file(), "{file} not written");
    }
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["experiment"], "test");
    assert_eq!(json["checks"].as_array().unwrap().len(), report.checks.len());
    let curve = std::fs::read_to_string(dir.path().join("power_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 51);
}

#[test]
fn bad_configs_are_rejected() {
    for text in [
        r#"{"version": 2, "experiment": "lln"}"#,
        r#"{"version": 1, "experiment": "nope"}"#,
        r#"{"version": 1, "experiment": "lln", "typo": 1}"#,
        r#"{"version": 1, "experiment": "lln", "grid": {"gamma": [0.5]}}"#,
    ] {
        assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
    }
    let mut cfg = small(ExperimentId::Lln);
    cfg.reps = Some(0);
    assert!(matches!(run(&cfg), Err(Error::Config(_))));
    let mut cfg = small(ExperimentId::Parrondo);
    cfg.strategy = Some("gamma:2".into());
    assert!(run(&cfg).is_err());
    let cfg = ExperimentConfig::from_json(
        r#"{"version": 1, "experiment": "test", "n": 20, "reps": 10,
            "env": {"left": {"law": "bernoulli", "p": 0.6}, "right": {"law": "gaussian", "mean": 0.0, "sd": 3.0}}}"#,
    )
    .unwrap();
    assert!(matches!(run(&cfg), Err(Error::VarianceMismatch { .. })));
}
