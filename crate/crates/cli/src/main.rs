//! `banditlab`: run one experiment and report its checks.
//!
//! Exit status is 0 when every check passes, 2 when a check fails and 1 on
//! usage, config or runtime errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use banditlab::harness::{self, ExperimentConfig, ExperimentId, ExperimentReport};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "banditlab", version, about = "Two-armed bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Averaged reward of the gamma strategy
    Lln(RunArgs),
    /// Statistic of the threshold strategy against its limit law
    Clt(RunArgs),
    /// Power curves of the strategic and single-arm tests
    Power(RunArgs),
    /// Rate functions and tail probabilities
    Ldp(RunArgs),
    /// One strategic and one single-arm test
    Test(RunArgs),
    /// Density and distribution tables, Euler paths
    Dist(RunArgs),
    /// Upper-tail frequencies over a strategy battery
    Parrondo(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON config; defaults are used when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replications (paths for `dist`)
    #[arg(long)]
    reps: Option<usize>,
    /// Directory for CSV tables and report.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print report.json to stdout instead of the check list
    #[arg(long)]
    json: bool,
}

impl Command {
    fn split(self) -> (ExperimentId, RunArgs) {
        match self {
            Self::Lln(a) => (ExperimentId::Lln, a),
            Self::Clt(a) => (ExperimentId::Clt, a),
            Self::Power(a) => (ExperimentId::Power, a),
            Self::Ldp(a) => (ExperimentId::Ldp, a),
            Self::Test(a) => (ExperimentId::Test, a),
            Self::Dist(a) => (ExperimentId::Dist, a),
            Self::Parrondo(a) => (ExperimentId::Parrondo, a),
        }
    }
}

fn build_config(id: ExperimentId, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentConfig::new(id),
    };
    if cfg.experiment != id {
        bail!("config is for '{}' but the command is '{id}'", cfg.experiment);
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.reps.is_some() {
        cfg.reps = args.reps;
    }
    if args.out.is_some() {
        cfg.out.clone_from(&args.out);
    }
    Ok(cfg)
}

fn print_report(report: &ExperimentReport) {
    println!("{} (seed {})", report.experiment, report.seed);
    for note in &report.notes {
        println!("note: {note}");
    }
    for warning in &report.warnings {
        println!("warning: {warning}");
    }
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {} value={:.6e} bound={:.6e}  {}",
            c.name, c.value, c.bound, c.detail
        );
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", report.checks.len());
}

fn run(cli: Cli) -> Result<bool> {
    let (id, args) = cli.command.split();
    let cfg = build_config(id, &args)?;
    let report = harness::run(&cfg).with_context(|| format!("running {id}"))?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_report(&report);
    }
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
