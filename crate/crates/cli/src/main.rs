use anyhow::Context;
use bsplit::geometry::Verdict;
use bsplit::io::{cmd_classify, cmd_split, cmd_theorem9, cmd_witness, Output, RunOptions, ScenarioConfig};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit status for configuration and runtime errors.
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "bsplit", version, about = "Bounded splitting of analytic functions across two singular sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json and the CSV tables.
    #[arg(long)]
    out: PathBuf,
    /// Number of refinement levels.
    #[arg(long)]
    refine: Option<usize>,
    /// Seed for randomised probes; recorded in the report.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the pair is a bs-pair (exit 0 BS, 1 NOT_BS, 2 INDETERMINATE).
    Classify(Common),
    /// Split the scenario's test function and certify the pieces (exit 0 on PASS, 1 on FAIL).
    Split(Common),
    /// Witness family: blow-up slope, bounded sum, rotundity (exit 0 on PASS, 1 on FAIL).
    Witness(Common),
    /// Disc-chain splitting in the right half-plane (exit 0 on PASS, 1 on FAIL).
    Theorem9(Common),
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Bs => "BS",
        Verdict::NotBs => "NOT_BS",
        Verdict::Indeterminate => "INDETERMINATE",
    }
}

fn workers() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("BSPLIT_WORKERS") {
        let n: usize = v.parse().with_context(|| format!("BSPLIT_WORKERS = {v:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    workers()?;
    let (common, cmd): (&Common, fn(&ScenarioConfig, Option<&std::path::Path>, RunOptions) -> bsplit::Result<Output>) =
        match &cli.command {
            Command::Classify(c) => (c, cmd_classify),
            Command::Split(c) => (c, cmd_split),
            Command::Witness(c) => (c, cmd_witness),
            Command::Theorem9(c) => (c, cmd_theorem9),
        };
    let (cfg, base) =
        ScenarioConfig::load(&common.config).with_context(|| format!("reading {}", common.config.display()))?;
    let opts = RunOptions { refine: common.refine, seed: common.seed };
    let out = cmd(&cfg, base.as_deref(), opts)?;
    let paths = out.write(&common.out).with_context(|| format!("writing into {}", common.out.display()))?;
    let r = &out.report;
    match r.verdict {
        Some(v) => println!("{} {}: {}", r.command, r.scenario, verdict_label(v)),
        None => println!("{} {}: {}", r.command, r.scenario, if r.passed { "PASS" } else { "FAIL" }),
    }
    for e in &r.entries {
        let status = match e.pass {
            Some(true) => "ok  ",
            Some(false) => "FAIL",
            None => "    ",
        };
        let tol = e.tolerance.map(|t| format!(" (tol {t:.3e})")).unwrap_or_default();
        println!("  {status} {:<28} {:>12.5e}{tol}  [{}]", e.name, e.value, e.grid);
    }
    for p in paths {
        log::info!("wrote {}", p.display());
    }
    Ok(u8::try_from(r.exit_code).unwrap_or(EXIT_ERROR))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
