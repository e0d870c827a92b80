//! Command-line front end: scenario-driven analysis and simulation with
//! CSV/JSON artifacts.
//!
//! Exit codes: 0 success (and stealthy, for `transfer`), 1 alarm raised or
//! reference mismatch, 2 config error, 3 runtime fault (step index on
//! stderr). Summaries go to stdout, data to files, faults to stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spoofsim::scenario::{
    reproduce_paper, run_analyze_centralizer, run_simulate, run_transfer_scenario,
    ScenarioConfig, ScenarioError,
};

#[derive(Parser)]
#[command(
    name = "spoofsim",
    about = "Sensor-spoofing transferability analysis on SE(2)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the commuting-subspace dimension, basis and closure verdict
    /// per input segment, one JSON object per line
    AnalyzeCentralizer(ScenarioArgs),
    /// Simulate the nominal trajectory under the training attack and write
    /// trajectory.csv / observer.csv
    Simulate(ScenarioArgs),
    /// Run the full pipeline (dataset, learning, deployment) and write
    /// impact.csv, training_trace.csv, learned_attack.json, verdict.json
    Transfer(ScenarioArgs),
    /// Recompute the built-in reference quantities and report each against
    /// its tolerance
    ReproducePaper,
}

const EXIT_ALARM: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_FAULT: u8 = 3;

fn load(args: &ScenarioArgs) -> Result<(ScenarioConfig, PathBuf), ScenarioError> {
    let mut cfg = ScenarioConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn fail(e: &ScenarioError) -> ExitCode {
    eprintln!("{e}");
    match e {
        ScenarioError::Config(_) => ExitCode::from(EXIT_CONFIG),
        ScenarioError::Io(_) | ScenarioError::Fault { .. } => ExitCode::from(EXIT_FAULT),
    }
}

fn cmd_analyze(args: &ScenarioArgs) -> ExitCode {
    let (cfg, _) = match load(args) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    match run_analyze_centralizer(&cfg) {
        Ok(lines) => {
            for line in &lines {
                println!(
                    "{}",
                    serde_json::to_string(line).expect("report rows serialise")
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn cmd_simulate(args: &ScenarioArgs) -> ExitCode {
    let (cfg, out_dir) = match load(args) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    match run_simulate(&cfg, &out_dir) {
        Ok(out) => {
            println!(
                "simulated {} steps (dt {} s): wrote {} and {}",
                cfg.steps(),
                cfg.dt_s,
                out.trajectory_csv.display(),
                out.observer_csv.display()
            );
            println!(
                "max innovation {:.4} m, alarms: {}",
                out.report.max_innovation,
                if out.report.stealthy { "none" } else { "raised" }
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn cmd_transfer(args: &ScenarioArgs) -> ExitCode {
    let (cfg, out_dir) = match load(args) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    match run_transfer_scenario(&cfg, &out_dir) {
        Ok(out) => {
            println!(
                "learned displacement schedule with residual bound {:.4} m \
                 (dataset rich: {})",
                out.learned_epsilon, out.richness.rich
            );
            println!(
                "transfer verdict: stealthy={} max_innovation={:.4} max_bound={:.4}",
                out.verdict.stealthy, out.verdict.max_innovation, out.verdict.max_bound
            );
            println!(
                "wrote {}, {}, {}, {}",
                out.impact_csv.display(),
                out.training_csv.display(),
                out.learned_json.display(),
                out.verdict_json.display()
            );
            if out.verdict.stealthy {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ALARM)
            }
        }
        Err(e) => fail(&e),
    }
}

fn cmd_reproduce() -> ExitCode {
    let report = reproduce_paper();
    let fmt = |values: &[f64]| {
        values
            .iter()
            .map(|v| format!("{v:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!(
        "{:<42} {:>22} {:>22} {:>10} {:>8} {:>6}",
        "quantity", "reference", "computed", "abs diff", "tol", "ok"
    );
    for r in &report.rows {
        println!(
            "{:<42} {:>22} {:>22} {:>10.2e} {:>8.0e} {:>6}",
            r.label,
            fmt(&r.expected),
            fmt(&r.computed),
            r.abs_diff,
            r.tolerance,
            if r.pass { "yes" } else { "NO" }
        );
    }
    if report.all_pass {
        println!("all quantities reproduced within tolerance");
        ExitCode::SUCCESS
    } else {
        println!("some quantities missed their tolerance");
        ExitCode::from(EXIT_ALARM)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::AnalyzeCentralizer(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Transfer(args) => cmd_transfer(args),
        Command::ReproducePaper => cmd_reproduce(),
    }
}
