//! Command-line interface for the complexity-lab estimators.
//!
//! Every run emits one report (JSON by default, CSV table on request) that
//! echoes the resolved configuration, the seed, and the calibration
//! constants. Identical (config, seed) runs emit byte-identical reports;
//! wall-clock time goes to stderr. Exit codes: 0 success, 1 failed
//! verification, 2 invalid input, 3 requested object not found.

mod construct_cmd;
mod criterion_cmd;
mod learn_cmd;
mod measure_cmd;
mod report;
mod sources;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use complexity_lab::core::LossSpec;
use serde_json::{json, Value};

use report::{emit, Calibration, Format, Report, Table};
use sources::{parse_loss, Ctx};

/// CLI-level failure classes, mapped to exit codes in `main`.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config fields, or input files: exit code 2.
    Validation(String),
    /// The requested object does not exist (missing file, no passing
    /// dimension): exit code 3.
    NotFound(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::NotFound(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "complexity-lab",
    version,
    about = "Dimension and margin complexity measures for finite hypothesis classes"
)]
struct Cli {
    /// JSON config file with default parameter values; flags override
    /// config fields of the same name.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format (json: full report; csv: tabular payload only).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Master seed. Every random stream derives from it by hashing a
    /// purpose label into the seed, so one seed fixes the whole run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a hypothesis class and print its value table.
    Construct(construct_cmd::ConstructArgs),
    /// Dimension, margin, cover, and counting measures with witnesses.
    Measure(measure_cmd::MeasureArgs),
    /// Monte Carlo learning simulation for the four linear modes.
    Learn(learn_cmd::LearnArgs),
    /// Distributional and worst-cell approximation criteria.
    Criterion(criterion_cmd::CriterionArgs),
    /// Run the self-check property suites (exit 1 on any failure).
    Verify {
        /// spectral | embeddings | learners | measures | constructions | all
        suite: String,
    },
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Construct(_) => "construct",
        Command::Measure(_) => "measure",
        Command::Learn(_) => "learn",
        Command::Criterion(_) => "criterion",
        Command::Verify { .. } => "verify",
    }
}

/// Calibration block for the report: the deviation constants of the loss
/// that the command resolved (0/1-loss defaults otherwise) and the
/// margin-to-dimension transfer constant in effect.
fn calibration_from_echo(ctx: &Ctx) -> Calibration {
    let echo = ctx.config_echo();
    let loss = echo
        .get("loss")
        .and_then(Value::as_str)
        .and_then(|name| parse_loss(name).ok())
        .unwrap_or_else(LossSpec::zero_one);
    let transfer_c = echo
        .get("transfer-c")
        .and_then(Value::as_f64)
        .unwrap_or(8.0);
    Calibration::new(loss.c_dc, loss.c_mc, transfer_c)
}

fn main() -> ExitCode {
    // Reproducible parallelism: honor an explicit thread cap before any
    // rayon pool spins up.
    if let Ok(threads) = std::env::var("COMPLEXITY_LAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: COMPLEXITY_LAB_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::NotFound(msg)) => {
            eprintln!("not found: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let started = Instant::now();
    let ctx = Ctx::new(&cli.config, cli.out.clone(), cli.format, cli.seed)?;
    let name = command_name(&cli.command);
    let mut exit = ExitCode::SUCCESS;

    let (results, table, calibration): (Value, Option<Table>, Calibration) = match &cli.command {
        Command::Construct(args) => {
            let (v, t) = construct_cmd::run(&ctx, args)?;
            (v, t, calibration_from_echo(&ctx))
        }
        Command::Measure(args) => {
            let (v, t) = measure_cmd::run(&ctx, &args.which)?;
            (v, t, calibration_from_echo(&ctx))
        }
        Command::Learn(args) => {
            let (v, t, c_dc, c_mc) = learn_cmd::run(&ctx, args)?;
            let transfer_c = calibration_from_echo(&ctx).transfer_c;
            (v, t, Calibration::new(c_dc, c_mc, transfer_c))
        }
        Command::Criterion(args) => {
            let (v, t) = criterion_cmd::run(&ctx, &args.which)?;
            (v, t, calibration_from_echo(&ctx))
        }
        Command::Verify { suite } => {
            let seed = ctx.seed_required("verify")?;
            let rows = verify::run(suite, seed).ok_or_else(|| {
                CliError::Validation(format!(
                    "unknown suite '{suite}': expected {} | all",
                    verify::SUITES.join(" | ")
                ))
            })?;
            let passed = rows.iter().filter(|r| r.pass).count();
            let all_pass = passed == rows.len();
            if !all_pass {
                exit = ExitCode::from(1);
            }
            let table = Table {
                header: vec![
                    "suite".into(),
                    "property".into(),
                    "pass".into(),
                    "detail".into(),
                ],
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.suite.to_string(),
                            r.property.to_string(),
                            r.pass.to_string(),
                            r.detail.clone(),
                        ]
                    })
                    .collect(),
            };
            let value = json!({
                "suite": suite,
                "properties": rows,
                "total": rows.len(),
                "passed": passed,
                "all_pass": all_pass,
            });
            (value, Some(table), calibration_from_echo(&ctx))
        }
    };

    let report = Report {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: name.to_string(),
        config: ctx.config_echo(),
        seed: ctx.seed_opt(),
        calibration,
        results,
        wall_clock_ms: started.elapsed().as_millis(),
    };
    emit(&report, table.as_ref(), &ctx.out, ctx.format)?;
    Ok(exit)
}
