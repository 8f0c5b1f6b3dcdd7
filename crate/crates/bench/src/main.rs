use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use radial_bench::commands::{self, EXIT_ERROR};
use radial_bench::RunArgs;
use radial_core::RunStatus;

#[derive(Parser)]
#[command(
    name = "radial-bench",
    version,
    about = "Run and verify the radial subgradient method"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm and write its trace and report.
    Solve(RunArgs),
    /// Check an iteration bound against a run of that many iterations.
    VerifyBounds(RunArgs),
    /// Run all three algorithms and tabulate relative accuracy per iteration.
    Compare(RunArgs),
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Solve(args) => {
            let out = commands::solve(&args)?;
            let r = &out.report;
            println!(
                "{} {}: {} after {} iterations, best relative accuracy {}",
                r.problem_id,
                r.algorithm,
                r.status,
                r.iterations,
                r.best_rel_accuracy.map_or("n/a".to_string(), |a| format!("{a:e}")),
            );
            match &out.trace.status {
                RunStatus::UnboundedDetected { ray } => println!("unbounded along ray {:?}", ray.as_slice()),
                RunStatus::NumericalStall { reason } => eprintln!("error: numerical stall: {reason}"),
                _ => {}
            }
            Ok(out.exit_code())
        }
        Command::VerifyBounds(args) => {
            let out = commands::verify_bounds(&args)?;
            let r = &out.report;
            println!(
                "{} eps={}: bound {} achieved {} -> {}",
                r.theorem.label(),
                r.epsilon,
                r.bound_iterations,
                r.achieved_iteration.map_or("none".to_string(), |i| i.to_string()),
                if r.passed { "passed" } else { "FAILED" },
            );
            Ok(out.exit_code())
        }
        Command::Compare(args) => {
            let out = match &args.trace {
                Some(path) => {
                    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
                    commands::compare(&args, BufWriter::new(file))?
                }
                None => commands::compare(&args, io::stdout().lock())?,
            };
            for r in &out.reports {
                eprintln!(
                    "{}: {} after {} iterations, achieved at {}",
                    r.algorithm,
                    r.status,
                    r.iterations,
                    r.achieved_iteration.map_or("none".to_string(), |i| i.to_string()),
                );
            }
            Ok(commands::EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
