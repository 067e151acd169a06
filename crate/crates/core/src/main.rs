use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sgslab::cli::{emit_report, parse_config, run_experiment};
use sgslab::error::Error;

#[derive(Parser)]
#[command(name = "sgslab", version, about = "Ground states and existence criteria for interface NLS problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write report files.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Override the solver tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Parse and validate a configuration without running it.
    Validate { config: PathBuf },
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Validation { .. } | Error::Parse(_) => ExitCode::from(2),
        Error::NoConvergence { .. } => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match parse_config(&config) {
            Ok(spec) => {
                let text = serde_json::to_string_pretty(&spec).expect("spec serializes");
                let _ = writeln!(std::io::stdout(), "{text}");
                ExitCode::SUCCESS
            }
            Err(e) => exit_for(&e),
        },
        Command::Run { config, out, threads, tol } => {
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: could not configure thread pool: {e}");
                }
            }
            let mut spec = match parse_config(&config) {
                Ok(s) => s,
                Err(e) => return exit_for(&e),
            };
            if let Some(t) = tol {
                if !(t > 0.0) {
                    return exit_for(&Error::Validation { field: "--tol".into(), message: "must be positive".into() });
                }
                spec.solver.tol = t;
            }
            let report = match run_experiment(&spec) {
                Ok(r) => r,
                Err(e) => return exit_for(&e),
            };
            match emit_report(&report, &out) {
                Ok(files) => {
                    let mut stdout = std::io::stdout();
                    for f in files {
                        let _ = writeln!(stdout, "{}", f.display());
                    }
                }
                Err(e) => return exit_for(&e),
            }
            for row in &report.rows {
                if let Some(err) = &row.error {
                    eprintln!("row {}: {}: {}", row.index, err.kind, err.message);
                }
            }
            if report.has_no_convergence() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
    }
}
