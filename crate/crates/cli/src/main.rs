use std::path::PathBuf;
use std::process::ExitCode;

use cai_cli::commands::{self, PolicyKind, ReportFormat, SimulateOptions, SolverKind};
use cai_cli::examples;
use cai_cli::CliError;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cai", version, about = "Compound AI placement and continuum simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario; prints one violation per line.
    Validate { scenario: PathBuf },
    /// Choose an implementation and node per module and print the evaluation.
    Solve {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        solver: SolverKind,
    },
    /// Run the discrete-event simulation and write reports.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        policy: Option<PolicyKind>,
        /// Predictive lead time, seconds.
        #[arg(long)]
        lead: Option<f64>,
        /// Predictive forecast scan step, seconds.
        #[arg(long)]
        step: Option<f64>,
        /// Simulated seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Output directory for report, trace.csv and orchestration.log.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        /// Also write topology.csv (links) and topology_nodes.csv (positions) per snapshot.
        #[arg(long)]
        dump_topology: bool,
    },
    /// Solve once per weight vector and print a trade-off table.
    Sweep {
        scenario: PathBuf,
        /// Weight vectors `w_lat,w_energy,w_acc` separated by `;`.
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value = "brute")]
        solver: SolverKind,
    },
    /// Write a bundled scenario.
    Example {
        #[arg(value_parser = examples::EXAMPLE_NAMES)]
        name: String,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cloud access latency in seconds (vate-edge-cloud only).
        #[arg(long)]
        cloud_latency: Option<f64>,
    },
}

fn init_logging() {
    let level = match std::env::var("CAI_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { scenario } => {
            let report = commands::validate(&scenario)?;
            if report.is_valid() {
                println!("ok");
                Ok(())
            } else {
                Err(CliError::Invalid(report))
            }
        }
        Command::Solve { scenario, solver } => {
            print!("{}", commands::solve(&scenario, solver)?);
            Ok(())
        }
        Command::Simulate {
            scenario,
            seed,
            policy,
            lead,
            step,
            duration,
            out,
            format,
            dump_topology,
        } => {
            let opts = SimulateOptions {
                seed,
                policy,
                lead,
                step,
                duration,
            };
            println!(
                "{}",
                commands::simulate(&scenario, &opts, out.as_deref(), format, dump_topology)?
            );
            Ok(())
        }
        Command::Sweep { scenario, grid, solver } => {
            print!("{}", commands::sweep(&scenario, &grid, solver)?);
            Ok(())
        }
        Command::Example {
            name,
            out,
            cloud_latency,
        } => {
            let text = examples::render(&name, cloud_latency)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
                }
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invalid(report)) => {
            for v in report.violations() {
                println!("{}: {}", v.code.as_str(), v.message);
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
