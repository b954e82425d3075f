use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use emitcorr::dynamics::PropagateOptions;
use emitcorr::scenario::{parse_geometry, run_scenario, CouplingReport, OutputTable, Scenario};
use emitcorr::{verify, Error};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Correlation dynamics of two dipole-coupled, driven emitters.
#[derive(Debug, Parser)]
#[command(name = "emitcorr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate a scenario and write the correlation table as CSV.
    Evolve {
        scenario: PathBuf,
        /// Output file (standard output if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Symmetrize every sample before it is validated.
        #[arg(long)]
        project: bool,
    },
    /// Print the couplings derived from an emitter geometry.
    Couplings { geometry: PathBuf },
    /// Run the scan declared in a scenario file.
    Scan {
        scenario: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Verify {
        /// Only run checks whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
    },
}

enum Failure {
    Model(Error),
    Usage(String),
    VerifyFailed(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("EC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "EC_THREADS must be a positive integer (got {value:?})"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure {threads} threads: {e}")))
}

fn write_table(table: &OutputTable, output: Option<&Path>) -> Result<(), Failure> {
    let io_failure = |e: io::Error| Failure::Usage(format!("cannot write output: {e}"));
    match output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))?;
            let mut out = BufWriter::new(file);
            table.write_csv(&mut out).map_err(io_failure)?;
            out.flush().map_err(io_failure)
        }
        None => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            table.write_csv(&mut out).map_err(io_failure)?;
            out.flush().map_err(io_failure)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Evolve {
            scenario,
            output,
            project,
        } => {
            let s = Scenario::from_path(&scenario)?;
            let options = PropagateOptions {
                project,
                ..PropagateOptions::default()
            };
            write_table(&run_scenario(&s, options)?, output.as_deref())
        }
        Command::Scan { scenario, output } => {
            let s = Scenario::from_path(&scenario)?;
            if s.scan.is_none() {
                return Err(Failure::Usage(format!(
                    "{} declares no [scan] table",
                    scenario.display()
                )));
            }
            write_table(
                &run_scenario(&s, PropagateOptions::default())?,
                output.as_deref(),
            )
        }
        Command::Couplings { geometry } => {
            let text = std::fs::read_to_string(&geometry)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", geometry.display())))?;
            println!("{}", CouplingReport::new(&parse_geometry(&text)?)?);
            Ok(())
        }
        Command::Verify { filter } => {
            let selected = verify::select(filter.as_deref());
            if selected.is_empty() {
                return Err(Failure::Usage(format!(
                    "no checks match {:?}",
                    filter.unwrap_or_default()
                )));
            }
            let mut failed = 0;
            for criterion in selected {
                let report = criterion.run();
                println!("{report}");
                if !report.passed() {
                    failed += 1;
                }
            }
            if failed > 0 {
                Err(Failure::VerifyFailed(failed))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = configure_threads().and_then(|()| run(cli.command));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Model(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_VALIDATION
            })
        }
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::VerifyFailed(n)) => {
            eprintln!("{n} criteria failed");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
