//! The `cbd` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::coupling::CouplingError;
use crate::cyclic::{cyclic_criterion, detect_cyclic};
use crate::dsl;
use crate::hidden::{reconstruct_lambda, HiddenError};
use crate::rational::format_rational;
use crate::report::{build_report, ReportOptions};
use crate::system::{is_consistently_connected, System};
use crate::trials::read_trials;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CONTEXTUAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "cbd", version, about = "Contextuality analysis of systems of binary random variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a system document and list every problem found.
    Validate { file: PathBuf },
    /// Decide contextuality and print the full report.
    Analyze {
        file: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Include every atom of the witness coupling.
        #[arg(long)]
        witness: bool,
        /// Exit with status 3 when the system is contextual.
        #[arg(long)]
        fail_on_contextual: bool,
    },
    /// Print the cyclic profile and the closed-form verdict.
    Cyclic { file: PathBuf },
    /// Print the hidden-variable model of one context.
    Lambda {
        file: PathBuf,
        #[arg(long)]
        context: String,
    },
    /// Build a system document from a CSV table of trials.
    Ingest {
        csv: PathBuf,
        /// Document declaring contents and contexts; distribution blocks are ignored.
        #[arg(long)]
        format: PathBuf,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(path, e))
}

fn load(path: &Path) -> Result<System, Failure> {
    let bytes = read(path)?;
    dsl::parse_bytes(&bytes).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure { code: EXIT_IO, message: format!("write: {e}") })
}

/// Runs the command line `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { file } => validate(&file, out),
        Command::Analyze { file, json, witness, fail_on_contextual } => {
            let system = load(&file)?;
            let report = build_report(&system, ReportOptions { full_witness: witness }).map_err(|e| match e {
                CouplingError::Invalid(_) | CouplingError::TooLarge { .. } => {
                    Failure::invalid(format!("{}: {e}", file.display()))
                }
                other => Failure { code: 1, message: other.to_string() },
            })?;
            emit(out, &if json { report.to_json() } else { report.to_string() })?;
            Ok(if fail_on_contextual && report.lp.contextual { EXIT_CONTEXTUAL } else { EXIT_OK })
        }
        Command::Cyclic { file } => {
            let system = load(&file)?;
            let Some(profile) = detect_cyclic(&system) else {
                emit(out, "not cyclic\n")?;
                return Ok(EXIT_OK);
            };
            let consistent = is_consistently_connected(&system).map_err(|e| Failure::invalid(e.to_string()))?;
            let correlations: Vec<String> = profile.correlations.iter().map(format_rational).collect();
            let text = format!(
                "rank {}\ncycle {}\ncorrelations {}\ns_odd {}\nbound {}\nverdict {}\n",
                profile.rank,
                profile.cycle().join(" "),
                correlations.join(" "),
                format_rational(&profile.s_odd()),
                format_rational(&profile.bound()),
                cyclic_criterion(&profile, consistent.consistent),
            );
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Lambda { file, context } => {
            let system = load(&file)?;
            let model = reconstruct_lambda(&system, &context).map_err(|e| match e {
                HiddenError::UnknownContext(_) | HiddenError::InvalidPmf { .. } => Failure::invalid(e.to_string()),
            })?;
            emit(out, &model.to_string())?;
            Ok(EXIT_OK)
        }
        Command::Ingest { csv, format, output } => {
            let format_bytes = read(&format)?;
            let text = std::str::from_utf8(&format_bytes)
                .map_err(|e| Failure::invalid(format!("{}: {e}", format.display())))?;
            let plan = dsl::parse_format(text).map_err(|e| Failure::invalid(format!("{}: {e}", format.display())))?;
            let table = read(&csv)?;
            let system = read_trials(&plan, table.as_slice())
                .map_err(|e| Failure::invalid(format!("{}: {e}", csv.display())))?;
            let doc = dsl::serialize(&system);
            match output {
                Some(path) => std::fs::write(&path, doc).map_err(|e| Failure::io(&path, e))?,
                None => emit(out, &doc)?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn validate(file: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let bytes = read(file)?;
    match dsl::parse_bytes(&bytes) {
        Ok(_) => {
            emit(out, &format!("{}: valid\n", file.display()))?;
            Ok(EXIT_OK)
        }
        Err(dsl::ParseError::Invalid(violations)) => {
            let mut text = format!("{}: invalid\n", file.display());
            for v in violations {
                text.push_str(&format!("  {v}\n"));
            }
            emit(out, &text)?;
            Ok(EXIT_INVALID)
        }
        Err(e) => {
            emit(out, &format!("{}: {e}\n", file.display()))?;
            Ok(EXIT_INVALID)
        }
    }
}
