use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use framekit::exact::{parse_rational, Rational};
use framekit::transforms::Tolerances;
use framekit_cli::catalogue::SUITES;
use framekit_cli::{CliError, SuiteConfig, EXIT_INPUT, EXIT_PASS, EXIT_VIOLATION, SCHEMA};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Seeded verification suites for frame transformations and Gabor systems.
///
/// Tolerances can be overridden with `--tol.<name> <value>`; names are
/// rank, operator, bound, recover, analysis, spectrum and identity.
#[derive(Debug, Parser)]
#[command(name = "framekit", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one named suite and emit its report.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
        #[arg(long, env = "FRAMEKIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List the available suites.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Collapse data for one witness function.
    Witness {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        x: Rational,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        y: Rational,
        #[arg(long = "c-phase", value_parser = rational_arg, allow_hyphen_values = true, default_value = "0")]
        c_phase: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal frame bounds of a frame stored as JSON.
    Bounds {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print_stdout(text);
            Ok(())
        }
    }
}

/// Writes to stdout, treating a closed pipe as a normal end of output.
fn print_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

#[derive(Serialize)]
struct Catalogue {
    schema: &'static str,
    suites: &'static [framekit_cli::catalogue::SuiteInfo],
}

fn list(format: Format) -> String {
    match format {
        Format::Json => to_json(&Catalogue {
            schema: SCHEMA,
            suites: &SUITES,
        }),
        Format::Text => SUITES
            .iter()
            .map(|s| format!("{:<15} {}", s.name, s.anchor))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn execute(command: Command, tolerances: Tolerances) -> Result<u8, CliError> {
    match command {
        Command::Verify {
            suite,
            trials,
            seed,
            input,
            out,
            format,
        } => {
            let config = SuiteConfig {
                suite,
                trials: trials.map(|t| t as usize),
                seed,
                tolerances,
                input,
            };
            let report = framekit_cli::run(&config)?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            emit(text.trim_end(), out.as_ref())?;
            Ok(if report.passed() { EXIT_PASS } else { EXIT_VIOLATION })
        }
        Command::List { format } => {
            print_stdout(&list(format));
            Ok(EXIT_PASS)
        }
        Command::Witness { n, x, y, c_phase, out } => {
            let w = framekit_cli::witness(n, &x, &y, &c_phase)?;
            emit(&to_json(&w), out.as_ref())?;
            Ok(if w.verdict.passed() { EXIT_PASS } else { EXIT_VIOLATION })
        }
        Command::Bounds { input, out } => {
            let b = framekit_cli::bounds(&input, &tolerances)?;
            emit(&to_json(&b), out.as_ref())?;
            Ok(EXIT_PASS)
        }
    }
}

fn main() -> ExitCode {
    let mut tolerances = Tolerances::default();
    let args = match framekit_cli::extract_tolerances(std::env::args().collect(), &mut tolerances) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("framekit: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let cli = Cli::parse_from(args);
    let command = cli.command.unwrap_or(Command::List { format: Format::Text });
    match execute(command, tolerances) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("framekit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
