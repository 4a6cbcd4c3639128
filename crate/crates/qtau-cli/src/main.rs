use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qtau_cli::config::{self, CliOverrides, Command, OutputFormat};
use qtau_cli::{run_degenerate, run_eval, run_verify, CliError, Outcome};

/// Evaluate q-Painleve tau-function series and verify their identities.
#[derive(Parser)]
#[command(name = "qtau", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Path to a JSON run configuration (defaults apply when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format: json or csv.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Pass/fail tolerance for relative residuals.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Force the deterministic single-threaded mode used by golden tests
    /// (evaluation is always sequential; the flag is recorded in the
    /// config echo).
    #[arg(long, global = true)]
    single_thread: bool,

    /// Keep only identity IDs matching this glob (verify).
    #[arg(long, global = true)]
    filter: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate tau (and the (y, z) pair) on the configured t-grid.
    Eval,
    /// Run the identity suites; exit 1 if a proved identity fails.
    Verify,
    /// Sweep a degeneration step over the configured Lambda list.
    Degenerate,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let raw = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            config::parse_config(&text).map_err(CliError::Config)?
        }
        None => Default::default(),
    };
    let format = match &cli.format {
        Some(f) => Some(OutputFormat::parse(f).map_err(CliError::Config)?),
        None => None,
    };
    let overrides = CliOverrides {
        format,
        tolerance: cli.tolerance,
        filter: cli.filter.clone(),
        single_thread: cli.single_thread,
    };
    let command = match cli.command {
        Cmd::Eval => Command::Eval,
        Cmd::Verify => Command::Verify,
        Cmd::Degenerate => Command::Degenerate,
    };
    let resolved = config::resolve(&raw, &overrides, command).map_err(CliError::Config)?;
    match command {
        Command::Eval => run_eval(&resolved),
        Command::Verify => run_verify(&resolved),
        Command::Degenerate => run_degenerate(&resolved),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let write_result = match &cli.out {
                Some(path) => std::fs::write(path, outcome.output.as_bytes()),
                None => std::io::stdout().write_all(outcome.output.as_bytes()),
            };
            if let Err(e) = write_result {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
