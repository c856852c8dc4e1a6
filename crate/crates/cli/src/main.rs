use std::fmt;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::CommonArgs;

/// Local ergotropy of single-excitation states on XY spin rings.
#[derive(Debug, Parser)]
#[command(name = "ringergo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-site local ergotropy, works and tags for one state.
    Distribution,
    /// Ring summaries over a grid of (J, Delta).
    Sweep,
    /// Local ergotropy along the exact time evolution.
    Dynamics(DynamicsArgs),
    /// Closed form against the brute-force oracle, site by site.
    Compare,
    /// Seeded verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DynamicsArgs {
    /// Time tolerance for treating a sample as a shift time.
    #[arg(long, default_value_t = 1e-9)]
    pub window: f64,
    /// Add the exact profile-shift times to the time grid.
    #[arg(long)]
    pub include_shifts: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Random states in the nearest-neighbour oracle suite.
    #[arg(long, default_value_t = 200)]
    pub states: usize,
    /// Largest ring used by the oracle suites.
    #[arg(long = "max-sites", default_value_t = 10)]
    pub max_sites: usize,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(ringergo::Error),
    Io(std::io::Error),
    /// A check ran and failed; output has already been written.
    Failed(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 2,
            CliError::Core(ringergo::Error::OracleCap { .. }) => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Failed(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<ringergo::Error> for CliError {
    fn from(e: ringergo::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Distribution => {
            commands::distribution(&config::resolve("distribution", &cli.common)?)
        }
        Command::Sweep => commands::sweep(&config::resolve("sweep", &cli.common)?),
        Command::Dynamics(d) => commands::dynamics(&config::resolve("dynamics", &cli.common)?, &d),
        Command::Compare => commands::compare(&config::resolve("compare", &cli.common)?),
        Command::Verify(v) => commands::verify(&config::resolve("verify", &cli.common)?, &v),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ringergo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
