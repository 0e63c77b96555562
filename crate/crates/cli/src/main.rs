//! `fracpole`: maximum-entropy and most-random spectra from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod input;
mod output;

use commands::{Settings, Source};
use error::CliError;
use input::{load_autocov, InputArgs};
use output::{emit, Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "fracpole",
    version,
    about = "Spectral estimation from autocorrelation data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Quadrature grid size, a power of two in [256, 1048576]
    #[arg(long, global = true, env = "FRACPOLE_GRID")]
    n_grid: Option<usize>,

    /// Relative residual tolerance of the most-random solver
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Write to this file instead of standard output
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Positive-definiteness test with reflection coefficients
    Check(InputArgs),
    /// Maximum-entropy (all-pole) spectrum
    Me(InputArgs),
    /// Most-random (fractional-pole) spectrum
    Mr(InputArgs),
    /// Predictor, smoothers and the harmonic/geometric means
    Filters {
        #[command(flatten)]
        input: InputArgs,
        /// Largest lag kept in the two-sided smoother
        #[arg(long, default_value_t = 16)]
        max_lag: usize,
        /// Also fit a finite-window smoother over lags 1..=window
        #[arg(long)]
        window: Option<usize>,
    },
    /// Draw a realization
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Source::True)]
        source: Source,
        /// Number of samples
        #[arg(short = 'T', long, default_value_t = 1024)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-evaluate a stored spectrum document on a grid
    Eval {
        /// Document written by `me` or `mr`
        #[arg(long)]
        spectrum: PathBuf,
    },
    /// ME and MR side by side
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 16)]
        max_lag: usize,
    },
    /// The built-in worked example against its published values
    Demo,
}

const MIN_GRID: usize = 1 << 8;
const MAX_GRID: usize = 1 << 20;

fn check_grid(n: usize) -> Result<usize, CliError> {
    if n.is_power_of_two() && (MIN_GRID..=MAX_GRID).contains(&n) {
        Ok(n)
    } else {
        Err(CliError::Malformed(format!(
            "--n-grid must be a power of two in [{MIN_GRID}, {MAX_GRID}], got {n}"
        )))
    }
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    if !(cli.tol > 0.0 && cli.tol <= 1e-2) {
        return Err(CliError::Malformed(format!(
            "--tol must lie in (0, 1e-2], got {}",
            cli.tol
        )));
    }
    Ok(Settings {
        n_grid: check_grid(cli.n_grid.unwrap_or(fracpole_core::DEFAULT_GRID))?,
        tol: cli.tol,
    })
}

/// Returns the report plus an error to signal after it has been written.
fn run(cli: &Cli) -> Result<(Report, Option<CliError>), CliError> {
    let s = settings(cli)?;
    let report = match &cli.command {
        Command::Check(input) => return commands::check(&load_autocov(input)?),
        Command::Me(input) => commands::me(&load_autocov(input)?, s)?,
        Command::Mr(input) => commands::mr(&load_autocov(input)?, s)?,
        Command::Filters {
            input,
            max_lag,
            window,
        } => commands::filters(&load_autocov(input)?, s, *max_lag, *window)?,
        Command::Simulate {
            input,
            source,
            length,
            seed,
        } => {
            let r = if input.is_empty() {
                None
            } else {
                Some(load_autocov(input)?)
            };
            commands::simulate(*source, r.as_ref(), s, *length, *seed)?
        }
        Command::Eval { spectrum } => {
            let n_grid = cli.n_grid.map(check_grid).transpose()?;
            commands::eval(spectrum, n_grid)?
        }
        Command::Compare { input, max_lag } => {
            commands::compare(&load_autocov(input)?, s, *max_lag)?
        }
        Command::Demo => commands::demo(s)?,
    };
    Ok((report, None))
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return fail(&CliError::Malformed(e.kind().to_string()));
        }
    };
    match run(&cli) {
        Ok((report, pending)) => {
            if let Err(e) = emit(&report, cli.format, cli.output.as_deref()) {
                return fail(&e);
            }
            match pending {
                Some(e) => fail(&e),
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => fail(&e),
    }
}
