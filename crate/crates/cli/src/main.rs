use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;

use config::{GlobalArgs, RunConfig, SEED_VAR};

#[derive(Debug, Parser)]
#[command(
    name = "ortholab",
    version,
    about = "Rogers dilogarithm identities, orthospectra and length densities"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Function {
    #[value(name = "li2")]
    Li2,
    #[value(name = "rogersL")]
    RogersL,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate Li2 or the Rogers L-function at a point.
    Eval {
        function: Function,
        /// Argument; `-inf` is accepted for the Rogers L-function.
        #[arg(allow_hyphen_values = true)]
        x: f64,
    },
    /// Orthospectrum and identity defect of an ideal polygon.
    Polygon {
        #[command(flatten)]
        polygon: commands::PolygonArgs,
    },
    /// Tabulate the length density of one orthogeodesic.
    Density {
        /// Orthogeodesic length.
        #[arg(long)]
        l: f64,
        #[arg(long, default_value_t = 40.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Add the large-t ratio columns.
        #[arg(long)]
        asymptote: bool,
    },
    /// Monte Carlo estimate of the length measure.
    Montecarlo {
        #[command(flatten)]
        polygon: commands::OptionalPolygonArgs,
        /// Sample a single chart `(a, 0) × (1, ∞)` instead of a polygon.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["regular", "vertices"])]
        chart: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0.25)]
        bin_width: f64,
        #[arg(long, default_value_t = 20.0)]
        bin_max: f64,
    },
    /// Partial sums of Σ L(1/r²) against π²/6.
    Lewin {
        #[arg(long = "R", value_name = "R")]
        r_max: u64,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Dilog,
    Polygon,
    Density,
    Montecarlo,
    All,
}

impl From<SuiteArg> for ortholab::verify::Suite {
    fn from(s: SuiteArg) -> Self {
        use ortholab::verify::Suite;
        match s {
            SuiteArg::Dilog => Suite::Dilog,
            SuiteArg::Polygon => Suite::Polygon,
            SuiteArg::Density => Suite::Density,
            SuiteArg::Montecarlo => Suite::Montecarlo,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(ortholab::Error),
    Io(io::Error),
}

impl From<ortholab::Error> for CliError {
    fn from(e: ortholab::Error) -> Self {
        CliError::Library(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    /// Numerical checks that fail inside the library count as verification
    /// failures; everything else is a usage or domain error.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(ortholab::Error::Quadrature { .. } | ortholab::Error::Inconsistent { .. }) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

/// Whether the command's own checks passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let env_seed = std::env::var(SEED_VAR).ok();
    let config = RunConfig::resolve(&cli.global, env_seed.as_deref())?;
    let mut out: Box<dyn Write> = match &config.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let outcome = match cli.command {
        Command::Eval { function, x } => commands::eval(&config, function, x, &mut out),
        Command::Polygon { polygon } => commands::polygon(&config, &polygon, &mut out),
        Command::Density {
            l,
            tmax,
            step,
            asymptote,
        } => commands::density(&config, l, tmax, step, asymptote, &mut out),
        Command::Montecarlo {
            polygon,
            chart,
            samples,
            bin_width,
            bin_max,
        } => commands::montecarlo(&config, &polygon, chart, samples, bin_width, bin_max, &mut out),
        Command::Lewin { r_max } => commands::lewin(&config, r_max, &mut out),
        Command::Verify { suite } => commands::verify(&config, suite.into(), &mut out),
    }?;
    out.flush()?;
    Ok(outcome)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
