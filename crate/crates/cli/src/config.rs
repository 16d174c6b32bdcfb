//! The run configuration: library defaults, then `ORTHOLAB_SEED`, then
//! command-line flags.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ortholab::config::Tolerances;
use ortholab::rng::DEFAULT_SEED;

use crate::CliError;

pub const SEED_VAR: &str = "ORTHOLAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the main output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Random seed; overrides ORTHOLAB_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative tolerance for density quadrature [default: 1e-7]
    #[arg(long, global = true)]
    pub quadrature_tol: Option<f64>,
    /// Allowed gap between integrated and closed-form mass [default: 1e-4]
    #[arg(long, global = true)]
    pub mass_tol: Option<f64>,
    /// Relative tolerance for the large-t ratio [default: 0.01]
    #[arg(long, global = true)]
    pub asymptote_tol: Option<f64>,
    /// Tolerance for quadrature oracles [default: 1e-6]
    #[arg(long, global = true)]
    pub oracle_tol: Option<f64>,
    /// Allowed polygon identity defect [default: 1e-9]
    #[arg(long, global = true)]
    pub identity_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// `env_seed` is the value of `ORTHOLAB_SEED`, if set.
    pub fn resolve(args: &GlobalArgs, env_seed: Option<&str>) -> Result<Self, CliError> {
        let seed = match (args.seed, env_seed) {
            (Some(s), _) => s,
            (None, Some(v)) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SEED_VAR}={v:?} is not an unsigned integer")))?,
            (None, None) => DEFAULT_SEED,
        };
        let mut tolerances = Tolerances::default();
        let overrides = [
            (args.quadrature_tol, &mut tolerances.quadrature_tol, "--quadrature-tol"),
            (args.mass_tol, &mut tolerances.mass_tol, "--mass-tol"),
            (args.asymptote_tol, &mut tolerances.asymptote_tol, "--asymptote-tol"),
            (args.oracle_tol, &mut tolerances.oracle_tol, "--oracle-tol"),
            (args.identity_tol, &mut tolerances.identity_tol, "--identity-tol"),
        ];
        for (value, slot, flag) in overrides {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Usage(format!("{flag} must be positive, got {v}")));
                }
                *slot = v;
            }
        }
        Ok(RunConfig {
            seed,
            format: args.format,
            output: args.output.clone(),
            tolerances,
        })
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}
