//! `davies`: batch front end for davies-core.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 numerical failure.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Validation,
    Numerical,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn validation(m: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Validation, message: m.into() }
    }

    pub fn numerical(m: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Numerical, message: m.into() }
    }

    pub fn io(m: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Io, message: m.into() }
    }

    fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::Io => 1,
            ErrorKind::Validation => 2,
            ErrorKind::Numerical => 3,
        }
    }
}

impl From<davies_core::Error> for CliError {
    fn from(e: davies_core::Error) -> Self {
        if e.is_validation() {
            Self::validation(e.to_string())
        } else {
            Self::numerical(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "davies", version, about = "Davies generators, level shift operators and exact benchmarks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir` of the config; default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized inputs (`"rho0": "random"`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bath admissibility and Fermi-golden-rule checks.
    Fgr,
    /// Davies generator, Lamb shift and level shift operators.
    Generator,
    /// Markovian trajectory.
    Evolve {
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        n_times: Option<usize>,
    },
    /// Spectral density, correlation function, derivative norms and decay.
    Correlation {
        #[arg(long, default_value_t = 10.0)]
        t_min: f64,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 46)]
        n_points: usize,
        #[arg(long, default_value_t = 10.0)]
        omega_max: f64,
    },
    /// Exact finite-bath dynamics against the Markovian semigroup.
    Bench {
        /// Comma-separated couplings.
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
    },
    /// Perturbative parameter ledger and coupling threshold.
    Threshold {
        /// Temperature for the threshold (default 1/beta of the config).
        #[arg(long)]
        temperature: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        c0_prime: f64,
    },
    /// Two-level reference: rates table and closed form against the generator.
    SpinbosonDemo {
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        #[arg(long, default_value_t = 101)]
        n_times: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        let v: CliError = davies_core::Error::FgrViolated("x".into()).into();
        assert_eq!(v.exit_code(), 2);
        let n: CliError = davies_core::Error::Linalg("x".into()).into();
        assert_eq!(n.exit_code(), 3);
        assert_eq!(CliError::io("x").exit_code(), 1);
    }
}
