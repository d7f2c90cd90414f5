//! `umbilic`: command-line front end for the curvature, inversion and
//! quadrature routines of `umbilic-core`.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical non-convergence,
//! 3 a check failed (graph condition, convexity, divergence tolerance, ...).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] umbilic_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use umbilic_core::Error as E;
        match self {
            CliError::Core(E::NonConvergence(_)) => 2,
            CliError::Core(
                E::GraphCondition { .. }
                | E::NotAGraph(_)
                | E::NotConvex { .. }
                | E::NotNormalizedAtOrigin { .. }
                | E::Regularity { .. },
            ) => 3,
            CliError::Check(_) => 3,
            _ => 1,
        }
    }
}

const THREADS_VAR: &str = "UMBILIC_THREADS";

fn thread_pool() -> Result<Option<rayon::ThreadPool>, CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("umbilic: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = thread_pool().and_then(|pool| match pool {
        Some(p) => p.install(|| commands::run(cli)),
        None => commands::run(cli),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("umbilic: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
