//! Monte Carlo experiments: configuration, trial execution, aggregation and
//! CSV persistence.

pub mod capacity;
pub mod config;
pub mod output;
pub mod rng;
pub mod stats_file;
pub mod sweep;
pub mod validate;

use thiserror::Error;

use crate::bounds::BoundError;
use crate::estimators::EstimateError;
use crate::fading::FadingError;
use crate::frontend::FrontendError;
use crate::signalpath::SignalError;

pub use capacity::run_capacity;
pub use config::{ConfigError, ExperimentConfig, Scenario};
pub use output::{degenerate_fraction, read_csv, to_csv_string, write_csv, SweepRow};
pub use sweep::run_sweep;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "IMPEDANCE_LAB_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Fading(#[from] FadingError),
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Worker count from [`THREADS_ENV`]; `None` means one per hardware thread.
pub fn env_threads() -> Result<Option<usize>, HarnessError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::Config(ConfigError::Invalid {
                field: THREADS_ENV,
                reason: format!("expected a positive integer, got '{s}'"),
            })),
        },
    }
}

/// Evaluates `job(0..count)` on a pool of `threads` workers and returns the
/// results in index order.
pub(crate) fn run_indexed<R, F>(threads: Option<usize>, count: usize, job: F) -> Result<Vec<R>, HarnessError>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(&job).collect()))
}
