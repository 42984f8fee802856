//! Experiment runner for adiabatic vacuum preparation and vacuum filtering.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod table;

pub use commands::{cmd_diag, cmd_filter_run, cmd_refine, cmd_sweep, DiagReport, FilterRunReport, RefineReport, SweepReport};
pub use config::ExperimentConfig;
pub use error::{CliError, ConfigError};

/// Environment variable capping rayon worker threads.
pub const THREADS_ENV: &str = "VACUUM_REFINE_THREADS";

/// Applies `VACUUM_REFINE_THREADS` to the global rayon pool. Only the first
/// call in a process takes effect.
pub fn configure_threads() -> Result<(), ConfigError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ConfigError::new(THREADS_ENV, format!("expected a positive integer, got {value:?}")))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
