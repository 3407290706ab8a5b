//! Config-driven sweeps: time series of pair diagnostics for chosen initial
//! states, computational-basis ensemble statistics over field grids, and
//! their serialization.

pub mod config;
pub mod figures;
pub mod output;
pub mod runner;

use std::path::{Path, PathBuf};

pub use config::{
    FieldGrid, InitialSelection, InitialStateSpec, LinearGrid, Metric, OutputFormat, OutputSpec,
    SweepConfig,
};
pub use runner::{
    ensemble_stats, ensemble_stats_with, make_initial, run_sweep, run_sweep_with, time_series,
    time_series_with, Provenance, Row, Schedule, SweepResult,
};

use crate::error::Result;

/// Largest system for which the `2^N` basis ensemble is accepted.
pub const MAX_ENSEMBLE_SITES: usize = 12;

/// Upper bound on the estimated working set of one sweep.
pub const MEMORY_BUDGET_BYTES: usize = 4 << 30;

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub rows: usize,
    pub files: Vec<PathBuf>,
    pub provenance: Provenance,
}

/// Parses and checks a config file without running it.
pub fn validate(path: &Path) -> Result<SweepConfig> {
    SweepConfig::from_path(path)
}

/// Runs a config file and writes its output. `out` overrides `output.path`.
pub fn run_config(path: &Path, out: Option<&Path>) -> Result<RunSummary> {
    let mut config = SweepConfig::from_path(path)?;
    if let Some(out) = out {
        config.output.path = out.to_path_buf();
    }
    run_and_write(&config)
}

/// Runs an already parsed config and writes its output.
pub fn run_and_write(config: &SweepConfig) -> Result<RunSummary> {
    let result = run_sweep(config)?;
    let files = output::write_result(&result, &config.output.path, config.output.format)?;
    Ok(RunSummary {
        rows: result.rows.len(),
        files,
        provenance: result.provenance,
    })
}
