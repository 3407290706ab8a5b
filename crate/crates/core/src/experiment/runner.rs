use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{InitialSelection, InitialStateSpec, Metric, SweepConfig};
use super::{MAX_ENSEMBLE_SITES, MEMORY_BUDGET_BYTES};
use crate::error::{Error, Result};
use crate::evolution::{diagonalize, Propagator};
use crate::hamiltonian::{build_hamiltonian, FieldSpec};
use crate::metrics::pair_report;
use crate::register::{basis_state, overlap, product_state, StateVector};

const MODULE: &str = "experiment";

/// Negative variance below this is treated as a genuine numerical failure
/// rather than roundoff.
pub const VARIANCE_CLAMP: f64 = 1e-12;

/// How independent tasks are scheduled. Both produce identical results.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    #[default]
    Parallel,
    Serial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    #[serde(rename = "B")]
    pub b: f64,
    pub phi: f64,
    pub t: f64,
    pub init_id: String,
    pub pair: (usize, usize),
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: SweepConfig,
}

impl Provenance {
    pub fn for_config(config: &SweepConfig) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            config: config.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Names of the metric columns, in the order of `Row::values`.
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of one metric column in row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        let k = self.column_index(name)?;
        self.rows.get(row).map(|r| r.values[k])
    }
}

pub fn make_initial(spec: &InitialStateSpec, n_sites: usize) -> Result<StateVector> {
    let rotated = |theta: f64| {
        let (s, c) = (theta / 2.0).sin_cos();
        (Complex64::new(c, 0.0), Complex64::new(s, 0.0))
    };
    let up = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    if n_sites == 0 {
        return Err(Error::domain(
            MODULE,
            "initial state needs at least one site",
        ));
    }
    match *spec {
        InitialStateSpec::BasisIndex { index } => basis_state(n_sites, index),
        InitialStateSpec::AllRotated { theta } => product_state(&vec![rotated(theta); n_sites]),
        InitialStateSpec::CenterRotated { theta } => {
            let mut locals = vec![up; n_sites];
            locals[0] = rotated(theta);
            product_state(&locals)
        }
        InitialStateSpec::SingleFlip { site } => {
            if site >= n_sites {
                return Err(Error::domain(
                    MODULE,
                    format!("flip site {site} out of range for {n_sites} sites"),
                ));
            }
            basis_state(n_sites, 1 << (n_sites - 1 - site))
        }
    }
}

/// Evaluates the selected metrics for every pair, in `pairs` order.
fn evaluate(
    psi: &StateVector,
    psi0: &StateVector,
    pairs: &[(usize, usize)],
    metrics: &[Metric],
) -> Result<Vec<Vec<f64>>> {
    let need_report = metrics.iter().any(|m| m.needs_pair_report());
    let overlap_abs = if metrics.contains(&Metric::OverlapAbs) {
        overlap(psi0, psi)?.norm()
    } else {
        0.0
    };
    pairs
        .iter()
        .map(|&pair| {
            let report = if need_report {
                Some(pair_report(psi, pair)?)
            } else {
                None
            };
            Ok(metrics
                .iter()
                .map(|m| match (m, &report) {
                    (Metric::OverlapAbs, _) => overlap_abs,
                    (_, None) => {
                        unreachable!("pair report computed whenever a pair metric is selected")
                    }
                    (Metric::Concurrence, Some(r)) => r.concurrence,
                    (Metric::CAssist, Some(r)) => r.concurrence_of_assistance,
                    (Metric::SqrtTangleI, Some(r)) => r.sqrt_one_tangle_i,
                    (Metric::SqrtTangleJ, Some(r)) => r.sqrt_one_tangle_j,
                    (Metric::Eof, Some(r)) => r.eof,
                    (Metric::CkwResidualI, Some(r)) => r.ckw_residual_i,
                    (Metric::LeLowerBound, Some(r)) => r.le_lower_bound,
                })
                .collect())
        })
        .collect()
}

fn run_tasks<T, F>(count: usize, schedule: Schedule, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    match schedule {
        Schedule::Parallel => (0..count).into_par_iter().map(task).collect(),
        Schedule::Serial => (0..count).map(task).collect(),
    }
}

fn check_resources(config: &SweepConfig, initial_count: usize) -> Result<()> {
    let n = config.n_sites();
    if n >= 30 {
        return Err(Error::Resource(format!(
            "{n} spins cannot be stored densely"
        )));
    }
    let dim = 1usize << n;
    // Hamiltonian, eigenvectors and one scratch matrix.
    let dense = (dim as u128) * (dim as u128) * 16 * 3;
    let rows = (config.times.steps as u128)
        * (config.pairs.len() as u128)
        * (config.field_grid.len() as u128)
        * (initial_count as u128);
    let table = rows * (config.metrics.len() as u128 * 2 + 8) * 8;
    let needed = dense + table;
    if needed > MEMORY_BUDGET_BYTES as u128 {
        return Err(Error::Resource(format!(
            "sweep needs about {} MiB, budget is {} MiB",
            needed >> 20,
            MEMORY_BUDGET_BYTES >> 20
        )));
    }
    Ok(())
}

fn propagator_for(config: &SweepConfig, field: FieldSpec) -> Result<Propagator> {
    let spec = config.hamiltonian.with_field(field)?;
    diagonalize(&build_hamiltonian(&spec)?)
}

/// Evolves every listed initial state and reports the selected metrics.
///
/// Rows are ordered by field point `(B, φ)`, then initial state, then time,
/// then pair.
pub fn time_series(config: &SweepConfig) -> Result<SweepResult> {
    time_series_with(config, Schedule::Parallel)
}

pub fn time_series_with(config: &SweepConfig, schedule: Schedule) -> Result<SweepResult> {
    let InitialSelection::States(inits) = &config.initial else {
        return Err(Error::domain(
            MODULE,
            "time_series needs explicit initial states",
        ));
    };
    check_resources(config, inits.len())?;
    let n = config.n_sites();
    let times = config.times.points();
    let psi0s = inits
        .iter()
        .map(|s| make_initial(s, n))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<String> = inits.iter().map(InitialStateSpec::label).collect();

    let mut rows = Vec::with_capacity(
        config.field_grid.len() * inits.len() * times.len() * config.pairs.len(),
    );
    for field in config.field_grid.points() {
        let propagator = propagator_for(config, field)?;
        let trajectories = psi0s
            .iter()
            .map(|psi0| propagator.trajectory(psi0))
            .collect::<Result<Vec<_>>>()?;
        let blocks = run_tasks(inits.len() * times.len(), schedule, |task| {
            let (k, ti) = (task / times.len(), task % times.len());
            let t = times[ti];
            let psi = if t == 0.0 {
                psi0s[k].clone()
            } else {
                trajectories[k].at(t)?
            };
            evaluate(&psi, &psi0s[k], &config.pairs, &config.metrics)
        })?;
        for (task, block) in blocks.into_iter().enumerate() {
            let (k, ti) = (task / times.len(), task % times.len());
            for (&pair, values) in config.pairs.iter().zip(block) {
                rows.push(Row {
                    b: field.b,
                    phi: field.phi,
                    t: times[ti],
                    init_id: labels[k].clone(),
                    pair,
                    values,
                });
            }
        }
    }
    Ok(SweepResult {
        columns: config
            .metrics
            .iter()
            .map(|m| m.column().to_string())
            .collect(),
        rows,
        provenance: Provenance::for_config(config),
    })
}

/// Mean and population standard deviation of the selected metrics over all
/// `2^N` computational basis initial states.
///
/// One diagonalization per field point is shared by every basis state and
/// time. Sums run in basis-index order so the result does not depend on
/// scheduling.
pub fn ensemble_stats(config: &SweepConfig) -> Result<SweepResult> {
    ensemble_stats_with(config, Schedule::Parallel)
}

pub fn ensemble_stats_with(config: &SweepConfig, schedule: Schedule) -> Result<SweepResult> {
    if !config.is_ensemble() {
        return Err(Error::domain(
            MODULE,
            "ensemble_stats needs the basis ensemble",
        ));
    }
    let n = config.n_sites();
    if n > MAX_ENSEMBLE_SITES {
        return Err(Error::Resource(format!(
            "ensemble over 2^{n} basis states exceeds the {MAX_ENSEMBLE_SITES}-spin limit"
        )));
    }
    check_resources(config, 1)?;
    let dim = 1usize << n;
    let times = config.times.points();
    let n_metrics = config.metrics.len();
    let n_pairs = config.pairs.len();
    let basis = (0..dim)
        .map(|i| basis_state(n, i))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(config.field_grid.len() * times.len() * n_pairs);
    for field in config.field_grid.points() {
        let propagator = propagator_for(config, field)?;
        for &t in &times {
            let per_state = run_tasks(dim, schedule, |i| {
                let psi = if t == 0.0 {
                    basis[i].clone()
                } else {
                    propagator.basis_trajectory(i)?.at(t)?
                };
                evaluate(&psi, &basis[i], &config.pairs, &config.metrics)
            })?;
            for (p, &pair) in config.pairs.iter().enumerate() {
                let mut sum = vec![0.0; n_metrics];
                let mut sum_sq = vec![0.0; n_metrics];
                for state in &per_state {
                    for (m, &v) in state[p].iter().enumerate() {
                        sum[m] += v;
                        sum_sq[m] += v * v;
                    }
                }
                let mut values = Vec::with_capacity(2 * n_metrics);
                for m in 0..n_metrics {
                    let mean = sum[m] / dim as f64;
                    let var = sum_sq[m] / dim as f64 - mean * mean;
                    if var < -VARIANCE_CLAMP {
                        return Err(Error::numerical(
                            MODULE,
                            format!(
                                "negative variance {var:e} for {}",
                                config.metrics[m].column()
                            ),
                        ));
                    }
                    values.push(mean);
                    values.push(var.max(0.0).sqrt());
                }
                rows.push(Row {
                    b: field.b,
                    phi: field.phi,
                    t,
                    init_id: "ensemble".to_string(),
                    pair,
                    values,
                });
            }
        }
    }
    let columns = config
        .metrics
        .iter()
        .flat_map(|m| {
            [
                format!("mean_{}", m.column()),
                format!("std_{}", m.column()),
            ]
        })
        .collect();
    Ok(SweepResult {
        columns,
        rows,
        provenance: Provenance::for_config(config),
    })
}

/// Dispatches to [`time_series`] or [`ensemble_stats`].
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(config, Schedule::Parallel)
}

pub fn run_sweep_with(config: &SweepConfig, schedule: Schedule) -> Result<SweepResult> {
    match config.initial {
        InitialSelection::Ensemble => ensemble_stats_with(config, schedule),
        InitialSelection::States(_) => time_series_with(config, schedule),
    }
}
