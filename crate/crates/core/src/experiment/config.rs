//! Sweep configuration: TOML schema, validation and the resolved
//! [`SweepConfig`].
//!
//! ```toml
//! model = "xy"                  # "ising" | "xy" | "three_body"
//! topology = "star"             # "ring" | "star" | "custom"
//! n_outer = 6                   # star; ring and custom use n_spins
//! field = { B = 0.0, phi = 0.0 }          # or field_grid = { B = [..], phi = [..] }
//! initial = { kind = "center_rotated", theta = 3.141592653589793 }
//! times = { start = 0.0, stop = 2.0, steps = 600 }
//! pairs = [[1, 2]]
//! metrics = ["concurrence", "c_assist"]
//! output = { path = "out.csv", format = "csv" }
//! seed = 0
//! ```
//!
//! `initial` is either the string `"ensemble"` (all computational basis
//! states), a table, or an array of tables. Rotated kinds take `theta` or
//! `theta_grid = { start, stop, steps }`.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    ring_graph, star_graph, triple_ring, CouplingGraph, FieldSpec, HamiltonianSpec, Model,
};

const KNOWN_KEYS: &[&str] = &[
    "model",
    "topology",
    "n_spins",
    "n_outer",
    "edges",
    "triples",
    "field",
    "field_grid",
    "initial",
    "times",
    "pairs",
    "metrics",
    "output",
    "seed",
];

/// Uniform grid `start + k (stop - start) / (steps - 1)`, both ends included.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl LinearGrid {
    fn validate(&self, key: &str) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::config(
                key,
                format!("steps must be ≥ 2, got {}", self.steps),
            ));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.start >= self.stop {
            return Err(Error::config(
                key,
                format!(
                    "need finite start < stop, got {} .. {}",
                    self.start, self.stop
                ),
            ));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop
                } else {
                    self.start + span * (k as f64) / last
                }
            })
            .collect()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialStateSpec {
    /// Computational basis state.
    BasisIndex { index: usize },
    /// Every spin in `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
    AllRotated { theta: f64 },
    /// Site 0 rotated by `θ`, the rest in `|0⟩`.
    CenterRotated { theta: f64 },
    /// All spins up except `site`.
    SingleFlip { site: usize },
}

impl InitialStateSpec {
    /// Identifier used in the `init_id` output column.
    pub fn label(&self) -> String {
        match self {
            InitialStateSpec::BasisIndex { index } => format!("basis:{index}"),
            InitialStateSpec::AllRotated { theta } => format!("all_rotated:{theta:.16e}"),
            InitialStateSpec::CenterRotated { theta } => format!("center_rotated:{theta:.16e}"),
            InitialStateSpec::SingleFlip { site } => format!("single_flip:{site}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSelection {
    States(Vec<InitialStateSpec>),
    /// All `2^N` computational basis states, aggregated into mean and
    /// standard deviation.
    Ensemble,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    OverlapAbs,
    Concurrence,
    CAssist,
    SqrtTangleI,
    SqrtTangleJ,
    Eof,
    CkwResidualI,
    LeLowerBound,
}

impl Metric {
    /// Canonical column order.
    pub const ALL: [Metric; 8] = [
        Metric::OverlapAbs,
        Metric::Concurrence,
        Metric::CAssist,
        Metric::SqrtTangleI,
        Metric::SqrtTangleJ,
        Metric::Eof,
        Metric::CkwResidualI,
        Metric::LeLowerBound,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Metric::OverlapAbs => "overlap_abs",
            Metric::Concurrence => "concurrence",
            Metric::CAssist => "c_assist",
            Metric::SqrtTangleI => "sqrt_tangle_i",
            Metric::SqrtTangleJ => "sqrt_tangle_j",
            Metric::Eof => "eof",
            Metric::CkwResidualI => "ckw_residual_i",
            Metric::LeLowerBound => "le_lower_bound",
        }
    }

    pub fn from_column(name: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.column() == name)
    }

    /// Whether evaluating the metric needs a full [`crate::metrics::PairReport`].
    pub fn needs_pair_report(self) -> bool {
        self != Metric::OverlapAbs
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    pub phi: Vec<f64>,
}

impl FieldGrid {
    pub fn single(field: FieldSpec) -> Self {
        FieldGrid {
            b: vec![field.b],
            phi: vec![field.phi],
        }
    }

    /// Field points in row-major `(B, φ)` order.
    pub fn points(&self) -> Vec<FieldSpec> {
        self.b
            .iter()
            .flat_map(|&b| self.phi.iter().map(move |&phi| FieldSpec { b, phi }))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.b.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fully validated sweep description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub hamiltonian: HamiltonianSpec,
    pub initial: InitialSelection,
    pub times: LinearGrid,
    pub pairs: Vec<(usize, usize)>,
    pub metrics: Vec<Metric>,
    pub field_grid: FieldGrid,
    pub output: OutputSpec,
    pub seed: u64,
}

impl SweepConfig {
    pub fn n_sites(&self) -> usize {
        self.hamiltonian.n_sites()
    }

    pub fn is_ensemble(&self) -> bool {
        matches!(self.initial, InitialSelection::Ensemble)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config(error_key(&e), e.message().to_string()))?;
        Self::from_table(&table)
    }

    fn from_table(table: &toml::Table) -> Result<Self> {
        if let Some(unknown) = table.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(Error::config(unknown.clone(), "unknown key"));
        }

        let model = match required::<String>(table, "model")?.as_str() {
            "ising" => Model::IsingXx,
            "xy" => Model::Xy,
            "three_body" => Model::ThreeBodyXyx,
            other => {
                return Err(Error::config(
                    "model",
                    format!("expected \"ising\", \"xy\" or \"three_body\", got {other:?}"),
                ))
            }
        };
        let graph = parse_graph(table, model)?;
        let n = graph.n_sites();

        let field_grid = match (table.get("field"), table.get("field_grid")) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "field_grid",
                    "give either `field` or `field_grid`, not both",
                ))
            }
            (Some(_), None) => {
                let f: FieldPoint = required(table, "field")?;
                FieldGrid::single(
                    FieldSpec::new(f.b, f.phi)
                        .map_err(|e| Error::config("field", e.to_string()))?,
                )
            }
            (None, Some(_)) => {
                let g: FieldGrid = required(table, "field_grid")?;
                if g.is_empty() {
                    return Err(Error::config(
                        "field_grid",
                        "B and phi lists must be non-empty",
                    ));
                }
                if g.b.iter().chain(&g.phi).any(|x| !x.is_finite()) {
                    return Err(Error::config("field_grid", "values must be finite"));
                }
                g
            }
            (None, None) => FieldGrid::single(FieldSpec::zero()),
        };
        let first = field_grid.points()[0];
        let hamiltonian = HamiltonianSpec::new(model, graph, first)
            .map_err(|e| Error::config("model", e.to_string()))?;

        let initial = parse_initial(table, n)?;

        let times: LinearGrid = required(table, "times")?;
        times.validate("times")?;

        let raw_pairs: Vec<[usize; 2]> = required(table, "pairs")?;
        if raw_pairs.is_empty() {
            return Err(Error::config("pairs", "at least one pair is required"));
        }
        let mut pairs = Vec::with_capacity(raw_pairs.len());
        for [i, j] in raw_pairs {
            if i >= n || j >= n || i == j {
                return Err(Error::config(
                    "pairs",
                    format!("pair [{i}, {j}] invalid for {n} spins"),
                ));
            }
            pairs.push((i, j));
        }

        let metrics = match table.get("metrics") {
            None => Metric::ALL.to_vec(),
            Some(_) => {
                let names: Vec<String> = required(table, "metrics")?;
                let mut metrics = Vec::with_capacity(names.len());
                for name in &names {
                    let m = Metric::from_column(name).ok_or_else(|| {
                        Error::config("metrics", format!("unknown metric {name:?}"))
                    })?;
                    if metrics.contains(&m) {
                        return Err(Error::config(
                            "metrics",
                            format!("metric {name:?} listed twice"),
                        ));
                    }
                    metrics.push(m);
                }
                if metrics.is_empty() {
                    return Err(Error::config("metrics", "at least one metric is required"));
                }
                metrics.sort();
                metrics
            }
        };

        let output: OutputSpec = required(table, "output")?;
        let seed = optional::<u64>(table, "seed")?.unwrap_or(0);

        Ok(SweepConfig {
            hamiltonian,
            initial,
            times,
            pairs,
            metrics,
            field_grid,
            output,
            seed,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldPoint {
    #[serde(rename = "B")]
    b: f64,
    #[serde(default)]
    phi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    kind: String,
    theta: Option<f64>,
    theta_grid: Option<LinearGrid>,
    site: Option<usize>,
    index: Option<usize>,
}

fn error_key(e: &toml::de::Error) -> String {
    e.span().map_or_else(
        || "<document>".to_string(),
        |s| format!("<document at byte {}>", s.start),
    )
}

fn optional<T: DeserializeOwned>(table: &toml::Table, key: &str) -> Result<Option<T>> {
    table
        .get(key)
        .map(|v| {
            v.clone()
                .try_into::<T>()
                .map_err(|e| Error::config(key, e.message().trim().to_string()))
        })
        .transpose()
}

fn required<T: DeserializeOwned>(table: &toml::Table, key: &str) -> Result<T> {
    optional(table, key)?.ok_or_else(|| Error::config(key, "missing required key"))
}

fn parse_graph(table: &toml::Table, model: Model) -> Result<CouplingGraph> {
    let topology: String = required(table, "topology")?;
    let graph_err = |key: &str| {
        let key = key.to_string();
        move |e: Error| Error::config(key, e.to_string())
    };
    match topology.as_str() {
        "ring" => {
            let n: usize = required(table, "n_spins")?;
            if model == Model::ThreeBodyXyx {
                triple_ring(n).map_err(graph_err("n_spins"))
            } else {
                ring_graph(n).map_err(graph_err("n_spins"))
            }
        }
        "star" => {
            if model == Model::ThreeBodyXyx {
                return Err(Error::config(
                    "topology",
                    "three_body model needs a ring or custom triples",
                ));
            }
            let n_outer: usize = required(table, "n_outer")?;
            star_graph(n_outer).map_err(graph_err("n_outer"))
        }
        "custom" => {
            let n: usize = required(table, "n_spins")?;
            let edges: Vec<[usize; 2]> = optional(table, "edges")?.unwrap_or_default();
            let triples: Vec<[usize; 3]> = optional(table, "triples")?.unwrap_or_default();
            let key = if model == Model::ThreeBodyXyx {
                "triples"
            } else {
                "edges"
            };
            CouplingGraph::new(n, edges.into_iter().map(|[a, b]| (a, b)).collect(), triples)
                .map_err(graph_err(key))
        }
        other => Err(Error::config(
            "topology",
            format!("expected \"ring\", \"star\" or \"custom\", got {other:?}"),
        )),
    }
}

fn parse_initial(table: &toml::Table, n: usize) -> Result<InitialSelection> {
    let value = table
        .get("initial")
        .ok_or_else(|| Error::config("initial", "missing required key"))?;
    let raws: Vec<RawInitial> = match value {
        toml::Value::String(s) if s == "ensemble" => {
            if n > super::MAX_ENSEMBLE_SITES {
                return Err(Error::Resource(format!(
                    "ensemble over 2^{n} basis states exceeds the {}-spin limit",
                    super::MAX_ENSEMBLE_SITES
                )));
            }
            return Ok(InitialSelection::Ensemble);
        }
        toml::Value::String(s) => {
            return Err(Error::config(
                "initial",
                format!("expected \"ensemble\" or a table, got {s:?}"),
            ))
        }
        toml::Value::Array(_) => required(table, "initial")?,
        _ => vec![required(table, "initial")?],
    };
    if raws.is_empty() {
        return Err(Error::config(
            "initial",
            "at least one initial state is required",
        ));
    }
    let mut states = Vec::new();
    for raw in raws {
        expand_initial(&raw, n, &mut states)?;
    }
    Ok(InitialSelection::States(states))
}

fn expand_initial(raw: &RawInitial, n: usize, out: &mut Vec<InitialStateSpec>) -> Result<()> {
    let thetas = || -> Result<Vec<f64>> {
        match (raw.theta, raw.theta_grid) {
            (Some(t), None) if t.is_finite() => Ok(vec![t]),
            (None, Some(g)) => {
                g.validate("initial.theta_grid")?;
                Ok(g.points())
            }
            (Some(_), Some(_)) => Err(Error::config(
                "initial.theta",
                "give theta or theta_grid, not both",
            )),
            _ => Err(Error::config(
                "initial.theta",
                "rotated kinds need a finite theta or theta_grid",
            )),
        }
    };
    let unused = |key: &str, present: bool| {
        if present {
            Err(Error::config(
                format!("initial.{key}"),
                format!("not used by kind {:?}", raw.kind),
            ))
        } else {
            Ok(())
        }
    };
    match raw.kind.as_str() {
        "basis_index" => {
            unused("theta", raw.theta.is_some() || raw.theta_grid.is_some())?;
            unused("site", raw.site.is_some())?;
            let index = raw.index.ok_or_else(|| Error::config("initial.index", "missing"))?;
            if index >= 1 << n {
                return Err(Error::config("initial.index", format!("{index} out of range for {n} spins")));
            }
            out.push(InitialStateSpec::BasisIndex { index });
        }
        "single_flip" => {
            unused("theta", raw.theta.is_some() || raw.theta_grid.is_some())?;
            unused("index", raw.index.is_some())?;
            let site = raw.site.ok_or_else(|| Error::config("initial.site", "missing"))?;
            if site >= n {
                return Err(Error::config("initial.site", format!("{site} out of range for {n} spins")));
            }
            out.push(InitialStateSpec::SingleFlip { site });
        }
        "all_rotated" | "center_rotated" => {
            unused("site", raw.site.is_some())?;
            unused("index", raw.index.is_some())?;
            for theta in thetas()? {
                out.push(if raw.kind == "all_rotated" {
                    InitialStateSpec::AllRotated { theta }
                } else {
                    InitialStateSpec::CenterRotated { theta }
                });
            }
        }
        other => {
            return Err(Error::config(
                "initial.kind",
                format!("unknown kind {other:?}; expected basis_index, all_rotated, center_rotated or single_flip"),
            ))
        }
    }
    Ok(())
}
