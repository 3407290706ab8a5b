//! Coupling topologies and dense Hamiltonians for the Ising, XY and
//! three-body spin models.
//!
//! All couplings are fixed to 1, so energies are in units of the coupling
//! constant and time is the dimensionless scaled time `τ`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE};
use crate::register::{add_pauli, add_single, PauliAxis};

const MODULE: &str = "hamiltonian";

/// Interaction graph: pair edges for two-body models, ordered triples for the
/// three-body model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingGraph {
    n_sites: usize,
    edges: Vec<(usize, usize)>,
    triples: Vec<[usize; 3]>,
}

impl CouplingGraph {
    pub fn new(
        n_sites: usize,
        edges: Vec<(usize, usize)>,
        triples: Vec<[usize; 3]>,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::domain(MODULE, "graph needs at least one site"));
        }
        let in_range = |s: usize| {
            if s < n_sites {
                Ok(())
            } else {
                Err(Error::domain(
                    MODULE,
                    format!("site {s} out of range for {n_sites} sites"),
                ))
            }
        };
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &edges {
            in_range(a)?;
            in_range(b)?;
            if a == b {
                return Err(Error::domain(MODULE, format!("self-loop on site {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::domain(MODULE, format!("duplicate edge ({a}, {b})")));
            }
        }
        let mut seen_triples = std::collections::HashSet::new();
        for t in &triples {
            for &s in t {
                in_range(s)?;
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::domain(
                    MODULE,
                    format!("triple {t:?} repeats a site"),
                ));
            }
            if !seen_triples.insert(*t) {
                return Err(Error::domain(MODULE, format!("duplicate triple {t:?}")));
            }
        }
        Ok(CouplingGraph {
            n_sites,
            edges,
            triples,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    pub fn degree(&self, site: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == site || b == site)
            .count()
    }

    /// True when the graph has pair edges only.
    pub fn is_pairwise(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Nearest-neighbour cycle `(k, k+1 mod n)`.
pub fn ring_graph(n: usize) -> Result<CouplingGraph> {
    if n < 3 {
        return Err(Error::domain(MODULE, format!("ring needs n ≥ 3, got {n}")));
    }
    CouplingGraph::new(n, (0..n).map(|k| (k, (k + 1) % n)).collect(), Vec::new())
}

/// Central site 0 coupled to outer sites `1..=n_outer`.
pub fn star_graph(n_outer: usize) -> Result<CouplingGraph> {
    if n_outer < 1 {
        return Err(Error::domain(MODULE, "star needs at least one outer site"));
    }
    CouplingGraph::new(
        n_outer + 1,
        (1..=n_outer).map(|k| (0, k)).collect(),
        Vec::new(),
    )
}

/// Triples `(k-1, k, k+1) mod n` for every `k`; no pair edges.
pub fn triple_ring(n: usize) -> Result<CouplingGraph> {
    if n < 3 {
        return Err(Error::domain(
            MODULE,
            format!("triple ring needs n ≥ 3, got {n}"),
        ));
    }
    let triples = (0..n).map(|k| [(k + n - 1) % n, k, (k + 1) % n]).collect();
    CouplingGraph::new(n, Vec::new(), triples)
}

/// Homogeneous field of magnitude `b`, tilted by `phi` through conjugation
/// with `exp(i φ/2 σx)`. Negative `b` flips the sign of the field term.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub b: f64,
    pub phi: f64,
}

impl FieldSpec {
    pub fn new(b: f64, phi: f64) -> Result<Self> {
        if !b.is_finite() || !phi.is_finite() {
            return Err(Error::domain(MODULE, "field parameters must be finite"));
        }
        Ok(FieldSpec { b, phi })
    }

    pub fn zero() -> Self {
        FieldSpec::default()
    }

    /// `exp(i φ/2 σx) σz exp(-i φ/2 σx)`, computed by literal conjugation.
    pub fn local_direction(&self) -> Matrix2<Complex64> {
        let (s, c) = (self.phi / 2.0).sin_cos();
        let rot = Matrix2::identity().scale(c) + PauliAxis::X.matrix() * Complex64::new(0.0, s);
        rot * PauliAxis::Z.matrix() * rot.adjoint()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `-Σ σx σx` over edges.
    #[serde(rename = "ising")]
    IsingXx,
    /// `-Σ (σx σx + σy σy)` over edges.
    Xy,
    /// `-Σ σx σy σx` over triples, `σy` on the middle site.
    #[serde(rename = "three_body")]
    ThreeBodyXyx,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    model: Model,
    graph: CouplingGraph,
    field: FieldSpec,
}

impl HamiltonianSpec {
    pub fn new(model: Model, graph: CouplingGraph, field: FieldSpec) -> Result<Self> {
        match model {
            Model::ThreeBodyXyx => {
                if graph.triples().is_empty() || !graph.edges().is_empty() {
                    return Err(Error::domain(
                        MODULE,
                        "three-body model needs triples and no pair edges",
                    ));
                }
            }
            Model::IsingXx | Model::Xy => {
                if !graph.triples().is_empty() {
                    return Err(Error::domain(MODULE, "two-body models take no triples"));
                }
            }
        }
        FieldSpec::new(field.b, field.phi)?;
        Ok(HamiltonianSpec {
            model,
            graph,
            field,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn graph(&self) -> &CouplingGraph {
        &self.graph
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n_sites(&self) -> usize {
        self.graph.n_sites()
    }

    pub fn with_field(&self, field: FieldSpec) -> Result<Self> {
        HamiltonianSpec::new(self.model, self.graph.clone(), field)
    }

    /// The individual coupling summands (with their minus sign), one matrix
    /// per edge or triple. The field term is not included.
    pub fn coupling_terms(&self) -> Result<Vec<CMatrix>> {
        let n = self.n_sites();
        let dim = 1usize << n;
        let mut terms = Vec::new();
        for factors in self.coupling_strings() {
            let mut term = CMatrix::zeros(dim, dim);
            for f in &factors {
                add_pauli(&mut term, n, -ONE, f)?;
            }
            terms.push(term);
        }
        Ok(terms)
    }

    fn coupling_strings(&self) -> Vec<Vec<Vec<(usize, PauliAxis)>>> {
        use PauliAxis::*;
        match self.model {
            Model::IsingXx => self
                .graph
                .edges()
                .iter()
                .map(|&(a, b)| vec![vec![(a, X), (b, X)]])
                .collect(),
            Model::Xy => self
                .graph
                .edges()
                .iter()
                .map(|&(a, b)| vec![vec![(a, X), (b, X)], vec![(a, Y), (b, Y)]])
                .collect(),
            Model::ThreeBodyXyx => self
                .graph
                .triples()
                .iter()
                .map(|&[l, m, r]| vec![vec![(l, X), (m, Y), (r, X)]])
                .collect(),
        }
    }
}

/// Dense Hermitian matrix of a [`HamiltonianSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    n_sites: usize,
    matrix: CMatrix,
}

impl HamiltonianMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n_sites = linalg::is_power_of_two_dim(matrix.nrows())
            .filter(|_| matrix.is_square())
            .ok_or_else(|| Error::domain(MODULE, "Hamiltonian must be square of size 2^N"))?;
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > Self::HERMITIAN_TOL {
            return Err(Error::domain(
                MODULE,
                format!("matrix not Hermitian (defect {defect:e})"),
            ));
        }
        Ok(HamiltonianMatrix { n_sites, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// `-B Σ_k R_k σz_k R_k†` with `R_k = exp(i φ/2 σx_k)`.
pub fn field_term(n_sites: usize, field: FieldSpec) -> Result<CMatrix> {
    let dim = 1usize << n_sites;
    let mut out = CMatrix::zeros(dim, dim);
    let local = field.local_direction() * Complex64::new(-field.b, 0.0);
    for k in 0..n_sites {
        add_single(&mut out, n_sites, k, &local)?;
    }
    Ok(out)
}

pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<HamiltonianMatrix> {
    let n = spec.n_sites();
    let mut h = if spec.field.b != 0.0 {
        field_term(n, spec.field)?
    } else {
        CMatrix::zeros(1 << n, 1 << n)
    };
    for factors in spec.coupling_strings().iter().flatten() {
        add_pauli(&mut h, n, -ONE, factors)?;
    }
    HamiltonianMatrix::from_matrix(h)
}
