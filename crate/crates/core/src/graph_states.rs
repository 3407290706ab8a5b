//! Stabilizers and graph states generated by zero-field Ising evolution.
//!
//! With `U = ising_product_unitary(g, π/4)`, the operators `K_n = U σz_n U†`
//! commute pairwise and `U|e_m⟩` is their joint eigenstate with the
//! eigenvalues `σz_n|e_m⟩ = e_{n,m}|e_m⟩` of the initial basis state. The
//! stabilizers are built by explicit conjugation, so any pair-edge graph
//! works; the ring closed form `-σx_{l-1} σz_l σx_{l+1}` is exposed
//! separately for cross-checking.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::evolution::ising_product_unitary;
use crate::hamiltonian::CouplingGraph;
use crate::linalg::{CMatrix, ONE};
use crate::register::{bit_of, embed_pauli, PauliAxis, StateVector};

const MODULE: &str = "graph_states";

/// Commuting set `K_n = U σz_n U†` for a coupling graph.
#[derive(Clone, Debug)]
pub struct StabilizerSet {
    operators: Vec<CMatrix>,
    source_graph: CouplingGraph,
}

impl StabilizerSet {
    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn source_graph(&self) -> &CouplingGraph {
        &self.source_graph
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }
}

pub fn stabilizers(graph: &CouplingGraph) -> Result<StabilizerSet> {
    if !graph.is_pairwise() {
        return Err(Error::domain(MODULE, "stabilizers need a pair-edge graph"));
    }
    let n = graph.n_sites();
    let u = ising_product_unitary(graph, FRAC_PI_4)?;
    let u_dag = u.adjoint();
    let operators = (0..n)
        .map(|site| {
            // U σz_n is U with the columns of basis states having qubit n set negated.
            let mut uz = u.clone();
            for col in 0..(1usize << n) {
                if bit_of(col, n, site) == 1 {
                    uz.column_mut(col).neg_mut();
                }
            }
            uz * &u_dag
        })
        .collect();
    Ok(StabilizerSet {
        operators,
        source_graph: graph.clone(),
    })
}

/// `U(π/4)|e_m⟩`.
pub fn graph_state(graph: &CouplingGraph, basis_index: usize) -> Result<StateVector> {
    let n = graph.n_sites();
    if basis_index >= 1 << n {
        return Err(Error::domain(
            MODULE,
            format!("basis index {basis_index} out of range for {n} sites"),
        ));
    }
    let u = ising_product_unitary(graph, FRAC_PI_4)?;
    StateVector::normalized(u.column(basis_index).into_owned())
}

/// Eigenvalues `e_{n,m}`: `+1` where bit `n` of `m` is 0, `-1` where it is 1.
pub fn basis_eigenvalues(n_sites: usize, basis_index: usize) -> Vec<i8> {
    (0..n_sites)
        .map(|q| {
            if bit_of(basis_index, n_sites, q) == 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// `max_n ‖K_n ψ - e_n ψ‖`.
pub fn verify_stabilized(
    psi: &StateVector,
    stabs: &StabilizerSet,
    expected_eigs: &[i8],
) -> Result<f64> {
    verify_against(psi, stabs.operators(), expected_eigs)
}

/// Same as [`verify_stabilized`] for an arbitrary list of operators.
pub fn verify_against(
    psi: &StateVector,
    operators: &[CMatrix],
    expected_eigs: &[i8],
) -> Result<f64> {
    if operators.len() != expected_eigs.len() {
        return Err(Error::Dimension {
            module: MODULE,
            expected: operators.len(),
            found: expected_eigs.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for (k, e) in operators.iter().zip(expected_eigs) {
        if k.nrows() != psi.dim() {
            return Err(Error::Dimension {
                module: MODULE,
                expected: k.nrows(),
                found: psi.dim(),
            });
        }
        if *e != 1 && *e != -1 {
            return Err(Error::domain(MODULE, format!("eigenvalue {e} is not ±1")));
        }
        let residual = k * psi.amplitudes() - psi.amplitudes() * ONE.scale(f64::from(*e));
        worst = worst.max(residual.norm());
    }
    Ok(worst)
}

/// Closed-form ring stabilizer `-σx_{l-1} σz_l σx_{l+1}` (indices mod n).
pub fn ring_stabilizer(n: usize, l: usize) -> Result<CMatrix> {
    if n < 3 || l >= n {
        return Err(Error::domain(
            MODULE,
            format!("invalid ring stabilizer ({n}, {l})"),
        ));
    }
    let factors = [
        ((l + n - 1) % n, PauliAxis::X),
        (l, PauliAxis::Z),
        ((l + 1) % n, PauliAxis::X),
    ];
    Ok(-embed_pauli(n, &factors)?)
}
