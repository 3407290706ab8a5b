//! Time evolution of pure states.
//!
//! The general path diagonalizes the Hamiltonian once and propagates any
//! number of initial states to any time through the spectral form
//! `V exp(-iEt) V†`. Zero-field Ising dynamics additionally has a closed
//! product form, and the XY star with a rotated centre has an analytic
//! solution; both serve as independent checks of the spectral path.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{CouplingGraph, HamiltonianMatrix};
use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};
use crate::register::StateVector;

const MODULE: &str = "evolution";

/// Largest tolerated `| ‖ψ(t)‖ - 1 |` before renormalization.
pub const NORM_DRIFT_TOL: f64 = 1e-8;

/// Full dense verification of the eigendecomposition is done up to this
/// dimension; larger systems are checked against a fixed probe vector.
const FULL_CHECK_DIM: usize = 512;

/// Spectral decomposition `H = V diag(E) V†`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Propagator {
    energies: DVector<f64>,
    vectors: CMatrix,
}

impl Propagator {
    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Expands `psi0` in the energy basis once; the result can be evaluated at
    /// any number of times.
    pub fn trajectory(&self, psi0: &StateVector) -> Result<Trajectory<'_>> {
        if psi0.dim() != self.dim() {
            return Err(Error::Dimension {
                module: MODULE,
                expected: self.dim(),
                found: psi0.dim(),
            });
        }
        Ok(Trajectory {
            propagator: self,
            coefficients: self.vectors.adjoint() * psi0.amplitudes(),
        })
    }

    /// Trajectory of computational basis state `index`; avoids a dense
    /// matrix-vector product since `V† e_i` is the conjugated row `i` of `V`.
    pub fn basis_trajectory(&self, index: usize) -> Result<Trajectory<'_>> {
        if index >= self.dim() {
            return Err(Error::domain(
                MODULE,
                format!("basis index {index} out of range"),
            ));
        }
        Ok(Trajectory {
            propagator: self,
            coefficients: self.vectors.row(index).adjoint(),
        })
    }
}

/// An initial state expressed in the energy basis of a [`Propagator`].
#[derive(Clone, Debug)]
pub struct Trajectory<'a> {
    propagator: &'a Propagator,
    coefficients: CVector,
}

impl Trajectory<'_> {
    pub fn at(&self, t: f64) -> Result<StateVector> {
        let phased = CVector::from_iterator(
            self.coefficients.len(),
            self.coefficients
                .iter()
                .zip(self.propagator.energies.iter())
                .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t)),
        );
        let amps = &self.propagator.vectors * phased;
        let norm = amps.norm();
        if (norm - 1.0).abs() >= NORM_DRIFT_TOL {
            return Err(Error::numerical(
                MODULE,
                format!("norm drifted to {norm} at t = {t}"),
            ));
        }
        StateVector::normalized(amps)
    }
}

pub fn diagonalize(h: &HamiltonianMatrix) -> Result<Propagator> {
    let m = h.matrix();
    let defect = linalg::hermiticity_defect(m);
    if defect > HamiltonianMatrix::HERMITIAN_TOL {
        return Err(Error::domain(
            MODULE,
            format!("Hamiltonian not Hermitian (defect {defect:e})"),
        ));
    }
    let (energies, vectors) = linalg::eigh_sorted(m);
    let p = Propagator { energies, vectors };
    check_decomposition(m, &p)?;
    Ok(p)
}

fn check_decomposition(h: &CMatrix, p: &Propagator) -> Result<()> {
    let dim = p.dim();
    let scale = linalg::max_abs(h).max(1.0);
    let diag = CMatrix::from_diagonal(&p.energies.map(|e| Complex64::new(e, 0.0)));
    let (residual, orthonormality) = if dim <= FULL_CHECK_DIM {
        let r = linalg::max_abs_diff(&(h * &p.vectors), &(&p.vectors * &diag));
        let o = linalg::max_abs_diff(
            &(p.vectors.adjoint() * &p.vectors),
            &CMatrix::identity(dim, dim),
        );
        (r, o)
    } else {
        let probe = probe_vector(dim);
        let vx = &p.vectors * &probe;
        let r = max_norm(&(h * &vx - &p.vectors * (&diag * &probe)));
        let o = max_norm(&(p.vectors.adjoint() * vx - &probe));
        (r, o)
    };
    if residual > 1e-8 * scale {
        return Err(Error::numerical(
            MODULE,
            format!("eigen residual {residual:e} too large"),
        ));
    }
    if orthonormality > 1e-9 {
        return Err(Error::numerical(
            MODULE,
            format!("eigenvectors not orthonormal (defect {orthonormality:e})"),
        ));
    }
    Ok(())
}

fn max_norm(v: &CVector) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Deterministic unit vector with spread-out components.
fn probe_vector(dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |k, _| {
        let x = (k as f64 + 1.0) * 0.618_033_988_749_895;
        Complex64::new((x * 7.0).sin(), (x * 3.0).cos())
    });
    let n = v.norm();
    v.unscale(n)
}

/// `V exp(-iEt) V† ψ0`, renormalized.
pub fn evolve(p: &Propagator, psi0: &StateVector, t: f64) -> Result<StateVector> {
    p.trajectory(psi0)?.at(t)
}

/// `Π_edges exp(i τ σx_k σx_l)`, the zero-field Ising propagator at scaled
/// time `τ`.
pub fn ising_product_unitary(graph: &CouplingGraph, tau: f64) -> Result<CMatrix> {
    if !graph.is_pairwise() {
        return Err(Error::domain(
            MODULE,
            "product unitary needs a pair-edge graph",
        ));
    }
    let n = graph.n_sites();
    let dim = 1usize << n;
    let (s, c) = tau.sin_cos();
    let mut u = CMatrix::identity(dim, dim);
    for &(a, b) in graph.edges() {
        let flip = (1 << (n - 1 - a)) | (1 << (n - 1 - b));
        let mut next = u.scale(c);
        for r in 0..dim {
            for col in 0..dim {
                next[(r, col)] += Complex64::new(0.0, s) * u[(r ^ flip, col)];
            }
        }
        u = next;
    }
    Ok(u)
}

/// Closed-form evolution of the XY star with only the central spin rotated:
///
/// `cos(θ/2)|0…0⟩ + sin(θ/2)[cos(2√N t)|1⟩_c|0…0⟩ + i sin(2√N t)|0⟩_c|W_N⟩]`
///
/// Site 0 is the centre and `W_N` is the equal-weight single-excitation state
/// of the `N` outer spins.
pub fn xy_star_analytic(theta: f64, n_outer: usize, t: f64) -> Result<StateVector> {
    if n_outer < 1 {
        return Err(Error::domain(MODULE, "star needs at least one outer spin"));
    }
    let n = n_outer + 1;
    let dim = 1usize << n;
    let (sh, ch) = (theta / 2.0).sin_cos();
    let omega = 2.0 * (n_outer as f64).sqrt();
    let (sw, cw) = (omega * t).sin_cos();
    let mut amps = CVector::from_element(dim, ZERO);
    amps[0] = ONE * ch;
    amps[1 << (n - 1)] = ONE * (sh * cw);
    let outer = Complex64::new(0.0, sh * sw / (n_outer as f64).sqrt());
    for k in 1..=n_outer {
        amps[1 << (n - 1 - k)] = outer;
    }
    StateVector::normalized(amps)
}
