//! Dense multi-qubit registers.
//!
//! Basis index `i` of an `N`-qubit register encodes the bit string
//! `b_0 b_1 … b_{N-1}` with qubit 0 as the most significant bit. Bit value 0
//! is `|0⟩` (spin up, `σz = +1`), bit value 1 is `|1⟩` (spin down).
//!
//! Star topologies put the central spin on qubit 0; [`single_excitation_state`]
//! places coefficient `A_k` (k ≥ 1) on qubit `k - 1`, so a single-excitation
//! state of the outer spins of a star is built by prepending the central
//! qubit explicitly.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};

const MODULE: &str = "register";

pub const NORM_TOL: f64 = 1e-9;

/// Bit of qubit `q` in basis index `index` of an `n`-qubit register.
#[inline]
pub fn bit_of(index: usize, n: usize, q: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

#[inline]
fn mask_of(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn matrix(self) -> Matrix2<Complex64> {
        match self {
            PauliAxis::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            PauliAxis::Y => Matrix2::new(ZERO, -linalg::I, linalg::I, ZERO),
            PauliAxis::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }
}

/// Unit-norm pure state of `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: CVector,
}

impl StateVector {
    /// Wraps `amplitudes`, checking the length is `2^N` and the norm is 1.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n_qubits = linalg::is_power_of_two_dim(amplitudes.len())
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                Error::domain(
                    MODULE,
                    format!(
                        "amplitude length {} is not 2^N with N ≥ 1",
                        amplitudes.len()
                    ),
                )
            })?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(
                MODULE,
                format!("state norm {norm} differs from 1 by more than {NORM_TOL:e}"),
            ));
        }
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(CVector::from_vec(amplitudes))
    }

    /// Normalizes `amplitudes` first. Fails only for a zero vector or a bad length.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::domain(
                MODULE,
                "cannot normalize a zero or non-finite vector",
            ));
        }
        Self::new(amplitudes.unscale(norm))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn density_operator(&self) -> DensityOperator {
        DensityOperator {
            n_qubits: self.n_qubits,
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// Applies a single-qubit operator on `site`. The result is renormalized,
    /// so `u` is expected to be unitary.
    pub fn apply_local(&self, site: usize, u: &Matrix2<Complex64>) -> Result<StateVector> {
        check_site(site, self.n_qubits)?;
        let mask = mask_of(self.n_qubits, site);
        let mut out = self.amplitudes.clone();
        for lo in (0..self.dim()).filter(|i| i & mask == 0) {
            let hi = lo | mask;
            let (a0, a1) = (self.amplitudes[lo], self.amplitudes[hi]);
            out[lo] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
            out[hi] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
        }
        StateVector::normalized(out)
    }

    /// Reshapes the amplitudes into a `2^|keep| × 2^(N-|keep|)` matrix.
    ///
    /// Rows index the kept sites in the given order (first kept site most
    /// significant); columns index the remaining sites in ascending order,
    /// also most-significant-first. Column `r` is the unnormalized state of
    /// the kept sites conditioned on outcome `r` of the complement.
    pub fn split(&self, keep: &[usize]) -> Result<CMatrix> {
        let layout = SplitLayout::new(self.n_qubits, keep)?;
        let mut m = CMatrix::zeros(layout.keep_dim(), layout.rest_dim());
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let (a, r) = layout.split_index(i);
            m[(a, r)] = *amp;
        }
        Ok(m)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let m = self.split(keep)?;
        let rho = &m * m.adjoint();
        Ok(DensityOperator {
            n_qubits: keep.len(),
            matrix: linalg::hermitize(&rho),
        })
    }
}

/// Hermitian, trace-one, positive-semidefinite operator on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityOperator {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const EIGEN_TOL: f64 = 1e-9;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::domain(MODULE, "density operator must be square"));
        }
        let n_qubits = linalg::is_power_of_two_dim(matrix.nrows())
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                Error::domain(
                    MODULE,
                    format!("dimension {} is not 2^N with N ≥ 1", matrix.nrows()),
                )
            })?;
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > Self::HERMITIAN_TOL {
            return Err(Error::domain(
                MODULE,
                format!("not Hermitian (defect {defect:e})"),
            ));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > Self::TRACE_TOL || trace.im.abs() > Self::TRACE_TOL {
            return Err(Error::domain(MODULE, format!("trace {trace} is not 1")));
        }
        let (values, _) = linalg::eigh_sorted(&linalg::hermitize(&matrix));
        if values[0] < -Self::EIGEN_TOL {
            return Err(Error::domain(
                MODULE,
                format!("smallest eigenvalue {:e} is negative", values[0]),
            ));
        }
        Ok(DensityOperator { n_qubits, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let layout = SplitLayout::new(self.n_qubits, keep)?;
        let (kd, rd) = (layout.keep_dim(), layout.rest_dim());
        let full: Vec<Vec<usize>> = (0..kd)
            .map(|a| (0..rd).map(|r| layout.join_index(a, r)).collect())
            .collect();
        let mut out = CMatrix::zeros(kd, kd);
        for a in 0..kd {
            for b in 0..kd {
                out[(a, b)] = (0..rd).map(|r| self.matrix[(full[a][r], full[b][r])]).sum();
            }
        }
        Ok(DensityOperator {
            n_qubits: keep.len(),
            matrix: linalg::hermitize(&out),
        })
    }
}

/// Anything a reduced density operator can be taken from.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator>;
}

impl PartialTrace for StateVector {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        StateVector::partial_trace(self, keep)
    }
}

impl PartialTrace for DensityOperator {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        DensityOperator::partial_trace(self, keep)
    }
}

pub fn partial_trace<S: PartialTrace + ?Sized>(
    state: &S,
    keep: &[usize],
) -> Result<DensityOperator> {
    state.partial_trace(keep)
}

/// Index bookkeeping for splitting a register into kept sites and the rest.
struct SplitLayout {
    n: usize,
    keep: Vec<usize>,
    rest: Vec<usize>,
}

impl SplitLayout {
    fn new(n: usize, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::domain(
                MODULE,
                "partial trace needs at least one kept site",
            ));
        }
        let mut seen = vec![false; n];
        for &s in keep {
            check_site(s, n)?;
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::domain(MODULE, format!("site {s} listed twice")));
            }
        }
        let rest = (0..n).filter(|s| !seen[*s]).collect();
        Ok(SplitLayout {
            n,
            keep: keep.to_vec(),
            rest,
        })
    }

    fn keep_dim(&self) -> usize {
        1 << self.keep.len()
    }

    fn rest_dim(&self) -> usize {
        1 << self.rest.len()
    }

    fn gather(n: usize, index: usize, sites: &[usize]) -> usize {
        sites
            .iter()
            .fold(0, |acc, &s| (acc << 1) | bit_of(index, n, s))
    }

    fn split_index(&self, index: usize) -> (usize, usize) {
        (
            Self::gather(self.n, index, &self.keep),
            Self::gather(self.n, index, &self.rest),
        )
    }

    fn join_index(&self, a: usize, r: usize) -> usize {
        let mut index = 0;
        for (pos, &s) in self.keep.iter().enumerate() {
            if (a >> (self.keep.len() - 1 - pos)) & 1 == 1 {
                index |= mask_of(self.n, s);
            }
        }
        for (pos, &s) in self.rest.iter().enumerate() {
            if (r >> (self.rest.len() - 1 - pos)) & 1 == 1 {
                index |= mask_of(self.n, s);
            }
        }
        index
    }
}

fn check_site(site: usize, n: usize) -> Result<()> {
    if site >= n {
        Err(Error::domain(
            MODULE,
            format!("site {site} out of range for {n} qubits"),
        ))
    } else {
        Ok(())
    }
}

pub fn basis_state(n_qubits: usize, index: usize) -> Result<StateVector> {
    if n_qubits == 0 || n_qubits >= usize::BITS as usize {
        return Err(Error::domain(
            MODULE,
            format!("invalid qubit count {n_qubits}"),
        ));
    }
    let dim = 1usize << n_qubits;
    if index >= dim {
        return Err(Error::domain(
            MODULE,
            format!("basis index {index} out of range for {n_qubits} qubits"),
        ));
    }
    let mut amps = CVector::zeros(dim);
    amps[index] = ONE;
    Ok(StateVector {
        n_qubits,
        amplitudes: amps,
    })
}

/// Tensor product of single-qubit states `(⟨0|ψ_k⟩, ⟨1|ψ_k⟩)`, qubit 0 first.
pub fn product_state(locals: &[(Complex64, Complex64)]) -> Result<StateVector> {
    if locals.is_empty() {
        return Err(Error::domain(
            MODULE,
            "product state needs at least one factor",
        ));
    }
    for (k, (a, b)) in locals.iter().enumerate() {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(
                MODULE,
                format!("factor {k} has norm {norm}, expected 1"),
            ));
        }
    }
    let n = locals.len();
    let amps = CVector::from_fn(1 << n, |i, _| {
        locals
            .iter()
            .enumerate()
            .map(|(q, (a, b))| if bit_of(i, n, q) == 0 { *a } else { *b })
            .product()
    });
    StateVector::normalized(amps)
}

/// `A_0 |0…0⟩ + Σ_{k≥1} A_k |0…1_{k-1}…0⟩` on `coeffs.len() - 1` qubits.
pub fn single_excitation_state(coeffs: &[Complex64]) -> Result<StateVector> {
    if coeffs.len() < 2 {
        return Err(Error::domain(
            MODULE,
            "need A_0 and at least one site coefficient",
        ));
    }
    let weight: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (weight.sqrt() - 1.0).abs() > NORM_TOL {
        return Err(Error::domain(
            MODULE,
            format!("coefficients have norm {}, expected 1", weight.sqrt()),
        ));
    }
    let n = coeffs.len() - 1;
    let mut amps = CVector::zeros(1 << n);
    amps[0] = coeffs[0];
    for (q, c) in coeffs[1..].iter().enumerate() {
        amps[mask_of(n, q)] = *c;
    }
    StateVector::normalized(amps)
}

/// Dense `2^N × 2^N` tensor product of Pauli factors on distinct sites.
pub fn embed_pauli(n_qubits: usize, factors: &[(usize, PauliAxis)]) -> Result<CMatrix> {
    let dim = 1usize << n_qubits;
    let mut out = CMatrix::zeros(dim, dim);
    add_pauli(&mut out, n_qubits, ONE, factors)?;
    Ok(out)
}

/// `target += coeff · (⊗ Pauli factors)` without materializing the product.
pub fn add_pauli(
    target: &mut CMatrix,
    n_qubits: usize,
    coeff: Complex64,
    factors: &[(usize, PauliAxis)],
) -> Result<()> {
    let mut seen = vec![false; n_qubits];
    for &(s, _) in factors {
        check_site(s, n_qubits)?;
        if std::mem::replace(&mut seen[s], true) {
            return Err(Error::domain(MODULE, format!("duplicate Pauli site {s}")));
        }
    }
    let dim = 1usize << n_qubits;
    check_square(target, dim)?;
    let flip = factors
        .iter()
        .filter(|(_, ax)| *ax != PauliAxis::Z)
        .fold(0, |m, &(s, _)| m | mask_of(n_qubits, s));
    for col in 0..dim {
        let mut phase = coeff;
        for &(s, axis) in factors {
            let b = bit_of(col, n_qubits, s);
            phase *= match (axis, b) {
                (PauliAxis::X, _) => ONE,
                (PauliAxis::Y, 0) => linalg::I,
                (PauliAxis::Y, _) => -linalg::I,
                (PauliAxis::Z, 0) => ONE,
                (PauliAxis::Z, _) => -ONE,
            };
        }
        target[(col ^ flip, col)] += phase;
    }
    Ok(())
}

/// Dense embedding of an arbitrary single-qubit operator on `site`.
pub fn embed_single(n_qubits: usize, site: usize, op: &Matrix2<Complex64>) -> Result<CMatrix> {
    let dim = 1usize << n_qubits;
    let mut out = CMatrix::zeros(dim, dim);
    add_single(&mut out, n_qubits, site, op)?;
    Ok(out)
}

/// `target += op` acting on `site`, identity elsewhere.
pub fn add_single(
    target: &mut CMatrix,
    n_qubits: usize,
    site: usize,
    op: &Matrix2<Complex64>,
) -> Result<()> {
    check_site(site, n_qubits)?;
    let dim = 1usize << n_qubits;
    check_square(target, dim)?;
    let mask = mask_of(n_qubits, site);
    for col in 0..dim {
        let b = bit_of(col, n_qubits, site);
        let base = col & !mask;
        target[(base, col)] += op[(0, b)];
        target[(base | mask, col)] += op[(1, b)];
    }
    Ok(())
}

fn check_square(target: &CMatrix, dim: usize) -> Result<()> {
    if target.nrows() != dim || target.ncols() != dim {
        return Err(Error::Dimension {
            module: MODULE,
            expected: dim,
            found: target.nrows(),
        });
    }
    Ok(())
}

/// `⟨a|b⟩`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            module: MODULE,
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.amplitudes.dotc(&b.amplitudes))
}
