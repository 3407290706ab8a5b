//! Bipartite entanglement measures on one- and two-qubit reductions.
//!
//! All two-qubit measures share the spectrum `λ1 ≥ … ≥ λ4` of
//! `R = sqrt(sqrt(ρ) ρ̃ sqrt(ρ))`, where `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`:
//! concurrence is `max(0, λ1 - λ2 - λ3 - λ4)` and concurrence of assistance
//! is `Σ λ_i`. The spectrum is read off as the singular values of
//! `sqrt(ρ) sqrt(ρ̃)`, which avoids taking square roots of eigenvalues that
//! are roundoff-sized for rank-deficient pair states.
//!
//! Pair reductions of pure states skip `sqrt(ρ)` altogether, see
//! [`pure_pair_lambdas`].

use nalgebra::{Matrix2, Matrix4, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::register::{DensityOperator, PauliAxis, StateVector};

const MODULE: &str = "metrics";

/// Values within this distance outside `[0, 1]` are clamped; further out is an error.
pub const CLAMP_WINDOW: f64 = 1e-9;

/// Most negative CKW residual accepted as roundoff.
pub const CKW_TOL: f64 = 1e-8;

/// Measurement outcomes less likely than this are skipped.
pub const OUTCOME_CUTOFF: f64 = 1e-14;

fn clamp_unit(value: f64, what: &str) -> Result<f64> {
    if !(-CLAMP_WINDOW..=1.0 + CLAMP_WINDOW).contains(&value) {
        return Err(Error::numerical(
            MODULE,
            format!("{what} = {value} outside [0, 1]"),
        ));
    }
    Ok(value.clamp(0.0, 1.0))
}

fn require_qubits(rho: &DensityOperator, n: usize) -> Result<()> {
    if rho.n_qubits() != n {
        return Err(Error::Dimension {
            module: MODULE,
            expected: 1 << n,
            found: rho.dim(),
        });
    }
    Ok(())
}

/// `4 det ρ` for a single-qubit reduced state.
pub fn one_tangle(rho: &DensityOperator) -> Result<f64> {
    require_qubits(rho, 1)?;
    let m = rho.matrix();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    clamp_unit(4.0 * det.re, "one-tangle")
}

/// `√T` of `site` in a pure state, as `2 |det R|` with `Mᵀ = QR` and `M`
/// the two-row amplitude matrix of `site`. Near-product states give
/// roundoff-sized values rather than the square root of roundoff.
pub fn pure_sqrt_one_tangle(psi: &StateVector, site: usize) -> Result<f64> {
    let n = psi.n_qubits();
    if site >= n {
        return Err(Error::domain(
            MODULE,
            format!("site {site} invalid for {n} qubits"),
        ));
    }
    let r = psi.split(&[site])?.transpose().qr().r();
    if r.nrows() < 2 {
        return Ok(0.0);
    }
    clamp_unit(2.0 * (r[(0, 0)] * r[(1, 1)]).norm(), "sqrt one-tangle")
}

fn sigma_yy() -> Matrix4<Complex64> {
    let y = PauliAxis::Y.matrix();
    y.kronecker(&y)
}

fn to_matrix4(m: &CMatrix) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| m[(r, c)])
}

/// `(σy⊗σy) ρ* (σy⊗σy)`, conjugation taken in the computational basis.
pub fn spin_flip(rho: &DensityOperator) -> Result<CMatrix> {
    require_qubits(rho, 2)?;
    let yy = sigma_yy();
    let flipped = yy * to_matrix4(rho.matrix()).conjugate() * yy;
    Ok(CMatrix::from_fn(4, 4, |r, c| flipped[(r, c)]))
}

/// Eigenvalues of `R = sqrt(sqrt(ρ) ρ̃ sqrt(ρ))`, descending.
pub fn wootters_lambdas(rho: &DensityOperator) -> Result<[f64; 4]> {
    require_qubits(rho, 2)?;
    let root = to_matrix4(&linalg::sqrt_psd(rho.matrix(), MODULE)?);
    let yy = sigma_yy();
    // sqrt(ρ̃) = (σy⊗σy) sqrt(ρ)* (σy⊗σy)
    let root_flipped = yy * root.conjugate() * yy;
    let svd = SVD::new(root * root_flipped, false, false);
    let mut lambdas = [0.0; 4];
    for (dst, s) in lambdas.iter_mut().zip(svd.singular_values.iter()) {
        *dst = *s;
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(lambdas)
}

/// Wootters spectrum of the `pair` reduction of a pure state.
///
/// With `M` the amplitude matrix (pair rows, complement columns) and
/// `Mᵀ = QR`, the λ_i are the singular values of `R (σy⊗σy) Rᵀ`. Roundoff in
/// the amplitudes therefore shows up in λ at the same size instead of its
/// square root.
pub fn pure_pair_lambdas(psi: &StateVector, pair: (usize, usize)) -> Result<[f64; 4]> {
    check_pair(psi, pair)?;
    let r = psi.split(&[pair.0, pair.1])?.transpose().qr().r();
    let yy = sigma_yy();
    let yy = CMatrix::from_fn(4, 4, |a, b| yy[(a, b)]);
    let s = &r * yy * r.transpose();
    let mut lambdas = [0.0; 4];
    for (dst, v) in lambdas.iter_mut().zip(s.singular_values().iter()) {
        *dst = *v;
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(lambdas)
}

pub fn concurrence_from_lambdas(lambdas: &[f64; 4]) -> f64 {
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

pub fn assistance_from_lambdas(lambdas: &[f64; 4]) -> f64 {
    lambdas.iter().sum()
}

pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    clamp_unit(
        concurrence_from_lambdas(&wootters_lambdas(rho)?),
        "concurrence",
    )
}

pub fn concurrence_of_assistance(rho: &DensityOperator) -> Result<f64> {
    clamp_unit(
        assistance_from_lambdas(&wootters_lambdas(rho)?),
        "concurrence of assistance",
    )
}

/// `-x log2 x - (1-x) log2(1-x)` with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Two-qubit entanglement of formation from the concurrence.
pub fn entanglement_of_formation(c: f64) -> Result<f64> {
    if !(-CLAMP_WINDOW..=1.0 + CLAMP_WINDOW).contains(&c) {
        return Err(Error::domain(
            MODULE,
            format!("concurrence {c} outside [0, 1]"),
        ));
    }
    let c = c.clamp(0.0, 1.0);
    let x = (1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0;
    Ok(binary_entropy(x).clamp(0.0, 1.0))
}

fn check_pair(psi: &StateVector, (i, j): (usize, usize)) -> Result<()> {
    let n = psi.n_qubits();
    if i >= n || j >= n || i == j {
        return Err(Error::domain(
            MODULE,
            format!("invalid pair ({i}, {j}) for {n} qubits"),
        ));
    }
    Ok(())
}

fn pair_concurrence(psi: &StateVector, i: usize, j: usize) -> Result<f64> {
    clamp_unit(
        concurrence_from_lambdas(&pure_pair_lambdas(psi, (i, j))?),
        "concurrence",
    )
}

/// `T_site - Σ_{l≠site} C²(site, l)`; non-negative for every pure state.
pub fn ckw_residual(psi: &StateVector, site: usize) -> Result<f64> {
    let n = psi.n_qubits();
    if site >= n || n < 2 {
        return Err(Error::domain(
            MODULE,
            format!("site {site} invalid for {n} qubits"),
        ));
    }
    let mut residual = pure_sqrt_one_tangle(psi, site)?.powi(2);
    for other in (0..n).filter(|&l| l != site) {
        residual -= pair_concurrence(psi, site, other)?.powi(2);
    }
    check_ckw(residual, site)
}

fn check_ckw(residual: f64, site: usize) -> Result<f64> {
    if residual < -CKW_TOL {
        return Err(Error::numerical(
            MODULE,
            format!("CKW residual {residual:e} for site {site} is negative"),
        ));
    }
    Ok(residual)
}

/// Average pair concurrence after measuring every other qubit.
///
/// `local_bases` lists `(site, U)` for complement sites measured in the basis
/// formed by the columns of the unitary `U`; unlisted sites are measured in
/// the computational basis. Outcomes with probability below
/// [`OUTCOME_CUTOFF`] are skipped.
pub fn measured_pair_concurrence(
    psi: &StateVector,
    pair: (usize, usize),
    local_bases: &[(usize, Matrix2<Complex64>)],
) -> Result<f64> {
    check_pair(psi, pair)?;
    let mut rotated = psi.clone();
    for (site, u) in local_bases {
        if *site == pair.0 || *site == pair.1 {
            return Err(Error::domain(
                MODULE,
                format!("site {site} belongs to the measured pair"),
            ));
        }
        rotated = rotated.apply_local(*site, &u.adjoint())?;
    }
    let outcomes = rotated.split(&[pair.0, pair.1])?;
    let mut total = 0.0;
    for col in outcomes.column_iter() {
        let p = col.norm_squared();
        if p < OUTCOME_CUTOFF {
            continue;
        }
        // p · C(col/√p) = 2 |a00 a11 - a01 a10|
        total += 2.0 * (col[0] * col[3] - col[1] * col[2]).norm();
    }
    clamp_unit(total, "measured pair concurrence")
}

/// Localizable-entanglement lower bound from computational-basis
/// measurements on the complement of `pair`.
pub fn le_lower_bound(psi: &StateVector, pair: (usize, usize)) -> Result<f64> {
    measured_pair_concurrence(psi, pair, &[])
}

/// Per-pair entanglement diagnostics of a pure state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub sites: (usize, usize),
    pub concurrence: f64,
    pub concurrence_of_assistance: f64,
    pub sqrt_one_tangle_i: f64,
    pub sqrt_one_tangle_j: f64,
    pub eof: f64,
    pub ckw_residual_i: f64,
    pub le_lower_bound: f64,
}

impl PairReport {
    pub const ORDER_TOL: f64 = 1e-9;

    fn check(self) -> Result<Self> {
        if self.concurrence > self.concurrence_of_assistance + Self::ORDER_TOL {
            return Err(Error::numerical(
                MODULE,
                format!(
                    "pair {:?}: concurrence {} exceeds concurrence of assistance {}",
                    self.sites, self.concurrence, self.concurrence_of_assistance
                ),
            ));
        }
        let bound = self.sqrt_one_tangle_i.min(self.sqrt_one_tangle_j);
        if self.concurrence_of_assistance > bound + Self::ORDER_TOL {
            return Err(Error::numerical(
                MODULE,
                format!(
                    "pair {:?}: concurrence of assistance {} exceeds sqrt one-tangle {}",
                    self.sites, self.concurrence_of_assistance, bound
                ),
            ));
        }
        Ok(self)
    }
}

pub fn pair_report(psi: &StateVector, pair: (usize, usize)) -> Result<PairReport> {
    check_pair(psi, pair)?;
    let (i, j) = pair;
    let lambdas = pure_pair_lambdas(psi, pair)?;
    let concurrence = clamp_unit(concurrence_from_lambdas(&lambdas), "concurrence")?;
    let assistance = clamp_unit(
        assistance_from_lambdas(&lambdas),
        "concurrence of assistance",
    )?;
    let root_i = pure_sqrt_one_tangle(psi, i)?;
    let root_j = pure_sqrt_one_tangle(psi, j)?;
    let tangle_i = root_i * root_i;

    let mut residual = tangle_i - concurrence * concurrence;
    for other in (0..psi.n_qubits()).filter(|&l| l != i && l != j) {
        residual -= pair_concurrence(psi, i, other)?.powi(2);
    }

    PairReport {
        sites: pair,
        concurrence,
        concurrence_of_assistance: assistance,
        sqrt_one_tangle_i: root_i,
        sqrt_one_tangle_j: root_j,
        eof: entanglement_of_formation(concurrence)?,
        ckw_residual_i: check_ckw(residual, i)?,
        le_lower_bound: le_lower_bound(psi, pair)?,
    }
    .check()
}
