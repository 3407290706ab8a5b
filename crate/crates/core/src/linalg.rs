//! Small dense helpers shared by the physics modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenvalues in `[PSD_CLAMP, 0)` are treated as roundoff and set to zero.
pub const PSD_CLAMP: f64 = -1e-10;
/// Eigenvalues below this are genuine negativity and reported as errors.
pub const PSD_FAIL: f64 = -1e-8;

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `max |A - A†|` elementwise.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

/// `max |[A, B]|` elementwise.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

/// `(M + M†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
pub fn eigh_sorted(h: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = SymmetricEigen::new(h.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Applies the PSD clamping rule to one eigenvalue.
pub fn clamp_psd(value: f64, module: &'static str, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= PSD_FAIL {
        // [PSD_FAIL, PSD_CLAMP) is zeroed as well; only values below
        // PSD_FAIL are fatal.
        Ok(0.0)
    } else {
        Err(Error::numerical(
            module,
            format!("{what} has eigenvalue {value:e} below {PSD_FAIL:e}"),
        ))
    }
}

/// Square root of a Hermitian positive-semidefinite matrix by spectral
/// decomposition.
pub fn sqrt_psd(m: &CMatrix, module: &'static str) -> Result<CMatrix> {
    let (values, vectors) = eigh_sorted(&hermitize(m));
    let n = values.len();
    let mut scaled = vectors.clone();
    for k in 0..n {
        let root = clamp_psd(values[k], module, "matrix square root input")?.sqrt();
        scaled.column_mut(k).scale_mut(root);
    }
    Ok(hermitize(&(scaled * vectors.adjoint())))
}

pub fn is_power_of_two_dim(len: usize) -> Option<usize> {
    if len == 0 || !len.is_power_of_two() {
        None
    } else {
        Some(len.trailing_zeros() as usize)
    }
}
