#![allow(dead_code)]

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spinent_core::linalg::CVector;
use spinent_core::register::{single_excitation_state, StateVector};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure state: normalized complex Gaussian vector.
pub fn haar_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let amps = CVector::from_fn(1 << n, |_, _| gaussian(rng));
    StateVector::normalized(amps).unwrap()
}

/// Random normalized `A_0, …, A_N` and the matching single-excitation state.
pub fn single_excitation(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Complex64>, StateVector) {
    let raw: Vec<Complex64> = (0..=n).map(|_| gaussian(rng)).collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let coeffs: Vec<Complex64> = raw.iter().map(|c| c / norm).collect();
    let psi = single_excitation_state(&coeffs).unwrap();
    (coeffs, psi)
}

/// Haar-random single-qubit unitary.
pub fn random_unitary2(rng: &mut ChaCha8Rng) -> Matrix2<Complex64> {
    let m = Matrix2::from_fn(|_, _| gaussian(rng));
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column phases so the distribution is Haar.
    let phases = Matrix2::from_diagonal(&nalgebra::Vector2::new(
        r[(0, 0)] / r[(0, 0)].norm(),
        r[(1, 1)] / r[(1, 1)].norm(),
    ));
    q * phases
}

/// Random 2×2 positive semidefinite matrix `G G†`.
pub fn random_psd2(rng: &mut ChaCha8Rng) -> Matrix2<Complex64> {
    let g = Matrix2::from_fn(|_, _| gaussian(rng));
    g * g.adjoint()
}
