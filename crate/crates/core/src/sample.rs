//! Seeded random draws of states and local operators.

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::quantum::{DensityMatrix, PureState, SloccOperator, C64};

/// SplitMix64 finalizer; derives independent stream seeds from a base seed
/// and a counter.
pub fn split_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(split_seed(seed, stream))
}

/// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state on `n` qubits.
pub fn random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> PureState {
    let amps = (0..1usize << n_qubits)
        .map(|_| complex_gaussian(rng))
        .collect();
    PureState::new(amps).expect("gaussian vector is nonzero")
}

/// Random orthonormal pair in `2^n` dimensions.
pub fn random_orthonormal_pair<R: Rng + ?Sized>(
    n_qubits: usize,
    rng: &mut R,
) -> (PureState, PureState) {
    let a = random_state(n_qubits, rng);
    let b = random_state(n_qubits, rng);
    let overlap = a.inner(&b);
    let b: Vec<C64> = b
        .amplitudes()
        .iter()
        .zip(a.amplitudes())
        .map(|(y, x)| y - x * overlap)
        .collect();
    (a, PureState::new(b).expect("independent draws"))
}

/// Random rank-2 density matrix: weight `λ ~ U(0.05, 0.95)` on two random
/// orthonormal vectors.
pub fn random_rank2<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> DensityMatrix {
    let (a, b) = random_orthonormal_pair(n_qubits, rng);
    let w: f64 = rng.random_range(0.05..0.95);
    DensityMatrix::mixture(&[(w, &a), (1.0 - w, &b)]).expect("valid mixture")
}

/// Haar-ish random SU(2) element.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    let a = complex_gaussian(rng);
    let b = complex_gaussian(rng);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    Matrix2::new(a, -b.conj(), b, a.conj())
}

/// Random SL(2,C) element `(I + eps·G)/sqrt(det)` with complex Gaussian `G`.
pub fn random_sl2_near_identity<R: Rng + ?Sized>(eps: f64, rng: &mut R) -> Matrix2<C64> {
    let g = Matrix2::from_fn(|_, _| complex_gaussian(rng) * eps);
    let m = Matrix2::identity() + g;
    m / m.determinant().sqrt()
}

/// Random SL(2,C) element with condition number kept moderate.
pub fn random_sl2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    random_sl2_near_identity(0.5, rng)
}

pub fn random_slocc<R: Rng + ?Sized>(n_qubits: usize, eps: f64, rng: &mut R) -> SloccOperator {
    let factors = (0..n_qubits)
        .map(|_| random_sl2_near_identity(eps, rng))
        .collect();
    SloccOperator::new(factors).expect("factors normalized to det 1")
}

pub fn random_local_unitary<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> SloccOperator {
    SloccOperator::new((0..n_qubits).map(|_| random_su2(rng)).collect())
        .expect("SU(2) has unit determinant")
}
