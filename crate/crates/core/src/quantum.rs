//! Dense complex linear algebra for few-qubit states.
//!
//! Basis ordering: qubit 1 is the most significant bit of the computational
//! basis index, so `|q1 q2 ... qn>` sits at index `q1·2^(n-1) + ... + qn`.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Relative threshold (against the largest eigenvalue) below which an
/// eigenvalue counts as zero.
pub const RANK_TOL: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-10;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A normalized pure state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Builds a state from amplitudes, normalizing them.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm = vector_norm(&amplitudes);
        if norm.is_nan() || norm <= 1e-300 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Real-amplitude convenience constructor.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Dimension {
                expected: dim,
                got: index,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Superposition of bit-string kets with the given coefficients, e.g.
    /// `[("000", 1), ("111", 1)]` for GHZ.
    pub fn from_kets(terms: &[(&str, C64)]) -> Result<Self> {
        let n = terms.first().map(|(s, _)| s.len()).ok_or(Error::ZeroNorm)?;
        let mut amplitudes = vec![ZERO; 1 << n];
        for (bits, c) in terms {
            if bits.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: bits.len(),
                });
            }
            let idx = usize::from_str_radix(bits, 2)
                .map_err(|e| Error::Parse(format!("bad ket label `{bits}`: {e}")))?;
            amplitudes[idx] += c;
        }
        Self::new(amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|self><self|`.
    pub fn projector(&self) -> DensityMatrix {
        let v = DVector::from_column_slice(&self.amplitudes);
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: &v * v.adjoint(),
        }
    }

    /// Multiplies by a global phase so the largest-magnitude amplitude is
    /// real and positive. Ties resolve to the lowest index.
    pub fn with_canonical_phase(mut self) -> Self {
        canonicalize_phase(&mut self.amplitudes);
        self
    }
}

pub(crate) fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn canonicalize_phase(v: &mut [C64]) {
    let max = v.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|a| a.norm() >= max * (1.0 - 1e-9))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for a in v.iter_mut() {
        *a *= phase;
    }
}

/// Kronecker product of two pure states; qubits of `a` come first.
pub fn tensor_product(a: &PureState, b: &PureState) -> PureState {
    let mut amplitudes = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amplitudes {
        for y in &b.amplitudes {
            amplitudes.push(x * y);
        }
    }
    PureState {
        n_qubits: a.n_qubits + b.n_qubits,
        amplitudes,
    }
}

/// A density matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity. Small violations
    /// (below the validation tolerances) are projected away.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidDensity(format!(
                "matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        let dev = (&matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}")));
        }
        let hermitian = (&matrix + matrix.adjoint()) * C64::new(0.5 / tr.re, 0.0);
        let rho = Self {
            n_qubits,
            matrix: hermitian,
        };
        let min_eig = rho.eigenvalues().last().copied().unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        Self { n_qubits, matrix }
    }

    /// `Σ w_i |ψ_i><ψ_i|` with weights normalized to sum to one.
    pub fn mixture(members: &[(f64, &PureState)]) -> Result<Self> {
        let first = members.first().ok_or(Error::ZeroNorm)?;
        let dim = first.1.dim();
        let total: f64 = members.iter().map(|(w, _)| *w).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        for (w, psi) in members {
            if psi.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: psi.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidDensity(format!("negative weight {w}")));
            }
            matrix += psi.projector().matrix * C64::new(w / total, 0.0);
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `<a|ρ|b>`.
    pub fn element(&self, a: &PureState, b: &PureState) -> C64 {
        let vb = DVector::from_column_slice(b.amplitudes());
        let rb = &self.matrix * vb;
        inner(a.amplitudes(), rb.as_slice())
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    /// Eigenvalues (decreasing) with matching normalized eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect();
        (values, vectors)
    }

    /// Number of eigenvalues above `RANK_TOL` relative to the largest.
    pub fn numerical_rank(&self) -> usize {
        let values = self.eigenvalues();
        let top = values.first().copied().unwrap_or(0.0);
        values.iter().filter(|&&v| v > RANK_TOL * top).count()
    }

    /// Traces out one qubit (1-based index).
    pub fn partial_trace(&self, traced_qubit: usize) -> Result<DensityMatrix> {
        partial_trace(self, traced_qubit)
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Inserts bit `b` at position `pos` (0 = least significant) of `i`.
fn insert_bit(i: usize, pos: usize, b: usize) -> usize {
    let low = i & ((1 << pos) - 1);
    let high = i >> pos;
    (high << (pos + 1)) | (b << pos) | low
}

/// `Tr_k ρ` for a 1-based qubit index `k`.
pub fn partial_trace(rho: &DensityMatrix, traced_qubit: usize) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    if traced_qubit == 0 || traced_qubit > n || n < 2 {
        return Err(Error::QubitIndex {
            index: traced_qubit,
            n_qubits: n,
        });
    }
    let pos = n - traced_qubit;
    let dim = 1 << (n - 1);
    let m = &rho.matrix;
    let out = DMatrix::from_fn(dim, dim, |i, j| {
        (0..2)
            .map(|b| m[(insert_bit(i, pos, b), insert_bit(j, pos, b))])
            .sum()
    });
    Ok(DensityMatrix {
        n_qubits: n - 1,
        matrix: out,
    })
}

/// Eigenbasis of a rank-2 density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank2Spectral {
    phi0: PureState,
    phi1: PureState,
    lambda0: f64,
    lambda1: f64,
}

impl Rank2Spectral {
    pub fn new(phi0: PureState, phi1: PureState, lambda0: f64, lambda1: f64) -> Result<Self> {
        if phi0.dim() != phi1.dim() {
            return Err(Error::Dimension {
                expected: phi0.dim(),
                got: phi1.dim(),
            });
        }
        let overlap = phi0.inner(&phi1).norm();
        if overlap > 1e-10 {
            return Err(Error::Isometry(overlap));
        }
        if lambda0 < -1e-12 || lambda1 < -1e-12 || (lambda0 + lambda1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDensity(format!(
                "eigenvalues {lambda0}, {lambda1} do not form a distribution"
            )));
        }
        Ok(Self {
            phi0,
            phi1,
            lambda0,
            lambda1,
        })
    }

    pub fn phi0(&self) -> &PureState {
        &self.phi0
    }

    pub fn phi1(&self) -> &PureState {
        &self.phi1
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn n_qubits(&self) -> usize {
        self.phi0.n_qubits()
    }

    /// `λ0 |φ0><φ0| + λ1 |φ1><φ1|`.
    pub fn reconstruct(&self) -> DensityMatrix {
        let m = self.phi0.projector().matrix * C64::new(self.lambda0, 0.0)
            + self.phi1.projector().matrix * C64::new(self.lambda1, 0.0);
        DensityMatrix::from_matrix_unchecked(m)
    }
}

/// Spectral decomposition of a rank-2 state, `λ0 ≥ λ1`, eigenvector phases
/// canonicalized.
pub fn spectral_decompose_rank2(rho: &DensityMatrix) -> Result<Rank2Spectral> {
    let (values, mut vectors) = rho.eigen();
    let top = values[0];
    let rank = values.iter().filter(|&&v| v > RANK_TOL * top).count();
    if rank != 2 {
        return Err(Error::Rank {
            rank,
            expected: "2",
        });
    }
    let (l0, l1) = (values[0], values[1]);
    let s = l0 + l1;
    let v1 = vectors.swap_remove(1);
    let v0 = vectors.swap_remove(0);
    let phi0 = PureState::new(v0)?.with_canonical_phase();
    let phi1 = PureState::new(v1)?.with_canonical_phase();
    Ok(Rank2Spectral {
        phi0,
        phi1,
        lambda0: l0 / s,
        lambda1: l1 / s,
    })
}

/// Local operator `A_1 ⊗ ... ⊗ A_n` with `det A_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SloccOperator {
    factors: Vec<Matrix2<C64>>,
}

impl SloccOperator {
    pub fn new(factors: Vec<Matrix2<C64>>) -> Result<Self> {
        for (index, f) in factors.iter().enumerate() {
            let det = f.determinant();
            if (det - ONE).norm() > 1e-10 {
                return Err(Error::NotSpecialLinear {
                    index,
                    det: format!("{det}"),
                });
            }
        }
        Ok(Self { factors })
    }

    /// Rescales each invertible factor to unit determinant.
    pub fn from_invertible(factors: Vec<Matrix2<C64>>) -> Result<Self> {
        let mut scaled = Vec::with_capacity(factors.len());
        for (index, f) in factors.into_iter().enumerate() {
            let det = f.determinant();
            if det.norm() < 1e-14 {
                return Err(Error::NotSpecialLinear {
                    index,
                    det: format!("{det}"),
                });
            }
            scaled.push(f / det.sqrt());
        }
        Self::new(scaled)
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            factors: vec![Matrix2::identity(); n_qubits],
        }
    }

    pub fn factors(&self) -> &[Matrix2<C64>] {
        &self.factors
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    fn check_dim(&self, dim: usize) -> Result<usize> {
        let n = qubits_for_dim(dim)?;
        if n != self.factors.len() {
            return Err(Error::Dimension {
                expected: self.factors.len(),
                got: n,
            });
        }
        Ok(n)
    }

    /// `L v` without normalization.
    pub fn apply_raw(&self, v: &[C64]) -> Result<Vec<C64>> {
        let n = self.check_dim(v.len())?;
        let mut out = v.to_vec();
        for (q, a) in self.factors.iter().enumerate() {
            apply_single_qubit(&mut out, n, q + 1, a);
        }
        Ok(out)
    }

    /// `L|ψ> / ‖L|ψ>‖`.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        PureState::new(self.apply_raw(psi.amplitudes())?)
    }

    /// `LρL† / Tr(LρL†)` together with the trace `Tr(LρL†)`.
    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
        let n = self.check_dim(rho.dim())?;
        let dim = rho.dim();
        let mut m = rho.matrix.clone();
        for j in 0..dim {
            let mut col: Vec<C64> = m.column(j).iter().copied().collect();
            for (q, a) in self.factors.iter().enumerate() {
                apply_single_qubit(&mut col, n, q + 1, a);
            }
            m.set_column(j, &DVector::from_vec(col));
        }
        // (L M)L† = (L (L M)†)†
        let mut m = m.adjoint();
        for j in 0..dim {
            let mut col: Vec<C64> = m.column(j).iter().copied().collect();
            for (q, a) in self.factors.iter().enumerate() {
                apply_single_qubit(&mut col, n, q + 1, a);
            }
            m.set_column(j, &DVector::from_vec(col));
        }
        let m = m.adjoint();
        let tr = m.trace().re;
        let hermitian = (&m + m.adjoint()) * C64::new(0.5 / tr, 0.0);
        Ok((DensityMatrix::from_matrix_unchecked(hermitian), tr))
    }
}

/// Applies a 2×2 matrix to qubit `q` (1-based) of an `n`-qubit vector.
pub(crate) fn apply_single_qubit(v: &mut [C64], n: usize, q: usize, a: &Matrix2<C64>) {
    let mask = 1usize << (n - q);
    for i in 0..v.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (x, y) = (v[i], v[j]);
            v[i] = a[(0, 0)] * x + a[(0, 1)] * y;
            v[j] = a[(1, 0)] * x + a[(1, 1)] * y;
        }
    }
}

/// Free-function form of [`SloccOperator::apply`].
pub fn apply_slocc(l: &SloccOperator, psi: &PureState) -> Result<PureState> {
    l.apply(psi)
}
