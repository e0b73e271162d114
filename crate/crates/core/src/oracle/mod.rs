//! Independent references for the convex roof: Wootters' formula for
//! two-qubit concurrence and a multistart search over decompositions.

mod nelder_mead;

pub use nelder_mead::{Minimum, NelderMead};

use nalgebra::{DMatrix, Matrix4};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::PolynomialMeasure;
use crate::quantum::{
    spectral_decompose_rank2, DensityMatrix, PureState, Rank2Spectral, C64, RANK_TOL,
};
use crate::sample::{complex_gaussian, rng_for};

/// Wootters' closed form `max(0, μ1 − μ2 − μ3 − μ4)`.
///
/// With `ρ = W W†` the `μ_i` are the singular values of the symmetric matrix
/// `Wᵀ (σy⊗σy) W`, which avoids square roots of the noisy zero eigenvalues
/// that `√ρ ρ̃ √ρ` has for rank-deficient `ρ`. Eigenvalues below the
/// rank tolerance count as zero, as everywhere else in the library.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: rho.dim(),
        });
    }
    let m = rho.matrix();
    let rho4 = Matrix4::from_fn(|r, c| m[(r, c)]);
    let eig = rho4.symmetric_eigen();
    let cutoff = RANK_TOL * eig.eigenvalues.max();
    let scale = eig
        .eigenvalues
        .map(|v| C64::new(if v > cutoff { v.sqrt() } else { 0.0 }, 0.0));
    let w = eig.eigenvectors * Matrix4::from_diagonal(&scale);
    // σy⊗σy is real and antidiagonal: (-1, 1, 1, -1).
    let yy = Matrix4::from_fn(|r, c| {
        if r + c == 3 {
            C64::new(if r == 0 || r == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let tau = w.transpose() * yy * w;
    let mut mu: Vec<f64> = tau.singular_values().iter().copied().collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

/// Weighted pure states `{(w_i, ψ_i)}` with `Σ w_i = 1`.
#[derive(Debug, Clone)]
pub struct DecompositionEnsemble {
    members: Vec<(f64, PureState)>,
}

impl DecompositionEnsemble {
    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn into_members(self) -> Vec<(f64, PureState)> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|(w, _)| w).sum()
    }

    /// `Σ w_i |ψ_i><ψ_i|`.
    pub fn reconstruct(&self) -> DensityMatrix {
        let dim = self.members[0].1.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (w, psi) in &self.members {
            m += psi.projector().matrix() * C64::new(*w, 0.0);
        }
        DensityMatrix::from_matrix_unchecked(m)
    }

    pub fn average(&self, m: &PolynomialMeasure) -> Result<f64> {
        self.members
            .iter()
            .map(|(w, psi)| Ok(w * m.eval(psi)?))
            .sum()
    }
}

#[derive(Serialize)]
struct MemberJson {
    weight: f64,
    amplitudes: Vec<[f64; 2]>,
}

impl Serialize for DecompositionEnsemble {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<MemberJson> = self
            .members
            .iter()
            .map(|(w, psi)| MemberJson {
                weight: *w,
                amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect();
        rows.serialize(s)
    }
}

/// Ensemble `ψ̃_i = Σ_j V_ij √λ_j φ_j`, `w_i = ‖ψ̃_i‖²`, for an `m×2`
/// matrix with orthonormal columns.
pub fn ensemble_from_isometry(
    basis: &Rank2Spectral,
    v: &DMatrix<C64>,
) -> Result<DecompositionEnsemble> {
    if v.ncols() != 2 || v.nrows() < 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: v.ncols(),
        });
    }
    let gram = v.adjoint() * v;
    let dev = (gram - DMatrix::<C64>::identity(2, 2)).norm();
    if dev > 1e-10 {
        return Err(Error::Isometry(dev));
    }
    let members = members_from_rows(basis, v)
        .into_iter()
        .filter(|(w, _)| *w > 1e-300)
        .map(|(w, amps)| Ok((w, PureState::new(amps)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionEnsemble { members })
}

fn members_from_rows(basis: &Rank2Spectral, v: &DMatrix<C64>) -> Vec<(f64, Vec<C64>)> {
    let a = basis.lambda0().sqrt();
    let b = basis.lambda1().sqrt();
    let p0 = basis.phi0().amplitudes();
    let p1 = basis.phi1().amplitudes();
    (0..v.nrows())
        .map(|i| {
            let (c0, c1) = (v[(i, 0)] * a, v[(i, 1)] * b);
            let amps: Vec<C64> = p0.iter().zip(p1).map(|(x, y)| c0 * x + c1 * y).collect();
            let w = amps.iter().map(|z| z.norm_sqr()).sum();
            (w, amps)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleOptions {
    pub ensemble_size: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
    pub diameter_tol: f64,
    /// Starting isometry for restart 0; must have `ensemble_size` rows.
    #[serde(skip)]
    pub warm_start: Option<DMatrix<C64>>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            ensemble_size: 4,
            restarts: 64,
            seed: 0,
            max_evals: 20_000,
            diameter_tol: 1e-10,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: f64,
    pub ensemble: DecompositionEnsemble,
    pub isometry: DMatrix<C64>,
    pub evaluations: usize,
    pub best_restart: usize,
}

fn params_to_matrix(x: &[f64], rows: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, 2, |i, j| {
        C64::new(x[4 * i + 2 * j], x[4 * i + 2 * j + 1])
    })
}

fn matrix_to_params(v: &DMatrix<C64>) -> Vec<f64> {
    let mut x = Vec::with_capacity(4 * v.nrows());
    for i in 0..v.nrows() {
        for j in 0..2 {
            x.push(v[(i, j)].re);
            x.push(v[(i, j)].im);
        }
    }
    x
}

/// Gram–Schmidt on the two columns; `None` if they are dependent.
fn orthonormalize(v: &mut DMatrix<C64>) -> Option<()> {
    let n0 = v.column(0).norm();
    if n0 < 1e-150 {
        return None;
    }
    v.column_mut(0).unscale_mut(n0);
    let overlap = v.column(0).dotc(&v.column(1));
    let c0 = v.column(0).clone_owned();
    v.column_mut(1).axpy(-overlap, &c0, C64::new(1.0, 0.0));
    let n1 = v.column(1).norm();
    if n1 < 1e-150 {
        return None;
    }
    v.column_mut(1).unscale_mut(n1);
    Some(())
}

fn objective(m: &PolynomialMeasure, basis: &Rank2Spectral, rows: usize, x: &[f64]) -> f64 {
    let mut v = params_to_matrix(x, rows);
    if orthonormalize(&mut v).is_none() {
        return 1e6;
    }
    let half_dp = 0.5 * m.homogeneous_degree();
    members_from_rows(basis, &v)
        .into_iter()
        .filter(|(w, _)| *w > 1e-300)
        .map(|(w, amps)| {
            let p = m.invariant_unchecked(&amps).norm();
            m.kappa() * p.powf(m.power()) * w.powf(1.0 - half_dp)
        })
        .sum()
}

/// Upper bound on the convex roof: the best ensemble average found by
/// `restarts` independent Nelder–Mead runs over `m×2` isometries.
pub fn brute_force_roof(
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    if rho.dim() != m.arity() {
        return Err(Error::Dimension {
            expected: m.arity(),
            got: rho.dim(),
        });
    }
    if opts.ensemble_size < 2 || opts.restarts == 0 {
        return Err(Error::Domain(
            "need ensemble size ≥ 2 and at least one restart".into(),
        ));
    }
    let rank = rho.numerical_rank();
    if rank == 1 {
        let (_, vectors) = rho.eigen();
        let psi = PureState::new(vectors.into_iter().next().expect("nonempty"))?;
        let value = m.eval(&psi)?;
        return Ok(OracleResult {
            value,
            ensemble: DecompositionEnsemble {
                members: vec![(1.0, psi)],
            },
            isometry: DMatrix::identity(opts.ensemble_size, 2),
            evaluations: 1,
            best_restart: 0,
        });
    }
    if rank > 2 {
        return Err(Error::Rank {
            rank,
            expected: "1 or 2",
        });
    }
    let basis = spectral_decompose_rank2(rho)?;
    let rows = opts.ensemble_size;
    if let Some(w) = &opts.warm_start {
        if w.nrows() != rows || w.ncols() != 2 {
            return Err(Error::Dimension {
                expected: rows,
                got: w.nrows(),
            });
        }
    }
    let nm = NelderMead {
        initial_step: 0.3,
        diameter_tol: opts.diameter_tol,
        max_evals: opts.max_evals,
    };
    // Each restart is scored by the average over its normalized ensemble,
    // so the reported value is exactly what the returned ensemble achieves.
    let runs: Result<Vec<Run>> = (0..opts.restarts)
        .into_par_iter()
        .map(|k| {
            let start = match (&opts.warm_start, k) {
                (Some(w), 0) => matrix_to_params(w),
                _ => {
                    let mut rng = rng_for(opts.seed, k as u64);
                    random_start(&mut rng, rows)
                }
            };
            let found = nm.minimize(|x| objective(m, &basis, rows, x), &start);
            let mut v = params_to_matrix(&found.x, rows);
            orthonormalize(&mut v).ok_or(Error::Isometry(f64::NAN))?;
            let ensemble = ensemble_from_isometry(&basis, &v)?;
            let value = ensemble.average(m)?;
            Ok(Run {
                restart: k,
                value,
                ensemble,
                isometry: v,
                evaluations: found.evaluations,
            })
        })
        .collect();
    let runs = runs?;
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let best = runs
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value).then(a.restart.cmp(&b.restart)))
        .expect("at least one restart");
    Ok(OracleResult {
        value: best.value,
        ensemble: best.ensemble,
        isometry: best.isometry,
        evaluations,
        best_restart: best.restart,
    })
}

struct Run {
    restart: usize,
    value: f64,
    ensemble: DecompositionEnsemble,
    isometry: DMatrix<C64>,
    evaluations: usize,
}

fn random_start<R: Rng + ?Sized>(rng: &mut R, rows: usize) -> Vec<f64> {
    let mut v = DMatrix::from_fn(rows, 2, |_, _| complex_gaussian(rng));
    if orthonormalize(&mut v).is_none() {
        v = DMatrix::identity(rows, 2);
    }
    matrix_to_params(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn werner(p: f64) -> DensityMatrix {
        let bell = PureState::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        let mut m = bell.projector().matrix() * C64::new(p, 0.0);
        for i in 0..4 {
            m[(i, i)] += C64::new((1.0 - p) / 4.0, 0.0);
        }
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn wootters_examples() {
        assert!((wootters_concurrence(&werner(1.0)).unwrap() - 1.0).abs() < 1e-7);
        assert_eq!(wootters_concurrence(&werner(0.0)).unwrap(), 0.0);
        // Werner concurrence is (3p − 1)/2.
        assert!((wootters_concurrence(&werner(0.9)).unwrap() - 0.85).abs() < 1e-10);
        let three = DensityMatrix::new(DMatrix::identity(8, 8) * C64::new(0.125, 0.0)).unwrap();
        assert!(wootters_concurrence(&three).is_err());
    }

    #[test]
    fn identity_isometry_is_the_spectral_ensemble() {
        let a = PureState::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        let b = PureState::from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        let rho = DensityMatrix::mixture(&[(0.7, &a), (0.3, &b)]).unwrap();
        let basis = spectral_decompose_rank2(&rho).unwrap();
        let e = ensemble_from_isometry(&basis, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(e.len(), 2);
        assert!((e.members()[0].0 - 0.7).abs() < 1e-12);
        assert!(e.reconstruct().frobenius_distance(&rho) < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(h, 0.0),
                C64::new(h, 0.0),
                C64::new(h, 0.0),
                C64::new(-h, 0.0),
            ],
        );
        let e = ensemble_from_isometry(&basis, &f).unwrap();
        assert!((e.members()[0].0 - 0.5).abs() < 1e-12);
        assert!(e.reconstruct().frobenius_distance(&rho) < 1e-12);
        let bad = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(
            ensemble_from_isometry(&basis, &bad),
            Err(Error::Isometry(_))
        ));
    }

    #[test]
    fn pure_input_short_circuits() {
        let bell = PureState::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        let r = brute_force_roof(
            &PolynomialMeasure::concurrence(),
            &bell.projector(),
            &OracleOptions::default(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.ensemble.len(), 1);
    }

    #[test]
    fn search_is_reproducible() {
        let a = PureState::from_real(&[0.8, 0.1, -0.3, 0.5]).unwrap();
        let b = PureState::from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        let rho = DensityMatrix::mixture(&[(0.6, &a), (0.4, &b)]).unwrap();
        let opts = OracleOptions {
            restarts: 4,
            seed: 11,
            ..Default::default()
        };
        let c = PolynomialMeasure::concurrence();
        let r1 = brute_force_roof(&c, &rho, &opts).unwrap();
        let r2 = brute_force_roof(&c, &rho, &opts).unwrap();
        assert_eq!(r1.value.to_bits(), r2.value.to_bits());
        assert!(r1.ensemble.reconstruct().frobenius_distance(&rho) < 1e-8);
        assert!((r1.ensemble.total_weight() - 1.0).abs() < 1e-10);
        assert!((r1.ensemble.average(&c).unwrap() - r1.value).abs() < 1e-10);
    }
}
