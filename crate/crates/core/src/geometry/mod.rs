//! Bloch-sphere picture of the range of a rank-2 state.
//!
//! A pure state in the range is written `|ω> ∝ |φ0> + ω|φ1>` with
//! `ω ∈ C ∪ {∞}`. Stereographic projection places `φ0` at the north pole
//! `(0,0,1)` and `φ1` (`ω = ∞`) at the south pole:
//!
//! ```text
//! bloch(ω) = (2 Re ω, 2 Im ω, 1 − |ω|²) / (1 + |ω|²)
//! ```

mod poly;
mod profile;

pub use poly::{eval_poly, find_roots, polynomial_coefficients, Root, RootOptions};
pub use profile::{
    classify_structure, identity_residual, normalization_constant, RootProfile, RootStructure,
};

use std::fmt;

use nalgebra::{DMatrix, Vector3};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, PureState, Rank2Spectral, C64};

/// Point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(C64),
    Infinity,
}

impl ExtendedComplex {
    pub fn finite(re: f64, im: f64) -> Self {
        Self::Finite(C64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinity)
    }

    /// `1/ω` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(self) -> Self {
        match self {
            Self::Infinity => Self::Finite(C64::new(0.0, 0.0)),
            Self::Finite(z) if z.norm() == 0.0 => Self::Infinity,
            Self::Finite(z) => Self::Finite(z.inv()),
        }
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(z) => write!(f, "{z}"),
            Self::Infinity => write!(f, "∞"),
        }
    }
}

impl Serialize for ExtendedComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(z) => [z.re, z.im].serialize(s),
            Self::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Point in (or on) the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.9}, {:.9}, {:.9})", self.x, self.y, self.z)
    }
}

impl BlochVector {
    pub const NORTH: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };
    pub const SOUTH: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: -1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        self.vector().norm()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        (self.vector() - other.vector()).norm()
    }
}

/// `(φ0 + ωφ1)/√(1+|ω|²)`, or `φ1` at infinity.
pub fn omega_state(basis: &Rank2Spectral, w: ExtendedComplex) -> PureState {
    match w {
        ExtendedComplex::Infinity => basis.phi1().clone(),
        ExtendedComplex::Finite(w) => {
            let amps = superpose(basis, C64::new(1.0, 0.0), w);
            PureState::new(amps).expect("orthonormal basis gives nonzero vector")
        }
    }
}

/// `a φ0 + b φ1` without normalization.
pub(crate) fn superpose(basis: &Rank2Spectral, a: C64, b: C64) -> Vec<C64> {
    basis
        .phi0()
        .amplitudes()
        .iter()
        .zip(basis.phi1().amplitudes())
        .map(|(x, y)| a * x + b * y)
        .collect()
}

pub fn bloch_of_omega(w: ExtendedComplex) -> BlochVector {
    match w {
        ExtendedComplex::Infinity => BlochVector::SOUTH,
        ExtendedComplex::Finite(w) => {
            let n = 1.0 + w.norm_sqr();
            BlochVector::new(2.0 * w.re / n, 2.0 * w.im / n, (1.0 - w.norm_sqr()) / n)
        }
    }
}

/// Inverse stereographic projection of a (unit) Bloch vector.
pub fn omega_of_bloch(b: BlochVector) -> ExtendedComplex {
    let v = b.vector().normalize();
    let t = C64::new(v.x, v.y);
    if v.z >= 0.0 {
        ExtendedComplex::Finite(t / (1.0 + v.z))
    } else {
        let r2 = t.norm_sqr();
        if r2 == 0.0 {
            ExtendedComplex::Infinity
        } else {
            ExtendedComplex::Finite(t * ((1.0 - v.z) / r2))
        }
    }
}

/// Pure state of the range whose Bloch vector points along `b`.
pub fn state_of_bloch(basis: &Rank2Spectral, b: BlochVector) -> PureState {
    let v = b.vector().normalize();
    let t = C64::new(v.x, v.y);
    let (c0, c1) = if v.z >= 0.0 {
        let s = (2.0 * (1.0 + v.z)).sqrt();
        (C64::new(0.5 * s, 0.0), t / s)
    } else {
        let s = (2.0 * (1.0 - v.z)).sqrt();
        (t.conj() / s, C64::new(0.5 * s, 0.0))
    };
    PureState::new(superpose(basis, c0, c1)).expect("nonzero combination")
}

/// 2×2 matrix `M_ij = <φi|ρ|φj>`.
fn restricted_matrix(basis: &Rank2Spectral, rho: &DensityMatrix) -> Result<[[C64; 2]; 2]> {
    if rho.dim() != basis.phi0().dim() {
        return Err(Error::Dimension {
            expected: basis.phi0().dim(),
            got: rho.dim(),
        });
    }
    let (p0, p1) = (basis.phi0(), basis.phi1());
    Ok([
        [rho.element(p0, p0), rho.element(p0, p1)],
        [rho.element(p1, p0), rho.element(p1, p1)],
    ])
}

/// Bloch vector of a state supported on `span{φ0, φ1}`.
pub fn bloch_of_density(basis: &Rank2Spectral, rho: &DensityMatrix) -> Result<BlochVector> {
    let m = restricted_matrix(basis, rho)?;
    let leak = 1.0 - (m[0][0].re + m[1][1].re);
    if leak.abs() > 1e-9 {
        return Err(Error::Range(leak));
    }
    Ok(BlochVector::new(
        2.0 * m[1][0].re,
        2.0 * m[1][0].im,
        m[0][0].re - m[1][1].re,
    ))
}

/// Density matrix in the range with Bloch vector `b` (`|b| ≤ 1`).
pub fn density_from_bloch(basis: &Rank2Spectral, b: BlochVector) -> Result<DensityMatrix> {
    if b.norm() > 1.0 + 1e-10 {
        return Err(Error::Domain(format!(
            "Bloch vector norm {} exceeds 1",
            b.norm()
        )));
    }
    let m00 = C64::new(0.5 * (1.0 + b.z), 0.0);
    let m11 = C64::new(0.5 * (1.0 - b.z), 0.0);
    let m10 = C64::new(0.5 * b.x, 0.5 * b.y);
    let p0 = basis.phi0().amplitudes();
    let p1 = basis.phi1().amplitudes();
    let dim = p0.len();
    let matrix = DMatrix::from_fn(dim, dim, |i, j| {
        m00 * p0[i] * p0[j].conj()
            + m11 * p1[i] * p1[j].conj()
            + m10 * p1[i] * p0[j].conj()
            + m10.conj() * p0[i] * p1[j].conj()
    });
    Ok(DensityMatrix::from_matrix_unchecked(matrix))
}

/// Euclidean distance between the Bloch points of two projected values.
pub fn chordal_distance(a: ExtendedComplex, b: ExtendedComplex) -> f64 {
    use ExtendedComplex::*;
    match (a, b) {
        (Infinity, Infinity) => 0.0,
        (Finite(z), Infinity) | (Infinity, Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (Finite(p), Finite(q)) => {
            2.0 * (p - q).norm() / ((1.0 + p.norm_sqr()).sqrt() * (1.0 + q.norm_sqr()).sqrt())
        }
    }
}

/// Orthonormal frame with `pole` as third axis.
#[derive(Debug, Clone, Copy)]
pub struct SphereFrame {
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub pole: Vector3<f64>,
}

impl SphereFrame {
    pub fn with_pole(pole: Vector3<f64>) -> Self {
        let pole = pole.normalize();
        let helper = if pole.x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let e1 = (helper - pole * pole.dot(&helper)).normalize();
        let e2 = pole.cross(&e1);
        Self { e1, e2, pole }
    }

    /// Point at polar angle `theta` from the pole and azimuth `phi`.
    pub fn point(&self, theta: f64, phi: f64) -> Vector3<f64> {
        (self.e1 * phi.cos() + self.e2 * phi.sin()) * theta.sin() + self.pole * theta.cos()
    }

    pub fn azimuth(&self, v: &Vector3<f64>) -> f64 {
        v.dot(&self.e2).atan2(v.dot(&self.e1))
    }
}

/// Deterministic, roughly uniform points on the unit sphere.
pub(crate) fn fibonacci_sphere(count: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Vector3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis2() -> Rank2Spectral {
        Rank2Spectral::new(
            PureState::basis(2, 0).unwrap(),
            PureState::basis(2, 3).unwrap(),
            0.5,
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn omega_state_examples() {
        let b = basis2();
        assert_eq!(
            omega_state(&b, ExtendedComplex::finite(0.0, 0.0)),
            *b.phi0()
        );
        assert_eq!(omega_state(&b, ExtendedComplex::Infinity), *b.phi1());
        let s = omega_state(&b, ExtendedComplex::finite(1.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((s.amplitudes()[3].re - h).abs() < 1e-15);
    }

    #[test]
    fn stereographic_examples() {
        assert_eq!(
            bloch_of_omega(ExtendedComplex::finite(0.0, 0.0)),
            BlochVector::NORTH
        );
        assert_eq!(
            bloch_of_omega(ExtendedComplex::Infinity),
            BlochVector::SOUTH
        );
        assert_eq!(
            bloch_of_omega(ExtendedComplex::finite(1.0, 0.0)),
            BlochVector::new(1.0, 0.0, 0.0)
        );
    }

    #[test]
    fn bloch_of_density_examples() {
        let b = basis2();
        let north = bloch_of_density(&b, &b.phi0().projector()).unwrap();
        assert!(north.distance(&BlochVector::NORTH) < 1e-15);
        let centre = bloch_of_density(&b, &b.reconstruct()).unwrap();
        assert!(centre.norm() < 1e-15);
        let w = ExtendedComplex::finite(1.0, 0.0);
        let eq = bloch_of_density(&b, &omega_state(&b, w).projector()).unwrap();
        assert!(eq.distance(&bloch_of_omega(w)) < 1e-15);
    }

    #[test]
    fn bloch_of_density_rejects_leaks() {
        let b = basis2();
        let outside = PureState::basis(2, 1).unwrap().projector();
        assert!(matches!(
            bloch_of_density(&b, &outside),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn chordal_examples() {
        let zero = ExtendedComplex::finite(0.0, 0.0);
        assert_eq!(chordal_distance(zero, ExtendedComplex::Infinity), 2.0);
        assert_eq!(chordal_distance(zero, zero), 0.0);
    }

    #[test]
    fn inverse_projection_near_south_pole() {
        let w = ExtendedComplex::finite(3e7, -1e7);
        match omega_of_bloch(bloch_of_omega(w)) {
            ExtendedComplex::Finite(z) => assert!((z - C64::new(3e7, -1e7)).norm() / 3e7 < 1e-8),
            ExtendedComplex::Infinity => panic!("finite point mapped to infinity"),
        }
        assert_eq!(
            omega_of_bloch(BlochVector::SOUTH),
            ExtendedComplex::Infinity
        );
    }
}
