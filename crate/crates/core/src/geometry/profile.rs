use std::f64::consts::PI;

use serde::Serialize;

use super::{
    fibonacci_sphere, find_roots, polynomial_coefficients, state_of_bloch, BlochVector, Root,
    RootOptions,
};
use crate::error::{Error, Result};
use crate::measures::PolynomialMeasure;
use crate::quantum::{Rank2Spectral, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootStructure {
    IdenticallyZero,
    OneRoot,
    TwoRootEqualMult,
    TwoRootUnequalMult,
    ThreeRoot,
    FourRoot,
    ManyRoot,
}

impl RootStructure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::IdenticallyZero => "identically-zero",
            Self::OneRoot => "one-root",
            Self::TwoRootEqualMult => "two-root",
            Self::TwoRootUnequalMult => "two-root-unequal",
            Self::ThreeRoot => "three-root",
            Self::FourRoot => "four-root",
            Self::ManyRoot => "many-root",
        }
    }
}

impl std::fmt::Display for RootStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_structure(roots: &[Root]) -> RootStructure {
    match roots {
        [] => RootStructure::IdenticallyZero,
        [_] => RootStructure::OneRoot,
        [a, b] if a.multiplicity == b.multiplicity => RootStructure::TwoRootEqualMult,
        [_, _] => RootStructure::TwoRootUnequalMult,
        [_, _, _] => RootStructure::ThreeRoot,
        [_, _, _, _] => RootStructure::FourRoot,
        _ => RootStructure::ManyRoot,
    }
}

/// `∏ |b − z_i|^{m_i}` over the root clusters.
fn distance_product(roots: &[Root], b: &BlochVector) -> f64 {
    roots
        .iter()
        .map(|r| r.bloch().distance(b).powi(r.multiplicity as i32))
        .product()
}

/// Normalization `N` with `κ^{1/p}|P_d(ω)| = N ∏ dist(ω, z_i)^{m_i}` on the
/// sphere, measured at the point of a coarse grid farthest from the roots.
pub fn normalization_constant(
    m: &PolynomialMeasure,
    basis: &Rank2Spectral,
    roots: &[Root],
) -> Result<f64> {
    if roots.is_empty() {
        return Err(Error::Structure {
            found: RootStructure::IdenticallyZero.to_string(),
            operation: "normalization",
        });
    }
    let mut probes = vec![BlochVector::NORTH, BlochVector::SOUTH];
    for i in 0..12 {
        let theta = PI * (i as f64 + 0.5) / 12.0;
        for j in 0..24 {
            let phi = 2.0 * PI * j as f64 / 24.0;
            probes.push(BlochVector::new(
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ));
        }
    }
    let (best, prod) = probes
        .into_iter()
        .map(|b| (b, distance_product(roots, &b)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is nonempty");
    if prod <= 1e-12 {
        return Err(Error::Degenerate);
    }
    let psi = state_of_bloch(basis, best);
    Ok(m.linear_value_of(psi.amplitudes())? / prod)
}

/// Largest relative deviation from the product identity over `count`
/// deterministic probes.
pub fn identity_residual(
    m: &PolynomialMeasure,
    basis: &Rank2Spectral,
    roots: &[Root],
    normalization: f64,
    count: usize,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for v in fibonacci_sphere(count) {
        let b = BlochVector::from_vector(v);
        let direct = m.linear_value_of(state_of_bloch(basis, b).amplitudes())?;
        let product = normalization * distance_product(roots, &b);
        let scale = direct.max(product);
        if scale > 1e-300 {
            worst = worst.max((direct - product).abs() / scale);
        }
    }
    Ok(worst)
}

/// Roots, structure and normalization of a measure on a rank-2 range.
#[derive(Debug, Clone)]
pub struct RootProfile {
    pub roots: Vec<Root>,
    pub structure: RootStructure,
    /// `N`, or 0 when the polynomial vanishes identically.
    pub normalization: f64,
    pub sphere: Rank2Spectral,
    pub degree: u32,
    pub coefficients: Vec<C64>,
    pub identity_residual: f64,
}

impl RootProfile {
    pub fn compute(
        m: &PolynomialMeasure,
        basis: &Rank2Spectral,
        opts: &RootOptions,
    ) -> Result<Self> {
        let coefficients = polynomial_coefficients(m, basis)?;
        let roots = find_roots(&coefficients, opts);
        let structure = classify_structure(&roots);
        let (normalization, residual) = if roots.is_empty() {
            (0.0, 0.0)
        } else {
            let n = normalization_constant(m, basis, &roots)?;
            (n, identity_residual(m, basis, &roots, n, 10)?)
        };
        if residual > 1e-6 {
            log::warn!("product identity residual {residual:.3e} on this sphere");
        }
        Ok(Self {
            roots,
            structure,
            normalization,
            sphere: basis.clone(),
            degree: m.degree(),
            coefficients,
            identity_residual: residual,
        })
    }

    pub fn root_blochs(&self) -> Vec<BlochVector> {
        self.roots.iter().map(Root::bloch).collect()
    }

    /// `N ∏ dist^{mult}` at a point of the sphere (the degree-`d` form of
    /// the measure).
    pub fn linear_value_at(&self, b: &BlochVector) -> f64 {
        self.normalization * distance_product(&self.roots, b)
    }

    /// Total multiplicity, equal to the degree unless identically zero.
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}
