//! Convex roofs on rank-2 states.
//!
//! One- and two-root spheres have closed forms in terms of the distance of
//! the state's Bloch vector to the zero polytope. The GHZ–W axis is handled
//! by a one-dimensional convex hull; everything else goes to the
//! brute-force oracle and is flagged as an upper bound.

mod closed_form;
pub mod ghzw;
mod iso;

pub use closed_form::{
    nearest_zero_point, roof_one_root, roof_orthogonal_roots, roof_separable_ray, roof_two_root,
    two_root_geometry,
};
pub use iso::{iso_curve_sample, iso_curves, iso_frame, IsoCurve};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{RootOptions, RootProfile, RootStructure};
use crate::measures::{MeasureKind, PolynomialMeasure};
use crate::oracle::{brute_force_roof, OracleOptions};
use crate::quantum::{spectral_decompose_rank2, DensityMatrix, PureState, C64};

/// Scalars of the one- and two-root constructions. Fields not used by a
/// method stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GeometrySummary {
    pub h: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub h_c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoofMethod {
    ClosedFormOneRoot,
    ClosedFormTwoRoot,
    OrthogonalRootCoherence,
    SeparableRay,
    GhzwAxis,
    OracleFallback,
    /// Rank-1 input: the measure of the pure state.
    Pure,
    /// The measure vanishes on the whole range.
    IdenticallyZero,
}

impl RoofMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ClosedFormOneRoot => "one-root",
            Self::ClosedFormTwoRoot => "two-root",
            Self::OrthogonalRootCoherence => "orthogonal-roots",
            Self::SeparableRay => "ray",
            Self::GhzwAxis => "ghzw",
            Self::OracleFallback => "oracle",
            Self::Pure => "pure",
            Self::IdenticallyZero => "identically-zero",
        }
    }
}

/// Weighted pure states averaging to the target density matrix.
pub type Witness = Vec<(f64, PureState)>;

#[derive(Debug, Clone)]
pub struct RoofResult {
    pub value: f64,
    pub method: RoofMethod,
    pub geometry: GeometrySummary,
    pub witness: Option<Witness>,
    /// False when the value is only an upper bound (oracle fallback).
    pub exact: bool,
    pub note: Option<String>,
}

impl RoofResult {
    pub(crate) fn exact(
        value: f64,
        method: RoofMethod,
        geometry: GeometrySummary,
        witness: Option<Witness>,
    ) -> Self {
        Self {
            value,
            method,
            geometry,
            witness,
            exact: true,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Average measure of a witness and the Frobenius distance between
/// `Σ w_i |ψ_i><ψ_i|` and `rho`.
pub fn witness_check(
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
    witness: &Witness,
) -> Result<(f64, f64)> {
    let mut avg = 0.0;
    let mut rebuilt = rho.matrix() * C64::new(0.0, 0.0);
    for (w, psi) in witness {
        avg += w * m.eval(psi)?;
        rebuilt += psi.projector().matrix() * C64::new(*w, 0.0);
    }
    Ok((avg, (rebuilt - rho.matrix()).norm()))
}

/// Requested evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    OneRoot,
    TwoRoot,
    Ray,
    Ghzw,
    Oracle,
}

impl std::str::FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Self::Auto,
            "one-root" => Self::OneRoot,
            "two-root" => Self::TwoRoot,
            "ray" => Self::Ray,
            "ghzw" => Self::Ghzw,
            "oracle" => Self::Oracle,
            other => return Err(Error::Parse(format!("unknown method `{other}`"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct DispatchOptions {
    pub roots: RootOptions,
    pub oracle: OracleOptions,
    pub ghzw_grid: usize,
}

impl Default for DispatchOptions {
    fn default() -> Self {
        Self {
            roots: RootOptions::default(),
            oracle: OracleOptions::default(),
            ghzw_grid: ghzw::DEFAULT_GRID,
        }
    }
}

/// Convex roof by the best available route.
pub fn roof_dispatch(m: &PolynomialMeasure, rho: &DensityMatrix) -> Result<RoofResult> {
    roof_with(m, rho, MethodChoice::Auto, &DispatchOptions::default())
}

pub fn roof_with(
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
    choice: MethodChoice,
    opts: &DispatchOptions,
) -> Result<RoofResult> {
    if rho.dim() != m.arity() {
        return Err(Error::Dimension {
            expected: m.arity(),
            got: rho.dim(),
        });
    }
    let rank = rho.numerical_rank();
    if rank == 1 {
        let (_, vectors) = rho.eigen();
        let psi = PureState::new(vectors.into_iter().next().expect("nonempty"))?;
        let value = m.eval(&psi)?;
        return Ok(RoofResult::exact(
            value,
            RoofMethod::Pure,
            GeometrySummary::default(),
            Some(vec![(1.0, psi)]),
        ));
    }
    if rank > 2 {
        return Err(Error::Rank {
            rank,
            expected: "1 or 2",
        });
    }
    if choice == MethodChoice::Oracle {
        return oracle_result(m, rho, &opts.oracle);
    }
    let on_axis = m.kind() == MeasureKind::Tangle && ghzw::axis_coordinate(rho).is_some();
    if choice == MethodChoice::Ghzw || (choice == MethodChoice::Auto && on_axis) {
        return ghzw::roof_ghzw_axis(m, rho, opts.ghzw_grid);
    }
    let basis = spectral_decompose_rank2(rho)?;
    let profile = RootProfile::compute(m, &basis, &opts.roots)?;
    match choice {
        MethodChoice::OneRoot => roof_one_root(&profile, m, rho),
        MethodChoice::TwoRoot => roof_two_root(&profile, m, rho),
        MethodChoice::Ray => {
            let zm = closed_form::nearest_zero_point(&profile, rho)?;
            roof_separable_ray(&profile, m, rho, zm)
        }
        _ => match profile.structure {
            RootStructure::IdenticallyZero => {
                let witness = vec![
                    (basis.lambda0(), basis.phi0().clone()),
                    (basis.lambda1(), basis.phi1().clone()),
                ];
                Ok(RoofResult::exact(
                    0.0,
                    RoofMethod::IdenticallyZero,
                    GeometrySummary::default(),
                    Some(witness),
                ))
            }
            RootStructure::OneRoot => roof_one_root(&profile, m, rho),
            RootStructure::TwoRootEqualMult => roof_two_root(&profile, m, rho),
            other => Ok(oracle_result(m, rho, &opts.oracle)?.with_note(format!(
                "{other} sphere has no closed form; value is an upper bound"
            ))),
        },
    }
}

fn oracle_result(
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
    opts: &OracleOptions,
) -> Result<RoofResult> {
    let out = brute_force_roof(m, rho, opts)?;
    Ok(RoofResult {
        value: out.value,
        method: RoofMethod::OracleFallback,
        geometry: GeometrySummary::default(),
        witness: Some(out.ensemble.into_members()),
        exact: false,
        note: None,
    })
}
