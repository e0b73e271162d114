use std::f64::consts::PI;

use nalgebra::Vector3;

use super::{GeometrySummary, RoofMethod, RoofResult, Witness};
use crate::error::{Error, Result};
use crate::geometry::{
    bloch_of_density, omega_state, state_of_bloch, BlochVector, RootProfile, RootStructure,
};
use crate::measures::PolynomialMeasure;
use crate::quantum::DensityMatrix;

const FLAT_TOL: f64 = 1e-14;

fn require(
    profile: &RootProfile,
    allowed: &[RootStructure],
    operation: &'static str,
) -> Result<()> {
    if allowed.contains(&profile.structure) {
        Ok(())
    } else {
        Err(Error::Structure {
            found: profile.structure.to_string(),
            operation,
        })
    }
}

/// Converts the degree-`d` form `N·g^{d/2}` into a measure value.
fn measure_value(profile: &RootProfile, m: &PolynomialMeasure, g: f64) -> f64 {
    let d = f64::from(profile.degree);
    m.from_linear(profile.normalization * g.max(0.0).powf(d / 2.0))
}

fn witness_from_points(profile: &RootProfile, points: &[(f64, Vector3<f64>)]) -> Witness {
    points
        .iter()
        .filter(|(w, _)| *w > 1e-15)
        .map(|(w, v)| {
            (
                *w,
                state_of_bloch(&profile.sphere, BlochVector::from_vector(*v)),
            )
        })
        .collect()
}

/// Roof of a sphere whose only zero is a `d`-fold root `z`:
/// `E = N^p (2h_c)^{dp/2}` with `h_c = 1 − r·z`.
pub fn roof_one_root(
    profile: &RootProfile,
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
) -> Result<RoofResult> {
    require(profile, &[RootStructure::OneRoot], "one-root roof")?;
    let r = bloch_of_density(&profile.sphere, rho)?.vector();
    let z = profile.roots[0].bloch().vector();
    let height = r.dot(&z);
    let h_c = 1.0 - height;
    let value = measure_value(profile, m, 2.0 * h_c);

    // Equilateral triangle on the small circle at the height of r; every
    // vertex has the same distance to the root.
    let centre = z * height;
    let radius = (1.0 - height * height).max(0.0).sqrt();
    let offset = r - centre;
    let points = if radius < 1e-12 {
        vec![(1.0, z * height.signum())]
    } else {
        let t = (offset.norm() / radius).min(1.0);
        let e1 = if offset.norm() > FLAT_TOL {
            offset.normalize()
        } else {
            crate::geometry::SphereFrame::with_pole(z).e1
        };
        let e2 = z.cross(&e1);
        (0..3)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 3.0;
                let w = if k == 0 {
                    (1.0 + 2.0 * t) / 3.0
                } else {
                    (1.0 - t) / 3.0
                };
                (w, centre + (e1 * a.cos() + e2 * a.sin()) * radius)
            })
            .collect()
    };
    Ok(RoofResult::exact(
        value,
        RoofMethod::ClosedFormOneRoot,
        GeometrySummary {
            h_c: Some(h_c),
            ..Default::default()
        },
        Some(witness_from_points(profile, &points)),
    ))
}

/// `(h, R, s)` for a Bloch vector `r` against the zero line through `a`,
/// `b`; `R` and `s` are `None` when `r` lies on the line.
pub fn two_root_geometry(
    a: Vector3<f64>,
    b: Vector3<f64>,
    r: Vector3<f64>,
) -> (f64, Option<(f64, f64)>) {
    let u = (b - a).normalize();
    let w = r - a;
    let perp = w - u * w.dot(&u);
    let h = perp.norm();
    if h < FLAT_TOL {
        return (h, None);
    }
    let n = u.cross(&w).normalize();
    let s = n.dot(&a).abs().min(1.0);
    (h, Some(((1.0 - s * s).sqrt(), s)))
}

/// Roof of a sphere with two roots of equal multiplicity:
/// `E = N^p (2Rh)^{dp/2}`.
pub fn roof_two_root(
    profile: &RootProfile,
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
) -> Result<RoofResult> {
    require(profile, &[RootStructure::TwoRootEqualMult], "two-root roof")?;
    let r = bloch_of_density(&profile.sphere, rho)?.vector();
    let a = profile.roots[0].bloch().vector();
    let b = profile.roots[1].bloch().vector();
    let (h, plane) = two_root_geometry(a, b, r);
    let Some((big_r, s)) = plane else {
        // On the zero line: a mixture of the two root states.
        let len = (b - a).norm();
        let t = ((r - a).dot(&(b - a)) / (len * len)).clamp(0.0, 1.0);
        let witness = vec![
            (
                1.0 - t,
                omega_state(&profile.sphere, profile.roots[0].omega),
            ),
            (t, omega_state(&profile.sphere, profile.roots[1].omega)),
        ]
        .into_iter()
        .filter(|(w, _)| *w > 1e-15)
        .collect();
        return Ok(RoofResult::exact(
            0.0,
            RoofMethod::ClosedFormTwoRoot,
            GeometrySummary {
                h: Some(h),
                ..Default::default()
            },
            Some(witness),
        )
        .with_note("state lies on the zero line"));
    };
    let value = measure_value(profile, m, 2.0 * big_r * h);

    // Chord through r parallel to the zero line.
    let u = (b - a).normalize();
    let ru = r.dot(&u);
    let disc = (ru * ru - r.norm_squared() + 1.0).max(0.0).sqrt();
    let (tp, tm) = (-ru + disc, -ru - disc);
    let points = if tp - tm < FLAT_TOL {
        vec![(1.0, r)]
    } else {
        let wp = -tm / (tp - tm);
        vec![(wp, r + u * tp), (1.0 - wp, r + u * tm)]
    };
    Ok(RoofResult::exact(
        value,
        RoofMethod::ClosedFormTwoRoot,
        GeometrySummary {
            h: Some(h),
            r: Some(big_r),
            s: Some(s),
            h_c: None,
        },
        Some(witness_from_points(profile, &points)),
    ))
}

/// Point of the zero polytope closest to the state: the root itself, or
/// the projection onto the zero segment.
pub fn nearest_zero_point(profile: &RootProfile, rho: &DensityMatrix) -> Result<BlochVector> {
    require(
        profile,
        &[RootStructure::OneRoot, RootStructure::TwoRootEqualMult],
        "separable ray",
    )?;
    let r = bloch_of_density(&profile.sphere, rho)?.vector();
    let a = profile.roots[0].bloch().vector();
    if profile.structure == RootStructure::OneRoot {
        return Ok(BlochVector::from_vector(a));
    }
    let b = profile.roots[1].bloch().vector();
    let t = ((r - a).dot(&(b - a)) / (b - a).norm_squared()).clamp(0.0, 1.0);
    Ok(BlochVector::from_vector(a + (b - a) * t))
}

/// Roof along the ray from a zero-polytope point `z_m` through the state:
/// `E(ψ_m)·(|r − z_m| / |ψ_m − z_m|)^{dp/2}` where `ψ_m` is where the ray
/// leaves the sphere.
pub fn roof_separable_ray(
    profile: &RootProfile,
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
    z_m: BlochVector,
) -> Result<RoofResult> {
    require(
        profile,
        &[RootStructure::OneRoot, RootStructure::TwoRootEqualMult],
        "separable ray",
    )?;
    let zm = z_m.vector();
    let a = profile.roots[0].bloch().vector();
    let admissible = match profile.structure {
        RootStructure::OneRoot => (zm - a).norm() < 1e-9,
        _ => {
            let b = profile.roots[1].bloch().vector();
            let t = ((zm - a).dot(&(b - a)) / (b - a).norm_squared()).clamp(0.0, 1.0);
            (a + (b - a) * t - zm).norm() < 1e-9
        }
    };
    if !admissible {
        return Err(Error::Domain(
            "ray origin is not in the zero polytope".into(),
        ));
    }
    let r = bloch_of_density(&profile.sphere, rho)?.vector();
    let dir = r - zm;
    let dist = dir.norm();
    let geometry = GeometrySummary::default();
    if dist < FLAT_TOL {
        return Ok(
            RoofResult::exact(0.0, RoofMethod::SeparableRay, geometry, None)
                .with_note("state coincides with the ray origin"),
        );
    }
    let e = dir / dist;
    let ze = zm.dot(&e);
    let t = -ze + (ze * ze - zm.norm_squared() + 1.0).max(0.0).sqrt();
    let psi_m = zm + e * t;
    let ratio = dist / t;
    let d = f64::from(profile.degree);
    let linear = profile.linear_value_at(&BlochVector::from_vector(psi_m)) * ratio.powf(d / 2.0);
    let value = m.from_linear(linear);
    // The two-point witness (ψ_m and the zero point) is optimal only when
    // the measure is linear along the ray.
    let witness = if (m.homogeneous_degree() - 2.0).abs() < 1e-12 {
        let mut points = vec![(ratio, psi_m)];
        let zero_weight = 1.0 - ratio;
        match profile.structure {
            RootStructure::OneRoot => points.push((zero_weight, a)),
            _ => {
                let b = profile.roots[1].bloch().vector();
                let s = ((zm - a).dot(&(b - a)) / (b - a).norm_squared()).clamp(0.0, 1.0);
                points.push((zero_weight * (1.0 - s), a));
                points.push((zero_weight * s, b));
            }
        }
        Some(witness_from_points(profile, &points))
    } else {
        None
    };
    Ok(RoofResult::exact(
        value,
        RoofMethod::SeparableRay,
        geometry,
        witness,
    ))
}

/// Two antipodal roots: `h = 2|<z1|ρ|z2>|` and `R = 1`.
pub fn roof_orthogonal_roots(
    profile: &RootProfile,
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
) -> Result<RoofResult> {
    require(
        profile,
        &[RootStructure::TwoRootEqualMult],
        "orthogonal-root roof",
    )?;
    let z1 = omega_state(&profile.sphere, profile.roots[0].omega);
    let z2 = omega_state(&profile.sphere, profile.roots[1].omega);
    let overlap = z1.inner(&z2).norm();
    if overlap > 1e-8 {
        return Err(Error::Structure {
            found: format!("two roots with overlap {overlap:.3e}"),
            operation: "orthogonal-root roof",
        });
    }
    let h = 2.0 * rho.element(&z1, &z2).norm();
    let value = measure_value(profile, m, 2.0 * h);
    let witness = roof_two_root(profile, m, rho)?.witness;
    Ok(RoofResult::exact(
        value,
        RoofMethod::OrthogonalRootCoherence,
        GeometrySummary {
            h: Some(h),
            r: Some(1.0),
            s: Some(0.0),
            h_c: None,
        },
        witness,
    ))
}
