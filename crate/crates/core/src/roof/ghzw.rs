//! Mixtures `ρ(p) = p|GHZ><GHZ| + (1−p)|W><W|`.
//!
//! With `φ0 = GHZ` at the north pole and `φ1 = W` at the south pole, the
//! three-tangle vanishes at the W pole and on an equilateral triangle of
//! states in a plane parallel to the equator. States of the mixture lie on
//! the polar axis. The axis coordinate `x` is measured from the triangle
//! plane, so the sphere's centre sits at `x_O < 0` and `x = z + x_O` for
//! the Bloch height `z = 2p − 1`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::Serialize;

use super::{GeometrySummary, RoofMethod, RoofResult, Witness};
use crate::error::{Error, Result};
use crate::geometry::{state_of_bloch, BlochVector, RootOptions, RootProfile};
use crate::measures::{MeasureKind, PolynomialMeasure};
use crate::quantum::{DensityMatrix, PureState, Rank2Spectral, C64};

pub const DEFAULT_GRID: usize = 2000;

pub fn ghz_state() -> PureState {
    PureState::from_kets(&[("000", C64::new(1.0, 0.0)), ("111", C64::new(1.0, 0.0))])
        .expect("valid kets")
}

pub fn w_state() -> PureState {
    let one = C64::new(1.0, 0.0);
    PureState::from_kets(&[("001", one), ("010", one), ("100", one)]).expect("valid kets")
}

/// Axis coordinate of the sphere's centre, `6/(3 + 4·2^{1/3}) − 1`.
pub fn ghzw_axis_origin() -> f64 {
    6.0 / (3.0 + 4.0 * 2f64.cbrt()) - 1.0
}

pub fn axis_x_of_p(p: f64) -> f64 {
    2.0 * p - 1.0 + ghzw_axis_origin()
}

pub fn p_of_axis_x(x: f64) -> f64 {
    0.5 * (x - ghzw_axis_origin() + 1.0)
}

/// Azimuths of the three finite roots in the GHZ/W frame.
fn triangle_azimuths() -> [f64; 3] {
    [PI / 3.0, PI, 5.0 * PI / 3.0]
}

fn basis(p: f64) -> Rank2Spectral {
    Rank2Spectral::new(ghz_state(), w_state(), p, 1.0 - p).expect("GHZ ⟂ W")
}

/// The mixture at weight `p`, its GHZ/W basis and the tangle's roots there.
pub fn ghzw_build(p: f64) -> Result<(DensityMatrix, Rank2Spectral, RootProfile)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("mixing weight {p} outside [0, 1]")));
    }
    let basis = basis(p);
    let rho = basis.reconstruct();
    let profile = RootProfile::compute(
        &PolynomialMeasure::tangle(),
        &basis,
        &RootOptions::default(),
    )?;
    Ok((rho, basis, profile))
}

fn chord_height(x: f64) -> Result<f64> {
    let z = x - ghzw_axis_origin();
    if z.abs() > 1.0 + 1e-12 || !z.is_finite() {
        return Err(Error::Domain(format!(
            "axis coordinate {x} outside the sphere"
        )));
    }
    Ok(z.clamp(-1.0, 1.0))
}

/// Distance product of the aligned three-state decomposition at axis
/// coordinate `x`, in closed form.
pub fn ghzw_flat_f(x: f64) -> Result<f64> {
    let z = chord_height(x)?;
    let xo = ghzw_axis_origin();
    let s = ((1.0 - xo * xo) * (1.0 - z * z)).max(0.0).sqrt();
    let middle = (1.0 + xo * z - s).max(0.0);
    Ok(2.0 * (z + 1.0).sqrt() * middle.sqrt() * (s + 2.0 * xo * z + 2.0))
}

/// The same product assembled from distances: to the W pole, to the
/// nearest root and to the two remaining roots.
pub fn ghzw_flat_f_product(x: f64) -> Result<f64> {
    let z = chord_height(x)?;
    let xo = ghzw_axis_origin();
    let r_psi = (1.0 - z * z).max(0.0).sqrt();
    let r_z = (1.0 - xo * xo).sqrt();
    let big_h = z + 1.0;
    let h = x.abs();
    Ok((h * h + (r_psi - r_z).powi(2)).sqrt()
        * (big_h * big_h + r_psi * r_psi).sqrt()
        * (h * h + r_psi * r_psi + r_z * r_z + r_psi * r_z))
}

/// `N` for the three-tangle on this sphere, fixed by `τ(GHZ) = 1`.
pub fn ghzw_normalization() -> f64 {
    1.0 / ghzw_flat_f(1.0 + ghzw_axis_origin()).expect("north pole is on the chord")
}

/// Where the second derivative of `f` turns negative on `x > 0`,
/// by bisection on the sign of a central second difference.
pub fn ghzw_convexity_breakpoint() -> f64 {
    let delta = 1e-3;
    let second = |x: f64| {
        ghzw_flat_f(x + delta).unwrap() - 2.0 * ghzw_flat_f(x).unwrap()
            + ghzw_flat_f(x - delta).unwrap()
    };
    let x_max = 1.0 + ghzw_axis_origin();
    let steps = 1000;
    let mut prev = 2.0 * delta;
    for i in 1..=steps {
        let x = 2.0 * delta + (x_max - 4.0 * delta) * i as f64 / steps as f64;
        if second(prev) > 0.0 && second(x) <= 0.0 {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if second(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        prev = x;
    }
    x_max
}

/// Lower convex envelope of `N·f` on `[0, x_max]`.
#[derive(Debug, Clone)]
pub struct GhzwEnvelope {
    xs: Vec<f64>,
    values: Vec<f64>,
    hull: Vec<usize>,
    normalization: f64,
}

impl GhzwEnvelope {
    pub fn new(grid: usize) -> Result<Self> {
        if grid < 3 {
            return Err(Error::Domain(
                "envelope grid needs at least 3 points".into(),
            ));
        }
        let x_max = 1.0 + ghzw_axis_origin();
        let normalization = ghzw_normalization();
        let xs: Vec<f64> = (0..grid)
            .map(|i| x_max * i as f64 / (grid - 1) as f64)
            .collect();
        let values: Vec<f64> = xs
            .iter()
            .map(|&x| normalization * ghzw_flat_f(x).expect("grid inside chord"))
            .collect();
        let mut hull: Vec<usize> = Vec::new();
        for i in 0..grid {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (xs[b] - xs[a]) * (values[i] - values[a])
                    - (values[b] - values[a]) * (xs[i] - xs[a]);
                if cross <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(i);
        }
        Ok(Self {
            xs,
            values,
            hull,
            normalization,
        })
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().expect("nonempty grid")
    }

    /// Hull segment `(left, right)` grid indices containing `x ∈ [0, x_max]`.
    fn segment(&self, x: f64) -> (usize, usize) {
        let k = self
            .hull
            .windows(2)
            .position(|w| x <= self.xs[w[1]])
            .unwrap_or(self.hull.len() - 2);
        (self.hull[k], self.hull[k + 1])
    }

    /// First axis coordinate where the envelope leaves `N·f`.
    pub fn departure(&self) -> f64 {
        self.hull
            .windows(2)
            .find(|w| w[1] > w[0] + 1)
            .map(|w| self.xs[w[0]])
            .unwrap_or_else(|| self.x_max())
    }

    /// Envelope value; 0 inside the zero simplex (`x ≤ 0`).
    pub fn value(&self, x: f64) -> Result<f64> {
        chord_height(x)?;
        if x <= 0.0 {
            return Ok(0.0);
        }
        let x = x.min(self.x_max());
        let (i, j) = self.segment(x);
        if j == i + 1 {
            return Ok(self.normalization * ghzw_flat_f(x)?);
        }
        let t = (x - self.xs[i]) / (self.xs[j] - self.xs[i]);
        Ok((1.0 - t) * self.values[i] + t * self.values[j])
    }

    /// Decomposition of the axis state at `x` realizing [`Self::value`].
    pub fn witness(&self, x: f64) -> Result<Witness> {
        let z = chord_height(x)?;
        let sphere = basis(0.5);
        if x <= 0.0 {
            // W plus the root triangle.
            let z_t = -ghzw_axis_origin();
            let w4 = (z_t - z) / (z_t + 1.0);
            let mut out = vec![(w4, w_state())];
            out.extend(
                aligned_triangle(&sphere, z_t)
                    .into_iter()
                    .map(|s| ((1.0 - w4) / 3.0, s)),
            );
            return Ok(out.into_iter().filter(|(w, _)| *w > 1e-15).collect());
        }
        let x = x.min(self.x_max());
        let (i, j) = self.segment(x);
        if j == i + 1 {
            return Ok(aligned_triangle(&sphere, z)
                .into_iter()
                .map(|s| (1.0 / 3.0, s))
                .collect());
        }
        let t = (x - self.xs[i]) / (self.xs[j] - self.xs[i]);
        let mut out = Vec::new();
        for (weight, xe) in [(1.0 - t, self.xs[i]), (t, self.xs[j])] {
            let ze = chord_height(xe)?;
            if weight <= 1e-15 {
                continue;
            }
            if 1.0 - ze < 1e-14 {
                out.push((weight, ghz_state()));
            } else {
                out.extend(
                    aligned_triangle(&sphere, ze)
                        .into_iter()
                        .map(|s| (weight / 3.0, s)),
                );
            }
        }
        Ok(out)
    }
}

/// Three states at Bloch height `z` on the meridians of the roots.
fn aligned_triangle(sphere: &Rank2Spectral, z: f64) -> Vec<PureState> {
    let rad = (1.0 - z * z).max(0.0).sqrt();
    triangle_azimuths()
        .iter()
        .map(|phi| {
            let v = Vector3::new(rad * phi.cos(), rad * phi.sin(), z);
            state_of_bloch(sphere, BlochVector::from_vector(v))
        })
        .collect()
}

/// Three-tangle roof of the axis state at coordinate `x`.
pub fn ghzw_tangle_on_axis(x: f64, grid: usize) -> Result<f64> {
    GhzwEnvelope::new(grid)?.value(x)
}

/// Axis coordinate of `rho` if it is a GHZ/W mixture.
pub fn axis_coordinate(rho: &DensityMatrix) -> Option<f64> {
    if rho.dim() != 8 {
        return None;
    }
    let (g, w) = (ghz_state(), w_state());
    let gg = rho.element(&g, &g).re;
    let ww = rho.element(&w, &w).re;
    let gw = rho.element(&g, &w).norm();
    if (gg + ww - 1.0).abs() < 1e-9 && gw < 1e-9 {
        Some(axis_x_of_p(gg))
    } else {
        None
    }
}

pub fn roof_ghzw_axis(
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
    grid: usize,
) -> Result<RoofResult> {
    if m.kind() != MeasureKind::Tangle {
        return Err(Error::Domain(format!(
            "the GHZ/W axis roof is computed for the three-tangle, not `{}`",
            m.name()
        )));
    }
    let x =
        axis_coordinate(rho).ok_or_else(|| Error::Domain("state is not a GHZ/W mixture".into()))?;
    let env = GhzwEnvelope::new(grid)?;
    Ok(RoofResult::exact(
        env.value(x)?,
        RoofMethod::GhzwAxis,
        GeometrySummary {
            h: Some(x.max(0.0)),
            ..Default::default()
        },
        Some(env.witness(x)?),
    ))
}

/// One row of a scan along the mixing weight.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GhzwScanRow {
    pub p: f64,
    pub x: f64,
    /// `N·f(x)`, the value of the aligned decomposition.
    pub flat_f: f64,
    pub tangle_envelope: f64,
}

pub fn ghzw_scan(from: f64, to: f64, count: usize, grid: usize) -> Result<Vec<GhzwScanRow>> {
    if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) || count == 0 {
        return Err(Error::Domain(format!(
            "scan {from}:{to}:{count} outside [0, 1]"
        )));
    }
    let env = GhzwEnvelope::new(grid)?;
    (0..count)
        .map(|i| {
            let p = if count == 1 {
                from
            } else {
                from + (to - from) * i as f64 / (count - 1) as f64
            };
            let x = axis_x_of_p(p);
            Ok(GhzwScanRow {
                p,
                x,
                flat_f: env.normalization() * ghzw_flat_f(x)?,
                tangle_envelope: env.value(x)?,
            })
        })
        .collect()
}
