use std::f64::consts::PI;

use serde::Serialize;

use crate::geometry::{BlochVector, RootProfile, SphereFrame};
use crate::measures::PolynomialMeasure;

const THETA_STEPS: usize = 720;

/// Points of one level curve; `index` counts crossings from the first
/// root outwards along each meridian.
#[derive(Debug, Clone, Serialize)]
pub struct IsoCurve {
    pub index: usize,
    pub points: Vec<BlochVector>,
}

/// Frame used for sampling: pole at the first root.
pub fn iso_frame(profile: &RootProfile) -> SphereFrame {
    let pole = profile
        .roots
        .first()
        .map(|r| r.bloch().vector())
        .unwrap_or_else(nalgebra::Vector3::z);
    SphereFrame::with_pole(pole)
}

/// Level curves of the pure-state measure, `level` in measure units.
///
/// Each of `count` meridians through the first root is scanned for sign
/// changes of `E − level`, refined by bisection. Crossings are grouped by
/// their order along the meridian and sorted by azimuth.
pub fn iso_curves(
    profile: &RootProfile,
    m: &PolynomialMeasure,
    level: f64,
    count: usize,
) -> Vec<IsoCurve> {
    if level.is_nan() || level <= 0.0 || profile.roots.is_empty() || count == 0 {
        return Vec::new();
    }
    let target = m.to_linear(level);
    let frame = iso_frame(profile);
    let f = |theta: f64, phi: f64| {
        profile.linear_value_at(&BlochVector::from_vector(frame.point(theta, phi))) - target
    };
    let mut curves: Vec<IsoCurve> = Vec::new();
    for j in 0..count {
        let phi = 2.0 * PI * j as f64 / count as f64;
        let mut crossing = 0;
        let mut prev_t = 0.0;
        let mut prev_v = f(0.0, phi);
        for step in 1..=THETA_STEPS {
            let t = PI * step as f64 / THETA_STEPS as f64;
            let v = f(t, phi);
            if (prev_v < 0.0) != (v < 0.0) {
                let (mut lo, mut hi, mut flo) = (prev_t, t, prev_v);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = f(mid, phi);
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-15 {
                        break;
                    }
                }
                let point = BlochVector::from_vector(frame.point(0.5 * (lo + hi), phi));
                if curves.len() <= crossing {
                    curves.push(IsoCurve {
                        index: crossing,
                        points: Vec::new(),
                    });
                }
                curves[crossing].points.push(point);
                crossing += 1;
            }
            prev_t = t;
            prev_v = v;
        }
    }
    curves
}

/// All points of [`iso_curves`] in one list.
pub fn iso_curve_sample(
    profile: &RootProfile,
    m: &PolynomialMeasure,
    level: f64,
    count: usize,
) -> Vec<BlochVector> {
    iso_curves(profile, m, level, count)
        .into_iter()
        .flat_map(|c| c.points)
        .collect()
}
