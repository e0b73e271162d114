//! The degree-`d` polynomial `P_d(φ0 + ωφ1)` and its roots on the sphere.

use std::f64::consts::PI;

use serde::Serialize;

use super::{bloch_of_omega, chordal_distance, superpose, BlochVector, ExtendedComplex};
use crate::error::{Error, Result};
use crate::measures::PolynomialMeasure;
use crate::quantum::{Rank2Spectral, C64};

/// Tolerances for root extraction and clustering.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RootOptions {
    /// Chordal radius under which roots are merged unconditionally.
    pub root_tol: f64,
    /// Relative size below which a leading coefficient counts as zero
    /// (each one adds multiplicity to the root at infinity).
    pub lead_tol: f64,
    /// Relative backward error accepted when merging a wider cluster into
    /// one multiple root.
    pub mult_tol: f64,
    /// Relative size below which every coefficient is zero.
    pub zero_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            root_tol: 1e-6,
            lead_tol: 1e-10,
            mult_tol: 1e-9,
            zero_tol: 1e-12,
        }
    }
}

/// A root cluster on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub omega: ExtendedComplex,
    pub multiplicity: usize,
}

impl Root {
    pub fn bloch(&self) -> BlochVector {
        bloch_of_omega(self.omega)
    }
}

/// Coefficients `c_0..c_d` of `ω ↦ P_d(φ0 + ωφ1)`.
///
/// The polynomial is sampled at the `(d+1)`-th roots of unity and inverted
/// with a discrete Fourier transform, which is exact for degree `d`.
pub fn polynomial_coefficients(m: &PolynomialMeasure, basis: &Rank2Spectral) -> Result<Vec<C64>> {
    let dim = basis.phi0().dim();
    if dim != m.arity() {
        return Err(Error::Dimension {
            expected: m.arity(),
            got: dim,
        });
    }
    let n = m.degree() as usize + 1;
    let nodes: Vec<C64> = (0..n)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect();
    let values: Vec<C64> = nodes
        .iter()
        .map(|&w| m.invariant_unchecked(&superpose(basis, C64::new(1.0, 0.0), w)))
        .collect();
    Ok((0..n)
        .map(|k| {
            let s: C64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * nodes[(j * k) % n].conj())
                .sum();
            s / n as f64
        })
        .collect())
}

/// Horner evaluation of `Σ c_k ω^k`.
pub fn eval_poly(coeffs: &[C64], w: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

fn eval_derivative(coeffs: &[C64], w: C64) -> C64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, (k, &c)| acc * w + c * k as f64)
}

fn max_abs(coeffs: &[C64]) -> f64 {
    coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Roots of `Σ c_k ω^k` on the Riemann sphere, clustered with
/// multiplicities. An identically vanishing polynomial yields no roots.
pub fn find_roots(coeffs: &[C64], opts: &RootOptions) -> Vec<Root> {
    let scale = max_abs(coeffs);
    if coeffs.is_empty() || scale <= opts.zero_tol {
        return Vec::new();
    }
    let mut top = coeffs.len() - 1;
    while top > 0 && coeffs[top].norm() < opts.lead_tol * scale {
        top -= 1;
    }
    let at_infinity = coeffs.len() - 1 - top;
    let mut points: Vec<ExtendedComplex> = finite_roots(&coeffs[..=top])
        .into_iter()
        .map(ExtendedComplex::Finite)
        .collect();
    points.extend(std::iter::repeat_n(ExtendedComplex::Infinity, at_infinity));
    let mut roots = cluster(coeffs, points, opts);
    roots.sort_by(|a, b| {
        root_order(a)
            .total_cmp(&root_order(b))
            .then(root_arg(a).total_cmp(&root_arg(b)))
    });
    roots
}

fn root_order(r: &Root) -> f64 {
    match r.omega {
        ExtendedComplex::Infinity => -1.0,
        ExtendedComplex::Finite(z) => (z.norm() * 1e9).round() / 1e9,
    }
}

fn root_arg(r: &Root) -> f64 {
    match r.omega {
        ExtendedComplex::Infinity => 0.0,
        ExtendedComplex::Finite(z) => z.arg(),
    }
}

/// Roots of a polynomial with nonzero leading coefficient by Aberth–Ehrlich
/// simultaneous iteration, each then polished by Newton steps that are
/// kept only while they reduce the residual.
fn finite_roots(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let raw = match n {
        0 => return Vec::new(),
        1 => vec![-c[0] / c[1]],
        _ => aberth(c),
    };
    raw.into_iter().map(|r| polish(c, r)).collect()
}

fn aberth(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let lead = c[n].norm();
    let radius = {
        let g = (c[0].norm() / lead).powf(1.0 / n as f64);
        if g > 0.0 && g.is_finite() {
            g
        } else {
            1.0
        }
    };
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut largest_step: f64 = 0.0;
        for k in 0..n {
            let p = eval_poly(c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / eval_derivative(c, z[k]);
            let repulsion: C64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                largest_step = largest_step.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if largest_step < 1e-15 {
            break;
        }
    }
    z
}

fn polish(c: &[C64], mut r: C64) -> C64 {
    let mut res = eval_poly(c, r).norm();
    for _ in 0..30 {
        if res == 0.0 {
            break;
        }
        let dp = eval_derivative(c, r);
        if dp.norm() == 0.0 {
            break;
        }
        let next = r - eval_poly(c, r) / dp;
        let next_res = eval_poly(c, next).norm();
        if next_res.is_nan() || next_res >= res {
            break;
        }
        r = next;
        res = next_res;
    }
    r
}

/// Average of cluster members, taken in the chart `ω` or `1/ω` so that
/// clusters near the south pole stay accurate.
fn centroid(members: &[ExtendedComplex]) -> ExtendedComplex {
    let inverted = members.iter().any(|m| match m {
        ExtendedComplex::Infinity => true,
        ExtendedComplex::Finite(z) => z.norm() > 1.0,
    });
    let n = members.len() as f64;
    if inverted {
        let mean: C64 = members
            .iter()
            .map(|m| match m.recip() {
                ExtendedComplex::Finite(u) => u,
                ExtendedComplex::Infinity => {
                    unreachable!("member near the north pole in inverted chart")
                }
            })
            .sum::<C64>()
            / n;
        if mean.norm() < 1e-300 {
            ExtendedComplex::Infinity
        } else {
            ExtendedComplex::Finite(mean.inv())
        }
    } else {
        ExtendedComplex::Finite(
            members
                .iter()
                .map(|m| match m {
                    ExtendedComplex::Finite(z) => *z,
                    ExtendedComplex::Infinity => unreachable!(),
                })
                .sum::<C64>()
                / n,
        )
    }
}

/// The polynomial in a chart around `center`: `ω` itself when `|ω| ≤ 1`,
/// otherwise `u = 1/ω` with reversed coefficients. Returns the chart
/// coefficients, the centre in chart coordinates and whether it is inverted.
fn chart(coeffs: &[C64], center: ExtendedComplex) -> (Vec<C64>, C64, bool) {
    match center {
        ExtendedComplex::Infinity => (
            coeffs.iter().rev().copied().collect(),
            C64::new(0.0, 0.0),
            true,
        ),
        ExtendedComplex::Finite(z) if z.norm() > 1.0 => {
            (coeffs.iter().rev().copied().collect(), z.inv(), true)
        }
        ExtendedComplex::Finite(z) => (coeffs.to_vec(), z, false),
    }
}

/// Sharpens the centre of a `k`-member cluster. The plain centroid of a
/// split multiple root is only as good as the split is symmetric, whereas
/// the root is a simple zero of the `(k-1)`-th derivative.
fn refine_centre(coeffs: &[C64], members: &[ExtendedComplex]) -> ExtendedComplex {
    let start = centroid(members);
    let k = members.len();
    if k < 2 || members.iter().all(|m| *m == ExtendedComplex::Infinity) {
        return start;
    }
    let (q, mut t, inverted) = chart(coeffs, start);
    let mut d = q;
    for _ in 0..k - 1 {
        d = d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as f64)
            .collect();
    }
    if d.len() < 2 {
        return start;
    }
    t = polish(&d, t);
    if !inverted {
        ExtendedComplex::Finite(t)
    } else if t.norm() < 1e-300 {
        ExtendedComplex::Infinity
    } else {
        ExtendedComplex::Finite(t.inv())
    }
}

/// Whether `center` is a root of multiplicity at least `k` up to a
/// relative backward error `tol`: the first `k` Taylor coefficients at the
/// centre must be negligible against the coefficient scale.
fn is_multiple_root(coeffs: &[C64], center: ExtendedComplex, k: usize, tol: f64) -> bool {
    let (q, t, _) = chart(coeffs, center);
    let scale = max_abs(&q);
    let mut b = q.clone();
    // Repeated synthetic division gives the Taylor coefficients at t.
    let n = b.len();
    for j in 0..k.min(n) {
        for i in (j..n - 1).rev() {
            let carry = b[i + 1] * t;
            b[i] += carry;
        }
        if b[j].norm() > tol * scale {
            return false;
        }
    }
    true
}

const MERGE_REACH: f64 = 0.1;

fn cluster(coeffs: &[C64], points: Vec<ExtendedComplex>, opts: &RootOptions) -> Vec<Root> {
    // Single linkage at root_tol.
    let mut groups: Vec<Vec<ExtendedComplex>> = Vec::new();
    for p in points {
        let touching: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.iter().any(|q| chordal_distance(*q, p) < opts.root_tol))
            .map(|(i, _)| i)
            .collect();
        let mut merged = vec![p];
        for &i in touching.iter().rev() {
            merged.extend(groups.swap_remove(i));
        }
        groups.push(merged);
    }
    // Wider merges accepted only when the polynomial itself supports a
    // multiple root at the merged centre.
    loop {
        let centres: Vec<ExtendedComplex> = groups.iter().map(|g| centroid(g)).collect();
        let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let d = chordal_distance(centres[i], centres[j]);
                if d < MERGE_REACH {
                    candidates.push((d, i, j));
                }
            }
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        let accepted = candidates.into_iter().find(|&(_, i, j)| {
            let union: Vec<ExtendedComplex> = groups[i].iter().chain(&groups[j]).copied().collect();
            is_multiple_root(
                coeffs,
                refine_centre(coeffs, &union),
                union.len(),
                opts.mult_tol,
            )
        });
        match accepted {
            Some((_, i, j)) => {
                let tail = groups.swap_remove(j);
                groups[i].extend(tail);
            }
            None => break,
        }
    }
    groups
        .iter()
        .map(|g| Root {
            omega: refine_centre(coeffs, g),
            multiplicity: g.len(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::PureState;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn from_roots(roots: &[C64], lead: C64) -> Vec<C64> {
        let mut p = vec![lead];
        for r in roots {
            let mut next = vec![C64::new(0.0, 0.0); p.len() + 1];
            for (i, a) in p.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            p = next;
        }
        p
    }

    #[test]
    fn linear_polynomial_has_root_at_infinity_too() {
        let roots = find_roots(&[c(0.0), c(1.0), c(0.0)], &RootOptions::default());
        assert_eq!(roots.len(), 2);
        assert_eq!(
            roots[0],
            Root {
                omega: ExtendedComplex::Infinity,
                multiplicity: 1
            }
        );
        assert_eq!(roots[1].omega, ExtendedComplex::finite(0.0, 0.0));
    }

    #[test]
    fn quartic_roots_of_minus_one() {
        let roots = find_roots(
            &[c(1.0), c(0.0), c(0.0), c(0.0), c(1.0)],
            &RootOptions::default(),
        );
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert_eq!(r.multiplicity, 1);
            let ExtendedComplex::Finite(z) = r.omega else {
                panic!()
            };
            assert!((z.powi(4) + 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert!(find_roots(&[c(0.0); 5], &RootOptions::default()).is_empty());
        assert!(find_roots(&[c(1e-15); 5], &RootOptions::default()).is_empty());
    }

    #[test]
    fn fourfold_root_is_one_cluster() {
        let z = C64::new(0.3, -0.7);
        let roots = find_roots(
            &from_roots(&[z; 4], C64::new(0.4, 1.1)),
            &RootOptions::default(),
        );
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 4);
        assert!(chordal_distance(roots[0].omega, ExtendedComplex::Finite(z)) < 1e-9);
    }

    #[test]
    fn double_roots_pair_up() {
        let (a, b) = (C64::new(-1.3, 0.2), C64::new(2.5, 1.0));
        let roots = find_roots(&from_roots(&[a, a, b, b], c(0.7)), &RootOptions::default());
        let mut mults: Vec<usize> = roots.iter().map(|r| r.multiplicity).collect();
        mults.sort();
        assert_eq!(mults, vec![2, 2]);
    }

    #[test]
    fn triple_root_at_infinity() {
        // 2 + 3ω: one finite root, three at infinity when read as a quartic.
        let roots = find_roots(
            &[c(2.0), c(3.0), c(0.0), c(0.0), c(0.0)],
            &RootOptions::default(),
        );
        assert_eq!(
            roots[0],
            Root {
                omega: ExtendedComplex::Infinity,
                multiplicity: 3
            }
        );
        assert_eq!(roots[1].multiplicity, 1);
    }

    #[test]
    fn coefficients_of_concurrence_on_poles() {
        let basis = Rank2Spectral::new(
            PureState::basis(2, 0).unwrap(),
            PureState::basis(2, 3).unwrap(),
            0.6,
            0.4,
        )
        .unwrap();
        let coeffs = polynomial_coefficients(&PolynomialMeasure::concurrence(), &basis).unwrap();
        assert!(coeffs[0].norm() < 1e-15);
        assert!((coeffs[1] - 1.0).norm() < 1e-15);
        assert!(coeffs[2].norm() < 1e-15);
    }

    #[test]
    fn taylor_test_rejects_simple_roots() {
        let p = from_roots(&[c(0.1), c(0.1001)], c(1.0));
        assert!(!is_multiple_root(
            &p,
            ExtendedComplex::finite(0.10005, 0.0),
            2,
            1e-9
        ));
        let q = from_roots(&[c(0.1), c(0.1)], c(1.0));
        assert!(is_multiple_root(
            &q,
            ExtendedComplex::finite(0.1, 0.0),
            2,
            1e-12
        ));
    }
}
