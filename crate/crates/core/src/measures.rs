//! Polynomial SLOCC invariants and the pure-state measures built on them.
//!
//! A measure is `E(ψ) = κ·|P_d(ψ)|^p` for a degree-`d` homogeneous complex
//! invariant `P_d`. The geometry works with the degree-`d` form
//! `E^{1/p} = κ^{1/p}·|P_d|`, which is what the root normalization `N`
//! refers to.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quantum::{PureState, SloccOperator, C64};

/// Complex invariant evaluated on an unnormalized amplitude vector.
pub type Invariant = Arc<dyn Fn(&[C64]) -> C64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Concurrence,
    Tangle,
    SqrtTangle,
    Custom,
}

#[derive(Clone)]
pub struct PolynomialMeasure {
    name: String,
    kind: MeasureKind,
    degree: u32,
    power: f64,
    kappa: f64,
    arity: usize,
    invariant: Invariant,
}

impl fmt::Debug for PolynomialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolynomialMeasure")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("power", &self.power)
            .field("kappa", &self.kappa)
            .field("arity", &self.arity)
            .finish()
    }
}

impl PolynomialMeasure {
    /// Registers a custom measure. `degree·power > 4` is accepted but
    /// logged, since such exponents are not entanglement monotones.
    pub fn custom(
        name: impl Into<String>,
        degree: u32,
        power: f64,
        kappa: f64,
        arity: usize,
        invariant: Invariant,
    ) -> Result<Self> {
        if degree == 0
            || power.is_nan()
            || power <= 0.0
            || kappa.is_nan()
            || kappa <= 0.0
            || !arity.is_power_of_two()
        {
            return Err(Error::Domain(format!(
                "measure needs degree ≥ 1, power > 0, kappa > 0 and a power-of-two arity \
                 (got d={degree}, p={power}, κ={kappa}, arity={arity})"
            )));
        }
        let name = name.into();
        if f64::from(degree) * power > 4.0 + 1e-12 {
            log::warn!(
                "measure `{name}` has d·p = {} > 4; not a monotone on qubits",
                f64::from(degree) * power
            );
        }
        Ok(Self {
            name,
            kind: MeasureKind::Custom,
            degree,
            power,
            kappa,
            arity,
            invariant,
        })
    }

    /// `C = 2|ψ00 ψ11 − ψ01 ψ10|`.
    pub fn concurrence() -> Self {
        Self {
            name: "concurrence".into(),
            kind: MeasureKind::Concurrence,
            degree: 2,
            power: 1.0,
            kappa: 2.0,
            arity: 4,
            invariant: Arc::new(|v| concurrence_invariant(v).expect("arity checked")),
        }
    }

    /// Three-tangle `τ = 4|Det|`.
    pub fn tangle() -> Self {
        Self {
            name: "tangle".into(),
            kind: MeasureKind::Tangle,
            degree: 4,
            power: 1.0,
            kappa: 4.0,
            arity: 8,
            invariant: Arc::new(|v| three_tangle_invariant(v).expect("arity checked")),
        }
    }

    /// `√τ = 2|Det|^{1/2}`.
    pub fn sqrt_tangle() -> Self {
        Self {
            name: "sqrt-tangle".into(),
            kind: MeasureKind::SqrtTangle,
            degree: 4,
            power: 0.5,
            kappa: 2.0,
            arity: 8,
            invariant: Arc::new(|v| three_tangle_invariant(v).expect("arity checked")),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "concurrence" => Ok(Self::concurrence()),
            "tangle" | "three-tangle" => Ok(Self::tangle()),
            "sqrt-tangle" => Ok(Self::sqrt_tangle()),
            other => Err(Error::UnknownMeasure(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Homogeneous degree `d·p` of the measure itself.
    pub fn homogeneous_degree(&self) -> f64 {
        f64::from(self.degree) * self.power
    }

    pub fn is_monotone(&self) -> bool {
        self.homogeneous_degree() <= 4.0 + 1e-12
    }

    fn check_arity(&self, len: usize) -> Result<()> {
        if len != self.arity {
            return Err(Error::Dimension {
                expected: self.arity,
                got: len,
            });
        }
        Ok(())
    }

    /// `P_d(v)` for an arbitrary (unnormalized) vector.
    pub fn invariant(&self, v: &[C64]) -> Result<C64> {
        self.check_arity(v.len())?;
        Ok((self.invariant)(v))
    }

    pub(crate) fn invariant_unchecked(&self, v: &[C64]) -> C64 {
        (self.invariant)(v)
    }

    /// `κ|P_d(v)|^p` on the vector as given.
    pub fn value_of(&self, v: &[C64]) -> Result<f64> {
        Ok(self.kappa * self.invariant(v)?.norm().powf(self.power))
    }

    /// Degree-`d` form `κ^{1/p}|P_d(v)|` whose `p`-th power is the measure.
    pub fn linear_value_of(&self, v: &[C64]) -> Result<f64> {
        Ok(self.kappa.powf(1.0 / self.power) * self.invariant(v)?.norm())
    }

    /// Measure value of a normalized state.
    pub fn eval(&self, psi: &PureState) -> Result<f64> {
        self.value_of(psi.amplitudes())
    }

    /// Converts a value of the degree-`d` form into a measure value.
    pub fn from_linear(&self, linear: f64) -> f64 {
        linear.max(0.0).powf(self.power)
    }

    /// Inverse of [`Self::from_linear`].
    pub fn to_linear(&self, value: f64) -> f64 {
        value.max(0.0).powf(1.0 / self.power)
    }
}

/// Free-function form of [`PolynomialMeasure::eval`].
pub fn eval_measure(m: &PolynomialMeasure, psi: &PureState) -> Result<f64> {
    m.eval(psi)
}

/// `ψ00 ψ11 − ψ01 ψ10`.
pub fn concurrence_invariant(v: &[C64]) -> Result<C64> {
    if v.len() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: v.len(),
        });
    }
    Ok(v[0] * v[3] - v[1] * v[2])
}

/// Cayley hyperdeterminant of a three-qubit amplitude vector; `τ = 4|·|`.
pub fn three_tangle_invariant(v: &[C64]) -> Result<C64> {
    if v.len() != 8 {
        return Err(Error::Dimension {
            expected: 8,
            got: v.len(),
        });
    }
    let (p000, p001, p010, p011) = (v[0], v[1], v[2], v[3]);
    let (p100, p101, p110, p111) = (v[4], v[5], v[6], v[7]);
    let d1 = p000 * p000 * p111 * p111
        + p001 * p001 * p110 * p110
        + p010 * p010 * p101 * p101
        + p100 * p100 * p011 * p011;
    let d2 = p000 * p111 * p001 * p110
        + p000 * p111 * p010 * p101
        + p000 * p111 * p100 * p011
        + p001 * p110 * p010 * p101
        + p001 * p110 * p011 * p100
        + p100 * p011 * p010 * p101;
    let d3 = p000 * p011 * p101 * p110 + p111 * p100 * p010 * p001;
    Ok(d1 - 2.0 * d2 + 4.0 * d3)
}

/// Both sides of the SLOCC covariance relation: the measure of `L|ψ>`
/// normalized, and `E(ψ)/‖L|ψ>‖^{dp}`.
pub fn slocc_covariance_check(
    m: &PolynomialMeasure,
    l: &SloccOperator,
    psi: &PureState,
) -> Result<(f64, f64)> {
    let raw = l.apply_raw(psi.amplitudes())?;
    let norm = crate::quantum::vector_norm(&raw);
    let lhs = m.eval(&PureState::new(raw)?)?;
    let rhs = m.eval(psi)? / norm.powf(m.homogeneous_degree());
    Ok((lhs, rhs))
}
