//! The nine four-qubit generating families and the root counts of the
//! three-tangle on their three-qubit marginals.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{RootOptions, RootProfile, RootStructure};
use crate::measures::PolynomialMeasure;
use crate::quantum::{spectral_decompose_rank2, DensityMatrix, PureState, SloccOperator, C64};
use crate::roof::{roof_one_root, roof_two_root};
use crate::sample::rng_for;

const PARAM_NAMES: [char; 4] = ['a', 'b', 'c', 'd'];

/// Number of complex parameters of each family.
pub fn family_arity(family: u8) -> Result<usize> {
    match family {
        1 => Ok(4),
        2 => Ok(3),
        3 | 4 => Ok(2),
        5 | 6 => Ok(1),
        7..=9 => Ok(0),
        other => Err(Error::Family(format!("family {other} is not in 1..=9"))),
    }
}

/// `params[target] = sign · params[anchor]`, or `params[target] = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    Equal {
        target: usize,
        anchor: usize,
        sign: f64,
    },
    Zero(usize),
}

impl Constraint {
    fn holds(&self, p: &[C64]) -> bool {
        match *self {
            Constraint::Equal {
                target,
                anchor,
                sign,
            } => p[target] == p[anchor] * sign,
            Constraint::Zero(i) => p[i] == C64::new(0.0, 0.0),
        }
    }
}

fn param_index(c: char, arity: usize) -> Result<usize> {
    PARAM_NAMES
        .iter()
        .position(|&n| n == c)
        .filter(|&i| i < arity)
        .ok_or_else(|| Error::Family(format!("parameter `{c}` not available for arity {arity}")))
}

/// Expands a subclass tag such as `a=±b=±c`, `c=0` or `a=b=0` into its
/// sign variants, each a `(label, constraints)` pair. `generic` gives one
/// unconstrained variant.
pub fn expand_subclass(tag: &str, arity: usize) -> Result<Vec<(String, Vec<Constraint>)>> {
    if tag == "generic" {
        return Ok(vec![("generic".into(), Vec::new())]);
    }
    let parts: Vec<&str> = tag.split('=').collect();
    if parts.len() < 2 {
        return Err(Error::Family(format!("malformed subclass `{tag}`")));
    }
    let mut first = parts[0].chars();
    let anchor = match (first.next(), first.next()) {
        (Some(c), None) => param_index(c, arity)?,
        _ => return Err(Error::Family(format!("malformed subclass `{tag}`"))),
    };
    // Each term: (param, allowed signs), or zero.
    let mut vars: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut zero = false;
    for part in &parts[1..] {
        if *part == "0" {
            zero = true;
            continue;
        }
        let mut chars = part.chars().peekable();
        let signs = match chars.peek() {
            Some('±') => {
                chars.next();
                vec![1.0, -1.0]
            }
            Some('+') => {
                chars.next();
                vec![1.0]
            }
            Some('-') | Some('−') => {
                chars.next();
                vec![-1.0]
            }
            _ => vec![1.0],
        };
        let rest: String = chars.collect();
        let mut rc = rest.chars();
        match (rc.next(), rc.next()) {
            (Some(c), None) => vars.push((param_index(c, arity)?, signs)),
            _ => return Err(Error::Family(format!("malformed subclass `{tag}`"))),
        }
    }
    let mut variants: Vec<(String, Vec<Constraint>)> =
        vec![(PARAM_NAMES[anchor].to_string(), Vec::new())];
    for (target, signs) in &vars {
        let mut next = Vec::new();
        for (label, cons) in &variants {
            for &sign in signs {
                let mut cons = cons.clone();
                cons.push(Constraint::Equal {
                    target: *target,
                    anchor,
                    sign,
                });
                let s = if sign > 0.0 { '+' } else { '-' };
                next.push((format!("{label}={s}{}", PARAM_NAMES[*target]), cons));
            }
        }
        variants = next;
    }
    if zero {
        for (label, cons) in &mut variants {
            cons.push(Constraint::Zero(anchor));
            for (t, _) in &vars {
                cons.push(Constraint::Zero(*t));
            }
            label.push_str("=0");
        }
    }
    Ok(variants)
}

/// A member of one generating family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: u8,
    pub params: Vec<C64>,
    pub subclass: String,
    pub constraints: Vec<Constraint>,
}

impl FamilySpec {
    pub fn new(family: u8, params: Vec<C64>) -> Result<Self> {
        let arity = family_arity(family)?;
        if params.len() != arity {
            return Err(Error::Family(format!(
                "family {family} takes {arity} parameters, got {}",
                params.len()
            )));
        }
        Ok(Self {
            family,
            params,
            subclass: "generic".into(),
            constraints: Vec::new(),
        })
    }

    /// Random parameters satisfying `constraints`: free parameters have
    /// nonnegative real part and modulus in `[0.2, 2]`, and unconstrained
    /// pairs keep `|p_i ± p_j| ≥ 0.05`.
    pub fn random<R: Rng + ?Sized>(
        family: u8,
        subclass: &str,
        constraints: &[Constraint],
        rng: &mut R,
    ) -> Result<Self> {
        let arity = family_arity(family)?;
        let dependent: Vec<usize> = constraints
            .iter()
            .map(|c| match *c {
                Constraint::Equal { target, .. } => target,
                Constraint::Zero(i) => i,
            })
            .collect();
        let linked = |i: usize, j: usize| {
            constraints.iter().any(|c| match *c {
                Constraint::Equal { target, anchor, .. } => {
                    (target == i && anchor == j) || (target == j && anchor == i)
                }
                Constraint::Zero(k) => k == i || k == j,
            }) || (dependent.contains(&i) && dependent.contains(&j))
        };
        for _ in 0..10_000 {
            let mut p: Vec<C64> = (0..arity)
                .map(|_| {
                    let r = rng.random_range(0.2..2.0);
                    let theta =
                        rng.random_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2);
                    C64::from_polar(r, theta)
                })
                .collect();
            for c in constraints {
                if let Constraint::Equal {
                    target,
                    anchor,
                    sign,
                } = *c
                {
                    p[target] = p[anchor] * sign;
                }
            }
            for c in constraints {
                if let Constraint::Zero(i) = *c {
                    p[i] = C64::new(0.0, 0.0);
                }
            }
            let clear = (0..arity).all(|i| {
                (i + 1..arity).all(|j| {
                    linked(i, j) || ((p[i] - p[j]).norm() >= 0.05 && (p[i] + p[j]).norm() >= 0.05)
                })
            });
            if clear {
                return Ok(Self {
                    family,
                    params: p,
                    subclass: subclass.to_string(),
                    constraints: constraints.to_vec(),
                });
            }
        }
        Err(Error::Family(
            "could not draw parameters away from coincidences".into(),
        ))
    }

    pub fn constraints_hold(&self) -> bool {
        self.constraints.iter().all(|c| c.holds(&self.params))
    }
}

fn add(amps: &mut [C64], bits: &str, c: C64) {
    amps[usize::from_str_radix(bits, 2).expect("binary label")] += c;
}

/// Normalized generating state of the family.
pub fn generating_state(spec: &FamilySpec) -> Result<PureState> {
    let arity = family_arity(spec.family)?;
    if spec.params.len() != arity {
        return Err(Error::Family(format!(
            "family {} takes {arity} parameters, got {}",
            spec.family,
            spec.params.len()
        )));
    }
    let p = |i: usize| spec.params[i];
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut v = vec![C64::new(0.0, 0.0); 16];
    let pair = |v: &mut Vec<C64>, x: &str, y: &str, c: C64| {
        add(v, x, c);
        add(v, y, c);
    };
    match spec.family {
        1 => {
            let (a, b, c, d) = (p(0), p(1), p(2), p(3));
            pair(&mut v, "0000", "1111", (a + d) / 2.0);
            pair(&mut v, "0011", "1100", (a - d) / 2.0);
            pair(&mut v, "0101", "1010", (b + c) / 2.0);
            pair(&mut v, "0110", "1001", (b - c) / 2.0);
        }
        2 => {
            let (a, b, c) = (p(0), p(1), p(2));
            pair(&mut v, "0000", "1111", (a + b) / 2.0);
            pair(&mut v, "0011", "1100", (a - b) / 2.0);
            pair(&mut v, "0101", "1010", c);
            add(&mut v, "0110", one);
        }
        3 => {
            let (a, b) = (p(0), p(1));
            pair(&mut v, "0000", "1111", a);
            pair(&mut v, "0101", "1010", b);
            add(&mut v, "0110", one);
            add(&mut v, "0011", one);
        }
        4 => {
            let (a, b) = (p(0), p(1));
            let s = i / 2f64.sqrt();
            pair(&mut v, "0000", "1111", a);
            pair(&mut v, "0101", "1010", (a + b) / 2.0);
            pair(&mut v, "0110", "1001", (a - b) / 2.0);
            pair(&mut v, "0001", "0010", -s);
            pair(&mut v, "0111", "1011", s);
        }
        5 => {
            let a = p(0);
            pair(&mut v, "0000", "0101", a);
            pair(&mut v, "1010", "1111", a);
            add(&mut v, "0001", i);
            add(&mut v, "0110", one);
            add(&mut v, "1011", -i);
        }
        6 => {
            let a = p(0);
            pair(&mut v, "0000", "1111", a);
            add(&mut v, "0011", one);
            add(&mut v, "0101", one);
            add(&mut v, "0110", one);
        }
        7 => {
            for k in ["0000", "0101", "1000", "1110"] {
                add(&mut v, k, one);
            }
        }
        8 => {
            for k in ["0000", "1011", "1101", "1110"] {
                add(&mut v, k, one);
            }
        }
        9 => {
            add(&mut v, "0000", one);
            add(&mut v, "0111", one);
        }
        _ => unreachable!("arity check rejects other families"),
    }
    PureState::new(v)
}

/// Root structure of the three-tangle on one marginal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarginalClass {
    Pure,
    Roots(usize),
    /// Two roots with unequal multiplicities.
    TwoStar,
    /// The tangle vanishes on the whole range.
    IdenticallyZero,
    Failed(String),
}

impl fmt::Display for MarginalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pure => f.write_str("pure"),
            Self::Roots(n) => write!(f, "{n}"),
            Self::TwoStar => f.write_str("2*"),
            Self::IdenticallyZero => f.write_str("≡0"),
            Self::Failed(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl Serialize for MarginalClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl MarginalClass {
    fn from_structure(s: RootStructure) -> Self {
        match s {
            RootStructure::IdenticallyZero => Self::IdenticallyZero,
            RootStructure::OneRoot => Self::Roots(1),
            RootStructure::TwoRootEqualMult => Self::Roots(2),
            RootStructure::TwoRootUnequalMult => Self::TwoStar,
            RootStructure::ThreeRoot => Self::Roots(3),
            RootStructure::FourRoot => Self::Roots(4),
            RootStructure::ManyRoot => Self::Failed("more than four roots".into()),
        }
    }
}

/// Marginal after tracing out qubit `k` (1-based).
pub fn marginal(spec: &FamilySpec, traced_qubit: usize) -> Result<DensityMatrix> {
    generating_state(spec)?
        .projector()
        .partial_trace(traced_qubit)
}

pub fn classify_density(rho: &DensityMatrix, opts: &RootOptions) -> MarginalClass {
    match rho.numerical_rank() {
        1 => MarginalClass::Pure,
        2 => {
            let profile = spectral_decompose_rank2(rho)
                .and_then(|basis| RootProfile::compute(&PolynomialMeasure::tangle(), &basis, opts));
            match profile {
                Ok(p) => MarginalClass::from_structure(p.structure),
                Err(e) => MarginalClass::Failed(e.to_string()),
            }
        }
        r => MarginalClass::Failed(format!("marginal has rank {r}")),
    }
}

pub fn classify_marginal(
    spec: &FamilySpec,
    traced_qubit: usize,
    opts: &RootOptions,
) -> MarginalClass {
    match marginal(spec, traced_qubit) {
        Ok(rho) => classify_density(&rho, opts),
        Err(e) => MarginalClass::Failed(e.to_string()),
    }
}

/// Table entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Roots(usize),
    TwoStar,
    Pure,
}

impl Expected {
    /// A marginal whose tangle vanishes identically has every state of the
    /// range as a root; the table lists such cells as 4.
    pub fn accepts(&self, c: &MarginalClass) -> bool {
        match (self, c) {
            (Expected::Roots(4), MarginalClass::IdenticallyZero) => true,
            (Expected::Roots(n), MarginalClass::Roots(m)) => n == m,
            (Expected::TwoStar, MarginalClass::TwoStar) => true,
            (Expected::Pure, MarginalClass::Pure) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Roots(n) => write!(f, "{n}"),
            Expected::TwoStar => f.write_str("2*"),
            Expected::Pure => f.write_str("pure"),
        }
    }
}

impl Serialize for Expected {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One row of the embedded classification table.
#[derive(Debug, Clone)]
pub struct FixtureRow {
    pub family: u8,
    pub subclass: &'static str,
    pub expected: [Expected; 4],
}

/// Root counts of the three-tangle for the marginals `Tr_k`, `k = 1..4`.
pub fn fixture() -> Vec<FixtureRow> {
    use Expected::{Pure as P, Roots as R, TwoStar as S};
    let all = |e: Expected| [e; 4];
    let row = |family, subclass, expected| FixtureRow {
        family,
        subclass,
        expected,
    };
    vec![
        row(1, "generic", all(R(4))),
        row(1, "a=±b", all(R(2))),
        row(1, "a=±c", all(R(2))),
        row(1, "a=±d", all(R(2))),
        row(1, "b=±c", all(R(2))),
        row(1, "b=±d", all(R(2))),
        row(1, "c=±d", all(R(2))),
        row(1, "a=±b=±c", all(R(4))),
        row(1, "a=±b=±d", all(R(4))),
        row(1, "a=±c=±d", all(R(4))),
        row(1, "b=±c=±d", all(R(4))),
        row(2, "generic", all(R(3))),
        row(2, "a=±b", all(R(2))),
        row(2, "c=0", all(R(2))),
        row(2, "a=±c", all(R(1))),
        row(2, "b=±c", all(R(1))),
        row(2, "a=±b=±c", all(R(4))),
        row(2, "a=c=0", all(R(4))),
        row(2, "a=b=c=0", all(P)),
        row(3, "generic", [R(3), R(2), R(3), R(2)]),
        row(3, "a=±b", [R(1), R(4), R(1), R(4)]),
        row(3, "a=0", all(R(2))),
        row(3, "b=0", all(R(2))),
        row(3, "a=b=0", [P, R(4), P, R(4)]),
        row(4, "generic", all(S)),
        row(4, "a=±b", all(R(1))),
        row(4, "a=0", all(R(1))),
        row(4, "b=0", all(R(1))),
        row(4, "a=b=0", all(R(4))),
        row(5, "generic", [S, R(1), S, R(1)]),
        row(5, "a=0", [R(1), R(4), R(1), R(4)]),
        row(6, "generic", [R(3), R(2), R(2), R(2)]),
        row(6, "a=0", [P, R(4), R(4), R(4)]),
        row(7, "generic", [R(4), R(1), R(1), R(1)]),
        row(8, "generic", [S, R(1), R(1), R(1)]),
        row(9, "generic", [P, R(4), R(4), R(4)]),
    ]
}

/// Outcome for one sign variant of one table row.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationRow {
    pub family: u8,
    pub subclass: String,
    pub variant: String,
    pub expected: [Expected; 4],
    /// Modal class over the samples, per traced qubit.
    pub observed: [MarginalClass; 4],
    /// Samples that disagreed with the mode, per traced qubit.
    pub dissent: [usize; 4],
    pub matches: [bool; 4],
}

impl ClassificationRow {
    pub fn passed(&self) -> bool {
        self.matches.iter().all(|&m| m)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub samples_per_cell: usize,
    pub seed: u64,
    pub rows: Vec<ClassificationRow>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ClassificationRow::passed)
    }

    pub fn mismatches(&self) -> Vec<&ClassificationRow> {
        self.rows.iter().filter(|r| !r.passed()).collect()
    }
}

fn modal(votes: &[MarginalClass]) -> (MarginalClass, usize) {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (i, v) in votes.iter().enumerate() {
        counts.entry(v.to_string()).or_insert((0, i)).0 += 1;
    }
    let (_, &(count, first)) = counts
        .iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .expect("at least one vote");
    (votes[first].clone(), votes.len() - count)
}

/// Classifies every fixture cell from random draws and compares the modal
/// result with the fixture.
pub fn reproduce_table(
    samples_per_cell: usize,
    seed: u64,
    opts: &RootOptions,
) -> Result<TableReport> {
    if samples_per_cell == 0 {
        return Err(Error::Domain("samples_per_cell must be at least 1".into()));
    }
    let mut jobs = Vec::new();
    for row in fixture() {
        let arity = family_arity(row.family)?;
        for (variant, constraints) in expand_subclass(row.subclass, arity)? {
            jobs.push((row.clone(), variant, constraints));
        }
    }
    let rows = jobs
        .into_par_iter()
        .enumerate()
        .map(|(idx, (row, variant, constraints))| {
            let mut rng = rng_for(seed, idx as u64);
            let mut votes: [Vec<MarginalClass>; 4] = Default::default();
            for _ in 0..samples_per_cell {
                let spec = FamilySpec::random(row.family, row.subclass, &constraints, &mut rng)?;
                for (k, bucket) in votes.iter_mut().enumerate() {
                    bucket.push(classify_marginal(&spec, k + 1, opts));
                }
            }
            let mut observed: [MarginalClass; 4] = Default::default();
            let mut dissent = [0usize; 4];
            let mut matches = [false; 4];
            for k in 0..4 {
                let (mode, off) = modal(&votes[k]);
                if off > 0 {
                    log::info!(
                        "G{} {variant} k={}: {off} of {samples_per_cell} samples differ from the mode {mode}",
                        row.family,
                        k + 1
                    );
                }
                matches[k] = row.expected[k].accepts(&mode);
                observed[k] = mode;
                dissent[k] = off;
            }
            Ok(ClassificationRow {
                family: row.family,
                subclass: row.subclass.to_string(),
                variant,
                expected: row.expected,
                observed,
                dissent,
                matches,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TableReport {
        samples_per_cell,
        seed,
        rows,
    })
}

impl Default for MarginalClass {
    fn default() -> Self {
        MarginalClass::Failed("unset".into())
    }
}

/// Table in the family × subclass layout, followed by the cells that
/// differ from the fixture and a PASS/FAIL footer.
pub fn render_markdown(report: &TableReport) -> String {
    let mut out = String::new();
    out.push_str("| family | subclass | k=1 | k=2 | k=3 | k=4 |\n|---|---|---|---|---|---|\n");
    for r in &report.rows {
        let cells: Vec<String> = r.observed.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!(
            "| G{} | {} | {} |\n",
            r.family,
            r.variant,
            cells.join(" | ")
        ));
    }
    let bad = report.mismatches();
    out.push_str("\n## Differences from the fixture\n\n");
    if bad.is_empty() {
        out.push_str("none\n");
    }
    for r in &bad {
        for k in 0..4 {
            if !r.matches[k] {
                out.push_str(&format!(
                    "- G{} {} k={}: expected {}, observed {}\n",
                    r.family,
                    r.variant,
                    k + 1,
                    r.expected[k],
                    r.observed[k]
                ));
            }
        }
    }
    out.push_str(if bad.is_empty() {
        "\nPASS\n"
    } else {
        "\nFAIL\n"
    });
    out
}

/// Closed-form `√τ` of a one- or two-root state.
pub fn closed_form_sqrt_tangle(rho: &DensityMatrix, opts: &RootOptions) -> Result<f64> {
    let m = PolynomialMeasure::sqrt_tangle();
    let basis = spectral_decompose_rank2(rho)?;
    let profile = RootProfile::compute(&m, &basis, opts)?;
    match profile.structure {
        RootStructure::OneRoot => Ok(roof_one_root(&profile, &m, rho)?.value),
        RootStructure::TwoRootEqualMult => Ok(roof_two_root(&profile, &m, rho)?.value),
        other => Err(Error::Structure {
            found: other.to_string(),
            operation: "closed-form square-root tangle",
        }),
    }
}

/// Both sides of `√τ(LρL†/t) = √τ(ρ)/t` with `t = Tr(LρL†)`, for the
/// marginal `Tr_k` of `spec` and a three-qubit SLOCC operator `L`.
pub fn slocc_scaling_check(
    spec: &FamilySpec,
    l: &SloccOperator,
    traced_qubit: usize,
) -> Result<(f64, f64)> {
    let rho = marginal(spec, traced_qubit)?;
    slocc_scaling_for_density(&rho, l)
}

pub fn slocc_scaling_for_density(rho: &DensityMatrix, l: &SloccOperator) -> Result<(f64, f64)> {
    let opts = RootOptions::default();
    let before = closed_form_sqrt_tangle(rho, &opts)?;
    let (transformed, trace) = l.apply_density(rho)?;
    let lhs = closed_form_sqrt_tangle(&transformed, &opts)?;
    Ok((lhs, before / trace))
}
