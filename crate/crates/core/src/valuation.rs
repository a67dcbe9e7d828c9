//! Instances, valuations and cut-sets.
//!
//! A cut-set is a point of the standard simplex whose `i`-th coordinate is the
//! length of the `i`-th piece, counted left to right. Two instance flavours
//! implement [`Valuations`]:
//!
//! * [`AdditiveInstance`]: every agent has a piecewise-constant density with
//!   rational breakpoints; values are exact [`Rational`]s.
//! * [`GlobalInstance`]: every agent is a continuous black box over the whole
//!   cut-set, evaluated in `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValuationError {
    #[error("no agents")]
    NoAgents,
    #[error("point {0} lies outside the cake [0, 1]")]
    OutOfDomain(String),
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(String, String),
    #[error("invalid cut-set: {0}")]
    InvalidCutSet(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("equity gap of an empty value vector")]
    EmptyValues,
    #[error("agent {agent} has value {value:e} on an empty piece")]
    NonZeroOnEmptyPiece { agent: usize, value: f64 },
    #[error("agent {agent} returned a non-finite value")]
    NonFinite { agent: usize },
}

/// Value type produced by a [`Valuations`] implementation.
pub trait Scalar:
    Clone + PartialOrd + Signed + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn to_f64(&self) -> f64;
    fn to_rational(&self) -> Option<Rational>;
    /// `self <= eps`, compared exactly where the representation allows it.
    fn at_most(&self, eps: f64) -> bool;
    /// Pivot test used by the small linear solves.
    fn negligible(&self) -> bool;
    fn render(&self) -> String;
}

impl Scalar for Rational {
    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn at_most(&self, eps: f64) -> bool {
        match Rational::from_float(eps) {
            Some(e) => *self <= e,
            None => eps.is_sign_positive(),
        }
    }
    fn negligible(&self) -> bool {
        self.is_zero()
    }
    fn render(&self) -> String {
        rational::format_rational(self)
    }
}

impl Scalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }
    fn at_most(&self, eps: f64) -> bool {
        *self <= eps
    }
    fn negligible(&self) -> bool {
        self.abs() < 1e-13
    }
    fn render(&self) -> String {
        format!("{self:e}")
    }
}

/// Lengths of the `n` connected pieces, left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CutSet(Vec<Rational>);

impl CutSet {
    pub fn new(parts: Vec<Rational>) -> Result<Self, ValuationError> {
        if parts.is_empty() {
            return Err(ValuationError::NoAgents);
        }
        if let Some(p) = parts.iter().find(|p| p.is_negative()) {
            return Err(ValuationError::InvalidCutSet(format!(
                "negative piece length {}",
                rational::format_rational(p)
            )));
        }
        let total: Rational = parts.iter().sum();
        if !total.is_one() {
            return Err(ValuationError::InvalidCutSet(format!(
                "piece lengths sum to {}",
                rational::format_rational(&total)
            )));
        }
        Ok(CutSet(parts))
    }

    /// The grid point `k / m`. The caller guarantees `sum(k) == m`.
    pub fn from_grid(k: &[u64], m: u64) -> Self {
        debug_assert_eq!(k.iter().sum::<u64>(), m);
        let m = Rational::from_integer(m.into());
        CutSet(
            k.iter()
                .map(|&ki| Rational::from_integer(ki.into()) / &m)
                .collect(),
        )
    }

    /// The whole cake to agent `i` (0-based).
    pub fn corner(n: usize, i: usize) -> Self {
        CutSet(
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parts(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<Rational> {
        self.0
    }

    /// `0, x_1, x_1 + x_2, ..., 1`; length `n + 1`.
    pub fn prefix_sums(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        let mut acc = Rational::zero();
        out.push(acc.clone());
        for p in &self.0 {
            acc += p;
            out.push(acc.clone());
        }
        out
    }

    /// Cut-set from interior cut positions `s_1 <= ... <= s_{n-1}`.
    pub fn from_cuts(cuts: &[Rational]) -> Result<Self, ValuationError> {
        let mut parts = Vec::with_capacity(cuts.len() + 1);
        let mut prev = Rational::zero();
        for c in cuts {
            parts.push(c - &prev);
            prev = c.clone();
        }
        parts.push(Rational::one() - prev);
        CutSet::new(parts)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational::to_f64).collect()
    }

    /// The interval allocated to each agent.
    pub fn allocation(&self) -> Vec<Interval> {
        self.prefix_sums()
            .into_iter()
            .tuple_windows()
            .map(|(left, right)| Interval { left, right })
            .collect()
    }
}

impl fmt::Display for CutSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0.iter().map(rational::format_rational).join(", ")
        )
    }
}

/// A closed sub-interval `[left, right]` of the cake.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub left: Rational,
    pub right: Rational,
}

impl Interval {
    pub fn new(left: Rational, right: Rational) -> Result<Self, ValuationError> {
        if left.is_negative() || right > Rational::one() || left > right {
            return Err(ValuationError::InvalidInterval(
                rational::format_rational(&left),
                rational::format_rational(&right),
            ));
        }
        Ok(Interval { left, right })
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }
}

/// Step density on `[0, 1]`: `values[j]` holds on `(breakpoints[j], breakpoints[j + 1])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseConstantDensity {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
    // cdf at each breakpoint
    cumulative: Vec<Rational>,
}

impl PiecewiseConstantDensity {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self, ValuationError> {
        if breakpoints.len() < 2 {
            return Err(ValuationError::InvalidDensity(
                "at least two breakpoints are required".into(),
            ));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(ValuationError::InvalidDensity(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if let Some((a, b)) = breakpoints.iter().tuple_windows().find(|(a, b)| a >= b) {
            return Err(ValuationError::InvalidDensity(format!(
                "breakpoints not strictly increasing at {} >= {}",
                rational::format_rational(a),
                rational::format_rational(b)
            )));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(ValuationError::InvalidDensity(format!(
                "{} breakpoints need {} values, found {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        let mut cumulative = Vec::with_capacity(breakpoints.len());
        let mut acc = Rational::zero();
        cumulative.push(acc.clone());
        for ((a, b), v) in breakpoints.iter().tuple_windows().zip(&values) {
            acc += v * (b - a);
            cumulative.push(acc.clone());
        }
        Ok(PiecewiseConstantDensity {
            breakpoints,
            values,
            cumulative,
        })
    }

    pub fn constant(value: Rational) -> Self {
        Self::new(vec![Rational::zero(), Rational::one()], vec![value])
            .expect("constant density is well formed")
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn segments(&self) -> usize {
        self.values.len()
    }

    /// Index of the segment whose half-open span `[b_j, b_{j+1})` contains `t`;
    /// `t = 1` maps to the last segment.
    fn segment_of(&self, t: &Rational) -> usize {
        let idx = self.breakpoints.partition_point(|b| b <= t);
        idx.saturating_sub(1).min(self.values.len() - 1)
    }

    fn cdf_unchecked(&self, t: &Rational) -> Rational {
        let j = self.segment_of(t);
        &self.cumulative[j] + &self.values[j] * (t - &self.breakpoints[j])
    }

    /// Cumulative value `F(t)` of `[0, t]`.
    pub fn cdf(&self, t: &Rational) -> Result<Rational, ValuationError> {
        if t.is_negative() || *t > Rational::one() {
            return Err(ValuationError::OutOfDomain(rational::format_rational(t)));
        }
        Ok(self.cdf_unchecked(t))
    }

    pub fn piece_value(&self, iv: &Interval) -> Rational {
        self.cdf_unchecked(&iv.right) - self.cdf_unchecked(&iv.left)
    }

    pub fn total(&self) -> &Rational {
        self.cumulative.last().expect("nonempty")
    }

    /// `F` at every breakpoint, aligned with [`Self::breakpoints`].
    pub fn cdf_knots(&self) -> &[Rational] {
        &self.cumulative
    }

    /// Density value on the open span `(a, b)`, which must not straddle a breakpoint.
    pub fn value_on(&self, a: &Rational, b: &Rational) -> &Rational {
        let mid = (a + b) / Rational::from_integer(2.into());
        &self.values[self.segment_of(&mid)]
    }

    pub fn max_abs(&self) -> Rational {
        rational::max_abs(&self.values)
    }

    pub fn negated(&self) -> Self {
        self.map_values(|v| -v)
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        self.map_values(|v| v * factor)
    }

    fn map_values(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self::new(self.breakpoints.clone(), self.values.iter().map(f).collect())
            .expect("same breakpoints")
    }

    /// Pointwise `self + other` on the union of both breakpoint sets.
    pub fn plus(&self, other: &Self) -> Self {
        let knots: Vec<Rational> = self
            .breakpoints
            .iter()
            .merge(other.breakpoints.iter())
            .dedup()
            .cloned()
            .collect();
        let values = knots
            .iter()
            .tuple_windows()
            .map(|(a, b)| self.value_on(a, b) + other.value_on(a, b))
            .collect();
        Self::new(knots, values).expect("merged breakpoints stay valid")
    }

    /// Drops breakpoints between equal adjacent values.
    pub fn canonical(&self) -> Self {
        let mut knots = vec![self.breakpoints[0].clone()];
        let mut values: Vec<Rational> = Vec::new();
        for (j, v) in self.values.iter().enumerate() {
            if values.last() == Some(v) {
                *knots.last_mut().unwrap() = self.breakpoints[j + 1].clone();
            } else {
                values.push(v.clone());
                knots.push(self.breakpoints[j + 1].clone());
            }
        }
        Self::new(knots, values).expect("merging keeps validity")
    }

    /// Whether both densities agree almost everywhere.
    pub fn same_function(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Permutation of agents, stored 0-based. Applying `pi` to an instance yields
/// the instance whose agent `i` carries the valuation of input agent `pi[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self, ValuationError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &p in &image {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(ValuationError::InvalidPermutation(format!(
                    "{image:?} is not a bijection on 0..{n}"
                )));
            }
        }
        Ok(Permutation(image))
    }

    pub fn from_one_based(image: &[usize]) -> Result<Self, ValuationError> {
        if image.contains(&0) {
            return Err(ValuationError::InvalidPermutation(
                "one-based permutation contains 0".into(),
            ));
        }
        Self::new(image.iter().map(|p| p - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|p| p + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn lexicographic(n: usize) -> impl Iterator<Item = Permutation> {
        (0..n).permutations(n).map(Permutation)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_one_based().iter().join(","))
    }
}

/// A valuation profile over connected divisions.
pub trait Valuations: Send + Sync + Sized {
    type Value: Scalar;

    fn agents(&self) -> usize;

    /// Value of every agent at the cut-set `x`.
    fn evaluate(&self, x: &CutSet) -> Result<Vec<Self::Value>, ValuationError>;

    /// Every valuation multiplied by -1.
    fn negate(&self) -> Self;

    fn permute(&self, pi: &Permutation) -> Result<Self, ValuationError>;

    /// Lipschitz bound for a single agent's value in terms of one cut position.
    fn lipschitz_bound(&self) -> Option<f64> {
        None
    }

    /// Exactly equitable cut-sets whose interior cuts lie in the box
    /// `lo[i] <= s_i <= hi[i]`, where computable in closed form.
    fn equitable_points_near(&self, _lo: &[Rational], _hi: &[Rational]) -> Vec<CutSet> {
        Vec::new()
    }

    fn check_dimension(&self, x: &CutSet) -> Result<(), ValuationError> {
        if x.len() == self.agents() {
            Ok(())
        } else {
            Err(ValuationError::DimensionMismatch {
                expected: self.agents(),
                found: x.len(),
            })
        }
    }
}

/// `max - min` of a value vector; zero exactly when the values are equal.
pub fn equity_gap<S: Scalar>(values: &[S]) -> Result<S, ValuationError> {
    let first = values.first().ok_or(ValuationError::EmptyValues)?;
    let (mut lo, mut hi) = (first, first);
    for v in &values[1..] {
        if v.partial_cmp(lo) == Some(Ordering::Less) {
            lo = v;
        }
        if v.partial_cmp(hi) == Some(Ordering::Greater) {
            hi = v;
        }
    }
    Ok(hi.clone() - lo.clone())
}

/// Additive instance with piecewise-constant densities; exact arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveInstance {
    densities: Vec<PiecewiseConstantDensity>,
}

impl AdditiveInstance {
    pub fn new(densities: Vec<PiecewiseConstantDensity>) -> Result<Self, ValuationError> {
        if densities.is_empty() {
            return Err(ValuationError::NoAgents);
        }
        Ok(AdditiveInstance { densities })
    }

    pub fn densities(&self) -> &[PiecewiseConstantDensity] {
        &self.densities
    }

    pub fn density(&self, agent: usize) -> &PiecewiseConstantDensity {
        &self.densities[agent]
    }

    /// Largest absolute density value over all agents.
    pub fn max_abs_density(&self) -> Rational {
        self.densities
            .iter()
            .map(|d| d.max_abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Affine-piece solve for `v_1 = ... = v_n` over a box of cut positions.
    ///
    /// Each cut range is split at the breakpoints of the two agents meeting at
    /// that cut; on every sub-box all cdfs involved are affine, so equitability
    /// is a square linear system in the `n - 1` cut positions.
    fn affine_equitable_points(&self, lo: &[Rational], hi: &[Rational]) -> Vec<CutSet> {
        let n = self.densities.len();
        if n < 2 || lo.len() != n - 1 || hi.len() != n - 1 {
            return Vec::new();
        }
        // Sub-intervals of every cut range.
        let pieces: Vec<Vec<(Rational, Rational)>> = (0..n - 1)
            .map(|c| {
                let (a, b) = (&lo[c], &hi[c]);
                let mut knots: Vec<Rational> = self.densities[c]
                    .breakpoints()
                    .iter()
                    .chain(self.densities[c + 1].breakpoints())
                    .filter(|t| *t > a && *t < b)
                    .cloned()
                    .collect();
                knots.sort();
                knots.dedup();
                std::iter::once(a.clone())
                    .chain(knots)
                    .chain(std::iter::once(b.clone()))
                    .tuple_windows()
                    .collect()
            })
            .collect();
        if pieces.iter().any(|p| p.is_empty()) {
            return Vec::new();
        }

        let mut found = Vec::new();
        for combo in pieces.iter().map(|p| p.iter()).multi_cartesian_product() {
            // v_a = F_a(s_{a+1}) - F_a(s_a) with s_0 = 0 and s_n = 1 fixed; on the
            // chosen sub-box F_a(s) = F_a(p) + c (s - p), i.e. const + c * s.
            let affine = |agent: usize, cut: usize| -> (Rational, Rational) {
                let d = &self.densities[agent];
                if cut == 0 {
                    return (Rational::zero(), Rational::zero());
                }
                if cut == n {
                    return (d.total().clone(), Rational::zero());
                }
                let (a, b) = combo[cut - 1];
                let c = if a < b {
                    d.value_on(a, b).clone()
                } else {
                    Rational::zero()
                };
                (d.cdf_unchecked(a) - &c * a, c)
            };
            // Row r encodes v_r - v_{r+1} = 0 over unknowns s_1..s_{n-1}.
            let mut matrix = vec![vec![Rational::zero(); n - 1]; n - 1];
            let mut rhs = vec![Rational::zero(); n - 1];
            for r in 0..n - 1 {
                for (agent, sign) in [(r, 1i64), (r + 1, -1i64)] {
                    let sign = Rational::from_integer(sign.into());
                    let (k_hi, c_hi) = affine(agent, agent + 1);
                    let (k_lo, c_lo) = affine(agent, agent);
                    // sign * (k_hi + c_hi s_{agent+1} - k_lo - c_lo s_agent)
                    if agent + 1 < n {
                        matrix[r][agent] += &sign * c_hi;
                    }
                    if agent > 0 {
                        matrix[r][agent - 1] -= &sign * c_lo;
                    }
                    rhs[r] -= &sign * (k_hi - k_lo);
                }
            }
            let Some(cuts) = linalg::solve(matrix, rhs) else {
                continue;
            };
            let inside = cuts
                .iter()
                .zip(&combo)
                .all(|(s, (a, b))| s >= a && s <= b);
            if !inside {
                continue;
            }
            if let Ok(x) = CutSet::from_cuts(&cuts) {
                if !found.contains(&x) {
                    found.push(x);
                }
            }
        }
        found
    }
}

impl Valuations for AdditiveInstance {
    type Value = Rational;

    fn agents(&self) -> usize {
        self.densities.len()
    }

    fn evaluate(&self, x: &CutSet) -> Result<Vec<Rational>, ValuationError> {
        self.check_dimension(x)?;
        Ok(x.allocation()
            .iter()
            .zip(&self.densities)
            .map(|(iv, d)| d.piece_value(iv))
            .collect())
    }

    fn negate(&self) -> Self {
        AdditiveInstance {
            densities: self.densities.iter().map(|d| d.negated()).collect(),
        }
    }

    fn permute(&self, pi: &Permutation) -> Result<Self, ValuationError> {
        if pi.len() != self.agents() {
            return Err(ValuationError::InvalidPermutation(format!(
                "permutation of {} agents applied to {} agents",
                pi.len(),
                self.agents()
            )));
        }
        Ok(AdditiveInstance {
            densities: pi
                .as_slice()
                .iter()
                .map(|&p| self.densities[p].clone())
                .collect(),
        })
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        Some(rational::to_f64(&self.max_abs_density()))
    }

    fn equitable_points_near(&self, lo: &[Rational], hi: &[Rational]) -> Vec<CutSet> {
        self.affine_equitable_points(lo, hi)
    }
}

pub type ValuationFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Black-box continuous valuations over the whole cut-set, in `f64`.
#[derive(Clone)]
pub struct GlobalInstance {
    valuations: Vec<ValuationFn>,
    lipschitz: Option<f64>,
}

impl fmt::Debug for GlobalInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GlobalInstance")
            .field("agents", &self.valuations.len())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

/// Boundary samples per agent when validating a black-box instance.
pub const BOUNDARY_SAMPLES_PER_AGENT: usize = 100;
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

impl GlobalInstance {
    /// Validates `v_i(x) = 0` on the facet `x_i = 0` by sampling
    /// [`BOUNDARY_SAMPLES_PER_AGENT`] random facet points per agent.
    pub fn new(valuations: Vec<ValuationFn>) -> Result<Self, ValuationError> {
        let n = valuations.len();
        if n == 0 {
            return Err(ValuationError::NoAgents);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
        if n > 1 {
            for (agent, v) in valuations.iter().enumerate() {
                for _ in 0..BOUNDARY_SAMPLES_PER_AGENT {
                    let mut x: Vec<f64> = (0..n)
                        .map(|j| {
                            if j == agent {
                                0.0
                            } else {
                                -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()
                            }
                        })
                        .collect();
                    let total: f64 = x.iter().sum();
                    x.iter_mut().for_each(|xi| *xi /= total);
                    let value = v(&x);
                    if !value.is_finite() {
                        return Err(ValuationError::NonFinite { agent });
                    }
                    if value.abs() > BOUNDARY_TOLERANCE {
                        return Err(ValuationError::NonZeroOnEmptyPiece { agent, value });
                    }
                }
            }
        }
        Ok(GlobalInstance {
            valuations,
            lipschitz: None,
        })
    }

    /// Caller-supplied Lipschitz bound used by the two-agent bisection.
    pub fn with_lipschitz(mut self, bound: f64) -> Self {
        self.lipschitz = Some(bound);
        self
    }
}

impl Valuations for GlobalInstance {
    type Value = f64;

    fn agents(&self) -> usize {
        self.valuations.len()
    }

    fn evaluate(&self, x: &CutSet) -> Result<Vec<f64>, ValuationError> {
        self.check_dimension(x)?;
        let xf = x.to_f64();
        self.valuations
            .iter()
            .enumerate()
            .map(|(agent, v)| {
                if x.parts()[agent].is_zero() {
                    return Ok(0.0);
                }
                let value = v(&xf);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(ValuationError::NonFinite { agent })
                }
            })
            .collect()
    }

    fn negate(&self) -> Self {
        GlobalInstance {
            valuations: self
                .valuations
                .iter()
                .map(|v| {
                    let v = Arc::clone(v);
                    Arc::new(move |x: &[f64]| -v(x)) as ValuationFn
                })
                .collect(),
            lipschitz: self.lipschitz,
        }
    }

    fn permute(&self, pi: &Permutation) -> Result<Self, ValuationError> {
        if pi.len() != self.agents() {
            return Err(ValuationError::InvalidPermutation(format!(
                "permutation of {} agents applied to {} agents",
                pi.len(),
                self.agents()
            )));
        }
        // A global valuation sees the whole cut-set, so moving agent p to slot i
        // also moves its own coordinates: relabel x back into p's frame.
        let inverse = pi.inverse();
        let inverse = Arc::new(inverse.as_slice().to_vec());
        Ok(GlobalInstance {
            valuations: pi
                .as_slice()
                .iter()
                .map(|&p| {
                    let v = Arc::clone(&self.valuations[p]);
                    let inv = Arc::clone(&inverse);
                    Arc::new(move |x: &[f64]| {
                        let original: Vec<f64> = inv.iter().map(|&slot| x[slot]).collect();
                        v(&original)
                    }) as ValuationFn
                })
                .collect(),
            lipschitz: self.lipschitz,
        })
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz
    }
}
