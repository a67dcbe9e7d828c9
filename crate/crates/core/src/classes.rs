//! Instance families with a guaranteed nonnegativity ordering, plus a grid
//! falsifier and a brute-force ordering search for arbitrary additive
//! instances.
//!
//! An instance has the *some agent nonnegative* property when, at every
//! cut-set, some agent with a nonempty piece values it at least 0. That
//! property is what makes the happiest-agent labeling a Sperner labeling.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::rational::Rational;
use crate::simplex::{self, SimplexError};
use crate::valuation::{AdditiveInstance, CutSet, Permutation, PiecewiseConstantDensity, ValuationError, Valuations};

/// Default grid resolution for [`sann_falsify`].
pub const DEFAULT_FALSIFIER_RESOLUTION: u64 = 32;

/// Largest agent count accepted by [`find_sann_permutation`].
pub const MAX_SEARCH_AGENTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("agent {agent} has negative total value {total}")]
    NegativeTotal { agent: usize, total: String },
    #[error("agent {agent}: {reason}")]
    NotSplitCake { agent: usize, reason: String },
    #[error("ordering search supports at most {MAX_SEARCH_AGENTS} agents, got {0}")]
    TooManyAgents(usize),
    #[error("threshold ordering {order} is falsified at {witness}")]
    OrderingFalsified { order: Permutation, witness: CutSet },
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// A point where the cdf of `agent` falls below that of `agent + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderViolation {
    pub agent: usize,
    pub t: Rational,
}

fn breakpoint_union(inst: &AdditiveInstance) -> Vec<Rational> {
    inst.densities()
        .iter()
        .flat_map(|d| d.breakpoints().iter().cloned())
        .sorted()
        .dedup()
        .collect()
}

/// First breakpoint (smallest `t`, then smallest agent) at which
/// `F_i(t) < F_{i+1}(t)`. Cdfs are piecewise linear, so checking the union of
/// breakpoints decides the ordering on all of `[0, 1]`.
pub fn value_order_violation(inst: &AdditiveInstance) -> Option<OrderViolation> {
    let ds = inst.densities();
    breakpoint_union(inst).into_iter().find_map(|t| {
        let cdfs: Vec<Rational> = ds.iter().map(|d| d.cdf(&t).expect("t in [0, 1]")).collect();
        (0..ds.len().saturating_sub(1))
            .find(|&i| cdfs[i] < cdfs[i + 1])
            .map(|agent| OrderViolation { agent, t: t.clone() })
    })
}

pub fn is_value_ordered(inst: &AdditiveInstance) -> bool {
    value_order_violation(inst).is_none()
}

/// Whether every agent has the same density (almost everywhere).
pub fn is_identical(inst: &AdditiveInstance) -> bool {
    let ds = inst.densities();
    ds.iter().all(|d| d.same_function(&ds[0]))
}

/// The prefix invariant of value-ordered instances: for every `i`, agents
/// `1..=i` together hold at least `F_i` of the cake they cover.
pub fn prefix_bound_check(inst: &AdditiveInstance, x: &CutSet) -> Result<bool, ValuationError> {
    let values = inst.evaluate(x)?;
    let cuts = x.prefix_sums();
    let mut held = Rational::zero();
    for (i, v) in values.iter().enumerate() {
        held += v;
        if held < inst.density(i).cdf(&cuts[i + 1])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nonnegative window `[l, r]` of a split-cake density and the threshold
/// `theta`, the smallest zero of the cdf inside the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitProfile {
    pub l: Rational,
    pub r: Rational,
    pub theta: Rational,
}

impl SplitProfile {
    /// `F <= 0` up to `theta` and `F >= 0` from `theta` on, checked at every
    /// breakpoint and at `theta`.
    pub fn sign_property_holds(&self, d: &PiecewiseConstantDensity) -> bool {
        let cdf = |t: &Rational| d.cdf(t).expect("t in [0, 1]");
        cdf(&self.theta).is_zero()
            && d.breakpoints().iter().all(|t| {
                let f = cdf(t);
                if *t <= self.theta {
                    !f.is_positive()
                } else {
                    !f.is_negative()
                }
            })
    }
}

/// Splits `d` into a nonpositive prefix, a nonnegative window and a
/// nonpositive suffix. The window absorbs adjacent zero segments, so a
/// nonnegative density has window `[0, 1]` and threshold 0.
pub fn split_profile(d: &PiecewiseConstantDensity) -> Result<SplitProfile, ClassError> {
    split_profile_of(d, 0)
}

fn split_profile_of(d: &PiecewiseConstantDensity, agent: usize) -> Result<SplitProfile, ClassError> {
    if d.total().is_negative() {
        return Err(ClassError::NegativeTotal {
            agent,
            total: crate::rational::format_rational(d.total()),
        });
    }
    let vals = d.values();
    let bps = d.breakpoints();
    let (first, last) = match (
        vals.iter().position(|v| v.is_positive()),
        vals.iter().rposition(|v| v.is_positive()),
    ) {
        (Some(a), Some(b)) => (a, b),
        // no positive segment and a nonnegative total: the density vanishes
        _ => (0, vals.len() - 1),
    };
    if let Some(j) = (first..=last).find(|&j| vals[j].is_negative()) {
        return Err(ClassError::NotSplitCake {
            agent,
            reason: format!(
                "negative segment starting at {} between positive ones",
                crate::rational::format_rational(&bps[j])
            ),
        });
    }
    let mut a = first;
    while a > 0 && vals[a - 1].is_zero() {
        a -= 1;
    }
    let mut b = last;
    while b + 1 < vals.len() && vals[b + 1].is_zero() {
        b += 1;
    }
    let cum = d.cdf_knots();
    let theta = (a..=b)
        .find_map(|j| {
            if !cum[j].is_negative() {
                Some(bps[j].clone())
            } else if !cum[j + 1].is_negative() {
                Some(&bps[j] - &cum[j] / &vals[j])
            } else {
                None
            }
        })
        .expect("the cdf is nonnegative at the window's right end");
    Ok(SplitProfile {
        l: bps[a].clone(),
        r: bps[b + 1].clone(),
        theta,
    })
}

/// Whether segment values rise (weakly) to a peak and then fall (weakly).
pub fn is_single_peaked(d: &PiecewiseConstantDensity) -> bool {
    let vals = d.values();
    let peak = vals
        .iter()
        .tuple_windows()
        .position(|(a, b)| b < a)
        .unwrap_or(vals.len() - 1);
    vals[peak..].iter().tuple_windows().all(|(a, b)| b <= a)
}

/// First grid cut-set (in grid order) at which every agent holding a
/// nonempty piece has a negative value. A hit is an exact certificate that the
/// ordering violates the nonnegativity condition; a miss certifies nothing
/// beyond the grid.
pub fn sann_falsify<V: Valuations>(inst: &V, m: u64) -> Result<Option<CutSet>, ClassError> {
    let points: Vec<CutSet> = simplex::grid_vertices(inst.agents(), m)?
        .map(|p| p.to_cutset())
        .collect();
    let hit = points
        .par_iter()
        .map(|x| {
            inst.evaluate(x).map(|values| {
                let all_negative = x
                    .parts()
                    .iter()
                    .zip(&values)
                    .filter(|(len, _)| len.is_positive())
                    .all(|(_, v)| v.is_negative());
                all_negative.then(|| x.clone())
            })
        })
        .find_first(|r| !matches!(r, Ok(None)));
    match hit {
        None => Ok(None),
        Some(r) => Ok(r?),
    }
}

/// Threshold ordering for split-cake instances: agents sorted by `theta`,
/// ties kept in index order. The result is re-checked with [`sann_falsify`]
/// at the default resolution before it is returned.
pub fn sann_permutation_split_cake(inst: &AdditiveInstance) -> Result<Permutation, ClassError> {
    let thetas: Vec<Rational> = inst
        .densities()
        .iter()
        .enumerate()
        .map(|(i, d)| split_profile_of(d, i).map(|p| p.theta))
        .collect::<Result<_, _>>()?;
    let order: Vec<usize> = (0..thetas.len()).sorted_by(|&a, &b| thetas[a].cmp(&thetas[b])).collect();
    let pi = Permutation::new(order)?;
    if let Some(witness) = sann_falsify(&inst.permute(&pi)?, DEFAULT_FALSIFIER_RESOLUTION)? {
        return Err(ClassError::OrderingFalsified { order: pi, witness });
    }
    Ok(pi)
}

/// A falsified ordering with its witness cut-set and the values there.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderingWitness {
    pub order: Permutation,
    pub cutset: CutSet,
    pub values: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PermutationSearch {
    /// First ordering, lexicographically, without a grid violation.
    pub found: Option<Permutation>,
    /// One witness for every ordering rejected before `found` (all of them
    /// when nothing was found).
    pub rejected: Vec<OrderingWitness>,
    pub resolution: u64,
}

impl PermutationSearch {
    /// Every ordering was falsified on the grid, which proves that none of
    /// them has the nonnegativity property.
    pub fn proves_none(&self) -> bool {
        self.found.is_none()
    }
}

pub fn find_sann_permutation(inst: &AdditiveInstance, m: u64) -> Result<PermutationSearch, ClassError> {
    let n = inst.agents();
    if n > MAX_SEARCH_AGENTS {
        return Err(ClassError::TooManyAgents(n));
    }
    let perms: Vec<Permutation> = Permutation::lexicographic(n).collect();
    let outcomes: Vec<Option<OrderingWitness>> = perms
        .par_iter()
        .map(|pi| {
            let permuted = inst.permute(pi)?;
            Ok(match sann_falsify(&permuted, m)? {
                Some(x) => Some(OrderingWitness {
                    order: pi.clone(),
                    values: permuted.evaluate(&x)?,
                    cutset: x,
                }),
                None => None,
            })
        })
        .collect::<Result<_, ClassError>>()?;
    let mut rejected = Vec::new();
    for (pi, outcome) in perms.into_iter().zip(outcomes) {
        match outcome {
            Some(w) => rejected.push(w),
            None => {
                return Ok(PermutationSearch {
                    found: Some(pi),
                    rejected,
                    resolution: m,
                })
            }
        }
    }
    Ok(PermutationSearch {
        found: None,
        rejected,
        resolution: m,
    })
}

/// Family membership of one instance with the evidence behind each flag.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub value_ordered: bool,
    pub value_order_witness: Option<OrderViolation>,
    pub identical: bool,
    pub split_cake: bool,
    pub profiles: Vec<Result<SplitProfile, ClassError>>,
    pub single_peaked: bool,
    /// Per-agent unimodality.
    pub single_peaked_agents: Vec<bool>,
    /// Grid witness against the given order, if any.
    pub witness: Option<CutSet>,
    pub search: PermutationSearch,
}

pub fn class_report(inst: &AdditiveInstance, m: u64) -> Result<ClassReport, ClassError> {
    let value_order_witness = value_order_violation(inst);
    let profiles: Vec<Result<SplitProfile, ClassError>> = inst
        .densities()
        .iter()
        .enumerate()
        .map(|(i, d)| split_profile_of(d, i))
        .collect();
    let single_peaked_agents: Vec<bool> = inst.densities().iter().map(is_single_peaked).collect();
    Ok(ClassReport {
        value_ordered: value_order_witness.is_none(),
        value_order_witness,
        identical: is_identical(inst),
        split_cake: profiles.iter().all(Result::is_ok),
        profiles,
        single_peaked: single_peaked_agents.iter().all(|&b| b),
        single_peaked_agents,
        witness: sann_falsify(inst, m)?,
        search: find_sann_permutation(inst, m)?,
    })
}

/// Whether `d` has the full-cake value of at least 0 required by every family.
pub fn nonnegative_total(d: &PiecewiseConstantDensity) -> bool {
    !d.total().is_negative()
}

/// Zero density helper used by the family checks in tests.
#[cfg(test)]
fn zero_density() -> PiecewiseConstantDensity {
    PiecewiseConstantDensity::constant(Rational::zero())
}
