//! Two agents: bisection on the single cut.
//!
//! With the cut at `t` the pieces are `[0, t]` and `[t, 1]`, and
//! `h(t) = v_1 - v_2` runs from `-v_2(whole cake) <= 0` at `t = 0` to
//! `v_1(whole cake) >= 0` at `t = 1`. Bisection keeps `h(lo) <= 0 <= h(hi)`
//! on dyadic endpoints, so every cut position is exact.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};
use crate::valuation::{equity_gap, CutSet, Scalar, ValuationError, Valuations};

/// Hard limit on bisection steps, whatever the Lipschitz bound says.
pub const MAX_ITERATIONS: u32 = 200;

/// Extra steps on top of `ceil(log2(L / eps))`.
pub const ITERATION_GUARD: u32 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwoAgentError {
    #[error("bisection needs exactly 2 agents, got {0}")]
    WrongAgentCount(usize),
    #[error("eps must be positive, got {0}")]
    InvalidEps(f64),
    #[error("inconsistent instance: v_1 - v_2 is {h0} at t = 0 and {h1} at t = 1; whole-cake values must be nonnegative")]
    Inconsistent { h0: String, h1: String },
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoAgentStatus {
    Converged,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoAgentReport<S> {
    /// Position of the cut.
    pub t: Rational,
    pub cutset: CutSet,
    pub values: Vec<S>,
    pub gap: S,
    /// Number of midpoints evaluated.
    pub iterations: u32,
    pub iteration_limit: u32,
    /// Final bracket with `h(lo) <= 0 <= h(hi)`.
    pub bracket: (Rational, Rational),
    pub status: TwoAgentStatus,
}

fn cut_at(t: &Rational) -> CutSet {
    CutSet::new(vec![t.clone(), Rational::one() - t]).expect("t in [0, 1]")
}

/// Step budget `ceil(log2(lipschitz / eps)) + guard`, capped at [`MAX_ITERATIONS`].
pub fn iteration_limit(lipschitz: f64, eps: f64) -> u32 {
    let steps = (lipschitz / eps).log2().ceil();
    let steps = if steps.is_finite() { steps.max(0.0) as u32 } else { MAX_ITERATIONS };
    (steps + ITERATION_GUARD).min(MAX_ITERATIONS)
}

/// Lipschitz constant of `h` in the cut position: twice the per-agent bound
/// when the instance knows one (additive instances do), 1 otherwise.
pub fn default_lipschitz<V: Valuations>(inst: &V) -> f64 {
    inst.lipschitz_bound().map_or(1.0, |l| 2.0 * l)
}

/// Bisection with the instance's own Lipschitz bound; see [`solve_two_with`].
pub fn solve_two<V: Valuations>(
    inst: &V,
    eps: f64,
) -> Result<TwoAgentReport<V::Value>, TwoAgentError> {
    solve_two_with(inst, eps, default_lipschitz(inst))
}

/// Bisects until `|v_1 - v_2| <= eps` at a midpoint or the step budget for
/// `lipschitz` runs out. The bracket endpoints are checked first.
pub fn solve_two_with<V: Valuations>(
    inst: &V,
    eps: f64,
    lipschitz: f64,
) -> Result<TwoAgentReport<V::Value>, TwoAgentError> {
    if inst.agents() != 2 {
        return Err(TwoAgentError::WrongAgentCount(inst.agents()));
    }
    if !(eps > 0.0) {
        return Err(TwoAgentError::InvalidEps(eps));
    }
    let limit = iteration_limit(lipschitz.max(f64::MIN_POSITIVE), eps);
    let h = |t: &Rational| -> Result<(Vec<V::Value>, V::Value), ValuationError> {
        let values = inst.evaluate(&cut_at(t))?;
        let d = values[0].clone() - values[1].clone();
        Ok((values, d))
    };

    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    let (values_lo, h_lo) = h(&lo)?;
    let (values_hi, h_hi) = h(&hi)?;
    if h_lo.is_positive() || h_hi.is_negative() {
        return Err(TwoAgentError::Inconsistent {
            h0: h_lo.render(),
            h1: h_hi.render(),
        });
    }
    let report = |t: Rational, values: Vec<V::Value>, iterations, bracket, status| {
        let gap = equity_gap(&values).expect("two values");
        TwoAgentReport {
            cutset: cut_at(&t),
            t,
            values,
            gap,
            iterations,
            iteration_limit: limit,
            bracket,
            status,
        }
    };
    for (t, values, d) in [(&lo, values_lo, h_lo), (&hi, values_hi, h_hi)] {
        if d.abs().at_most(eps) {
            return Ok(report(
                t.clone(),
                values,
                0,
                (lo.clone(), hi.clone()),
                TwoAgentStatus::Converged,
            ));
        }
    }

    let half = rational::ratio(1, 2);
    let mut best: Option<(Rational, Vec<V::Value>, V::Value)> = None;
    for iteration in 1..=limit {
        let mid = (&lo + &hi) * &half;
        let (values, d) = h(&mid)?;
        if d.abs().at_most(eps) {
            return Ok(report(mid, values, iteration, (lo, hi), TwoAgentStatus::Converged));
        }
        if best.as_ref().is_none_or(|(_, _, b)| d.abs() < b.abs()) {
            best = Some((mid.clone(), values, d.clone()));
        }
        if d.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (t, values, _) = best.expect("at least one iteration");
    Ok(report(t, values, limit, (lo, hi), TwoAgentStatus::BudgetExhausted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::{int, ratio};
    use crate::valuation::{AdditiveInstance, GlobalInstance, PiecewiseConstantDensity, ValuationFn};
    use std::sync::Arc;

    fn two(a: PiecewiseConstantDensity, b: PiecewiseConstantDensity) -> AdditiveInstance {
        AdditiveInstance::new(vec![a, b]).unwrap()
    }

    fn halves(left: i64, right: i64) -> PiecewiseConstantDensity {
        PiecewiseConstantDensity::new(vec![int(0), ratio(1, 2), int(1)], vec![int(left), int(right)])
            .unwrap()
    }

    #[test]
    fn symmetric_lengths() {
        let inst = two(
            PiecewiseConstantDensity::constant(int(1)),
            PiecewiseConstantDensity::constant(int(1)),
        );
        let r = solve_two(&inst, 1e-9).unwrap();
        assert_eq!(r.t, ratio(1, 2));
        assert_eq!(r.values, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(r.status, TwoAgentStatus::Converged);
    }

    #[test]
    fn signed_left_agent() {
        let inst = two(halves(-1, 3), PiecewiseConstantDensity::constant(int(1)));
        let r = solve_two(&inst, 1e-9).unwrap();
        assert!(r.gap.at_most(1e-9));
        // -1/2 + 3 (t - 1/2) = 1 - t has its only root at t = 3/4
        assert_eq!(r.t, ratio(3, 4));
        assert_eq!(r.values, vec![ratio(1, 4), ratio(1, 4)]);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn disjoint_supports_meet_in_the_middle() {
        let inst = two(halves(2, 0), halves(0, 2));
        let r = solve_two(&inst, 1e-9).unwrap();
        assert_eq!(r.t, ratio(1, 2));
        assert_eq!(r.values, vec![int(1), int(1)]);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn bracket_and_budget() {
        // root at 2/3, never a dyadic midpoint
        let inst = two(
            PiecewiseConstantDensity::constant(int(1)),
            PiecewiseConstantDensity::constant(int(2)),
        );
        let r = solve_two(&inst, 1e-9).unwrap();
        let (lo, hi) = &r.bracket;
        let h = |t: &Rational| {
            let v = inst.evaluate(&cut_at(t)).unwrap();
            &v[0] - &v[1]
        };
        assert!(!h(lo).is_positive() && !h(hi).is_negative());
        assert_eq!(hi - lo, ratio(1, 1 << (r.iterations - 1)));
        assert!(r.iterations <= iteration_limit(default_lipschitz(&inst), 1e-9));
        assert_eq!(iteration_limit(1.0, 1e-300), MAX_ITERATIONS);
        let starved = solve_two_with(&inst, 1e-12, 1e-12).unwrap();
        assert_eq!(starved.status, TwoAgentStatus::BudgetExhausted);
        assert_eq!(starved.iterations, ITERATION_GUARD);
    }

    #[test]
    fn preconditions() {
        let bad = two(
            PiecewiseConstantDensity::constant(int(1)),
            PiecewiseConstantDensity::constant(int(-1)),
        );
        assert!(matches!(solve_two(&bad, 1e-6), Err(TwoAgentError::Inconsistent { .. })));
        assert!(matches!(
            solve_two(&catalog::happiness(), 1e-6),
            Err(TwoAgentError::WrongAgentCount(3))
        ));
        let ok = two(halves(1, 1), halves(1, 1));
        assert!(matches!(solve_two(&ok, 0.0), Err(TwoAgentError::InvalidEps(_))));
    }

    #[test]
    fn float_mode() {
        let vals: Vec<ValuationFn> = vec![
            Arc::new(|x: &[f64]| x[0] * x[0]),
            Arc::new(|x: &[f64]| 2.0 * x[1]),
        ];
        let inst = GlobalInstance::new(vals).unwrap().with_lipschitz(2.0);
        let r = solve_two(&inst, 1e-10).unwrap();
        assert_eq!(r.status, TwoAgentStatus::Converged);
        let t = rational::to_f64(&r.t);
        assert!((t - (3f64.sqrt() - 1.0)).abs() < 1e-9);
    }
}
