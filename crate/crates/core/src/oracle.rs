//! Brute-force ground truth: direct equitability checks and exhaustive grid
//! search for the smallest equity gap. Uses only [`crate::valuation`], never
//! the triangulation code, so it can check the solver independently.

use rayon::prelude::*;
use thiserror::Error;

use crate::valuation::{equity_gap, CutSet, Scalar, ValuationError, Valuations};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid resolution must be at least 1")]
    InvalidResolution,
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification<S> {
    pub pass: bool,
    pub values: Vec<S>,
    pub gap: S,
}

/// Passes iff `max - min <= eps` over the values at `x`; `eps = 0` asks for
/// exact equality in rational mode.
pub fn verify_equitable<V: Valuations>(
    inst: &V,
    x: &CutSet,
    eps: f64,
) -> Result<Verification<V::Value>, ValuationError> {
    let values = inst.evaluate(x)?;
    let gap = equity_gap(&values)?;
    Ok(Verification {
        pass: gap.at_most(eps),
        values,
        gap,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridOptimum<S> {
    pub cutset: CutSet,
    pub values: Vec<S>,
    pub gap: S,
}

/// Advances `k` to the next composition of its sum in lexicographic order
/// with the first part fixed; false once exhausted.
fn next_tail(k: &mut [u64]) -> bool {
    let n = k.len();
    if n < 3 {
        return false;
    }
    // rightmost movable unit: the last nonzero part before the final slot
    let Some(j) = (1..n - 1).rev().find(|&j| k[j] < k[j..].iter().sum::<u64>()) else {
        return false;
    };
    // increase k[j] by one and put the remaining mass in the last slot
    let rest: u64 = k[j + 1..].iter().sum();
    k[j] += 1;
    for slot in &mut k[j + 1..] {
        *slot = 0;
    }
    k[n - 1] = rest - 1;
    true
}

fn better<S: Scalar>(a: &GridOptimum<S>, b: &GridOptimum<S>) -> bool {
    match a.gap.partial_cmp(&b.gap) {
        Some(std::cmp::Ordering::Less) => true,
        Some(std::cmp::Ordering::Equal) => a.cutset < b.cutset,
        _ => false,
    }
}

/// Smallest equity gap over all `C(m + n - 1, n - 1)` grid cut-sets with
/// denominator `m`; ties go to the lexicographically smallest cut-set.
pub fn min_gap_grid<V: Valuations>(
    inst: &V,
    m: u64,
) -> Result<GridOptimum<V::Value>, OracleError> {
    if m == 0 {
        return Err(OracleError::InvalidResolution);
    }
    let n = inst.agents();
    let scored = |k: &[u64]| -> Result<GridOptimum<V::Value>, ValuationError> {
        let cutset = CutSet::from_grid(k, m);
        let values = inst.evaluate(&cutset)?;
        let gap = equity_gap(&values)?;
        Ok(GridOptimum { cutset, values, gap })
    };
    if n == 1 {
        return Ok(scored(&[m])?);
    }
    let chunks: Vec<GridOptimum<V::Value>> = (0..=m)
        .into_par_iter()
        .map(|first| {
            let mut k = vec![0; n];
            k[0] = first;
            k[n - 1] = m - first;
            let mut best = scored(&k)?;
            while next_tail(&mut k) {
                let cand = scored(&k)?;
                if better(&cand, &best) {
                    best = cand;
                }
            }
            Ok(best)
        })
        .collect::<Result<_, ValuationError>>()?;
    Ok(chunks
        .into_iter()
        .reduce(|best, cand| if better(&cand, &best) { cand } else { best })
        .expect("m + 1 chunks"))
}

/// Number of cut-sets [`min_gap_grid`] visits, counted by its own enumeration.
pub fn grid_points_visited(n: usize, m: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    (0..=m)
        .map(|first| {
            let mut k = vec![0; n];
            k[0] = first;
            k[n - 1] = m - first;
            let mut count = 1;
            while next_tail(&mut k) {
                count += 1;
            }
            count
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::{int, ratio};
    use crate::valuation::{AdditiveInstance, Permutation, PiecewiseConstantDensity};

    fn cut(parts: &[(i64, i64)]) -> CutSet {
        CutSet::new(parts.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    #[test]
    fn verify_examples() {
        let ex3 = catalog::no_sann_ordering();
        let v = verify_equitable(&ex3, &cut(&[(48, 230), (45, 230), (137, 230)]), 0.0).unwrap();
        assert!(v.pass);
        assert_eq!(v.values, vec![ratio(45, 23); 3]);
        let v = verify_equitable(&catalog::happiness(), &cut(&[(1, 5), (2, 5), (2, 5)]), 0.0).unwrap();
        assert!(v.pass);
        assert_eq!(v.values, vec![ratio(1, 2); 3]);
        // the table row for the ordering (2, 3, 1)
        let reordered = ex3.permute(&Permutation::from_one_based(&[2, 3, 1]).unwrap()).unwrap();
        let v = verify_equitable(&reordered, &cut(&[(7, 10), (3, 10), (0, 1)]), 0.0).unwrap();
        assert!(!v.pass);
        assert_eq!(v.gap, int(1));
        assert_eq!(v.values, vec![int(-1), int(-1), int(0)]);
    }

    #[test]
    fn enumeration_counts() {
        // C(m + n - 1, n - 1)
        assert_eq!(grid_points_visited(3, 10), 66);
        assert_eq!(grid_points_visited(2, 2), 3);
        assert_eq!(grid_points_visited(4, 5), 56);
        assert_eq!(grid_points_visited(5, 3), 35);
        assert_eq!(grid_points_visited(1, 7), 1);
    }

    #[test]
    fn grid_minimum_examples() {
        let best = min_gap_grid(&catalog::happiness(), 5).unwrap();
        assert_eq!(best.gap, int(0));
        assert_eq!(best.cutset, cut(&[(1, 5), (2, 5), (2, 5)]));
        let best = min_gap_grid(&catalog::no_sann_ordering(), 230).unwrap();
        assert_eq!(best.gap, int(0));
        assert_eq!(best.cutset, cut(&[(48, 230), (45, 230), (137, 230)]));
        let single = AdditiveInstance::new(vec![PiecewiseConstantDensity::constant(int(3))]).unwrap();
        let best = min_gap_grid(&single, 4).unwrap();
        assert_eq!(best.gap, int(0));
        assert_eq!(best.cutset, CutSet::corner(1, 0));
        assert!(matches!(min_gap_grid(&single, 0), Err(OracleError::InvalidResolution)));
    }

    #[test]
    fn ties_prefer_the_smallest_cutset() {
        let zero = AdditiveInstance::new(vec![PiecewiseConstantDensity::constant(int(0)); 3]).unwrap();
        let best = min_gap_grid(&zero, 4).unwrap();
        assert_eq!(best.cutset, cut(&[(0, 1), (0, 1), (1, 1)]));
    }

    #[test]
    fn grid_minimum_never_increases_along_divisors() {
        let inst = catalog::happiness();
        let mut last = None;
        for m in [3u64, 6, 12, 24] {
            let gap = min_gap_grid(&inst, m).unwrap().gap;
            if let Some(prev) = last {
                assert!(gap <= prev);
            }
            last = Some(gap);
        }
    }
}
