//! Hand-checkable instances used throughout the tests and shipped in `corpus/`.

use crate::rational::{int, ratio, Rational};
use crate::valuation::{AdditiveInstance, PiecewiseConstantDensity, Permutation, Valuations};

fn density(breaks: &[(i64, i64)], values: &[Rational]) -> PiecewiseConstantDensity {
    PiecewiseConstantDensity::new(
        breaks.iter().map(|&(p, q)| ratio(p, q)).collect(),
        values.to_vec(),
    )
    .expect("catalog densities are well formed")
}

/// Three nonnegative agents; `(1/5, 2/5, 2/5)` is equitable with value 1/2
/// each, and agent 2 (1-based) is the happiest there.
pub fn happiness() -> AdditiveInstance {
    AdditiveInstance::new(vec![
        density(&[(0, 1), (2, 5), (1, 1)], &[ratio(5, 2), int(0)]),
        density(
            &[(0, 1), (1, 5), (3, 5), (1, 1)],
            &[ratio(5, 6), ratio(5, 4), ratio(5, 6)],
        ),
        density(&[(0, 1), (3, 5), (1, 1)], &[ratio(5, 6), ratio(5, 4)]),
    ])
    .unwrap()
}

/// Signed agents with no connected equitable division in this order.
pub fn order_sensitive() -> AdditiveInstance {
    AdditiveInstance::new(vec![
        density(&[(0, 1), (1, 2), (1, 1)], &[int(-1), int(3)]),
        density(&[(0, 1), (1, 1)], &[int(1)]),
        density(&[(0, 1), (1, 2), (1, 1)], &[int(3), int(-1)]),
    ])
    .unwrap()
}

/// [`order_sensitive`] with the outer agents swapped; `(1/5, 3/5, 1/5)` gives
/// everyone 3/5.
pub fn order_sensitive_reordered() -> AdditiveInstance {
    order_sensitive()
        .permute(&Permutation::from_one_based(&[3, 2, 1]).unwrap())
        .unwrap()
}

/// Three signed agents for which no ordering satisfies the nonnegativity
/// condition, yet `(48/230, 45/230, 137/230)` is equitable at 45/23.
pub fn no_sann_ordering() -> AdditiveInstance {
    let b = |xs: &[i64]| xs.iter().map(|&p| (p, 10)).collect::<Vec<_>>();
    AdditiveInstance::new(vec![
        density(
            &b(&[0, 1, 2, 8, 9, 10]),
            &[int(-10), int(30), int(-5), int(30), int(-10)],
        ),
        density(
            &b(&[0, 2, 3, 7, 8, 10]),
            &[int(-5), int(30), ratio(-15, 2), int(30), int(-5)],
        ),
        density(&b(&[0, 4, 7, 10]), &[ratio(-5, 2), int(10), ratio(-10, 3)]),
    ])
    .unwrap()
}

/// Every table row for [`no_sann_ordering`]: agent order (1-based), a cut-set
/// in tenths, and the values it yields in that order.
pub fn no_sann_table() -> Vec<([usize; 3], [i64; 3], [Rational; 3])> {
    vec![
        ([1, 2, 3], [8, 2, 0], [int(-1), int(-1), int(0)]),
        ([1, 3, 2], [8, 0, 2], [int(-1), int(0), int(-1)]),
        ([2, 1, 3], [7, 0, 3], [int(-1), int(0), int(-1)]),
        ([2, 3, 1], [7, 3, 0], [int(-1), int(-1), int(0)]),
        ([3, 1, 2], [0, 8, 2], [int(0), int(-1), int(-1)]),
        ([3, 2, 1], [3, 7, 0], [ratio(-3, 4), int(-1), int(0)]),
    ]
}
