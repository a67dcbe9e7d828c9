//! Seeded random instances for property tests and benchmarks.
//!
//! Every generator is a pure function of its seed (ChaCha8), so a failing case
//! can be replayed from the seed alone. Breakpoints are multiples of
//! `1/GRID` and density values are multiples of `1/4`.

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{ratio, Rational};
use crate::valuation::{AdditiveInstance, CutSet, PiecewiseConstantDensity};

/// Denominator of generated breakpoints.
pub const GRID: i64 = 120;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn breakpoints(rng: &mut ChaCha8Rng, segments: usize) -> Vec<Rational> {
    let inner = rand::seq::index::sample(rng, (GRID - 1) as usize, segments - 1);
    let mut ks: Vec<i64> = inner.into_iter().map(|k| k as i64 + 1).collect();
    ks.sort_unstable();
    std::iter::once(0)
        .chain(ks)
        .chain(std::iter::once(GRID))
        .map(|k| ratio(k, GRID))
        .collect()
}

/// Quarter-integer in `[lo, hi]`.
fn quarter(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    ratio(rng.gen_range(4 * lo..=4 * hi), 4)
}

fn density_with(
    rng: &mut ChaCha8Rng,
    max_segments: usize,
    mut value: impl FnMut(&mut ChaCha8Rng) -> Rational,
) -> PiecewiseConstantDensity {
    let segments = rng.gen_range(1..=max_segments.max(1));
    let bps = breakpoints(rng, segments);
    let values = (0..segments).map(|_| value(rng)).collect();
    PiecewiseConstantDensity::new(bps, values).expect("generated density is well formed")
}

/// Shifts every value up by the same constant when the total is negative, so
/// that the total becomes exactly 0.
fn lift_total(d: PiecewiseConstantDensity) -> PiecewiseConstantDensity {
    if !d.total().is_negative() {
        return d;
    }
    let shift = -d.total().clone();
    d.plus(&PiecewiseConstantDensity::constant(shift))
}

/// Densities in `[0, 10]` with up to `max_segments` segments each.
pub fn nonnegative(seed: u64, n: usize, max_segments: usize) -> AdditiveInstance {
    let mut r = rng(seed, 1);
    let ds = (0..n)
        .map(|_| density_with(&mut r, max_segments, |g| quarter(g, 0, 10)))
        .collect();
    AdditiveInstance::new(ds).expect("n >= 1")
}

/// Densities in `[1/2, 5]`: strictly positive and well conditioned.
pub fn positive(seed: u64, n: usize, max_segments: usize) -> AdditiveInstance {
    let mut r = rng(seed, 2);
    let ds = (0..n)
        .map(|_| {
            density_with(&mut r, max_segments, |g| quarter(g, 0, 4) + ratio(1, 2))
        })
        .collect();
    AdditiveInstance::new(ds).expect("n >= 1")
}

/// Signed densities in `[-5, 10]`, lifted so that every total is at least 0.
pub fn signed_nonnegative_totals(seed: u64, n: usize, max_segments: usize) -> AdditiveInstance {
    let mut r = rng(seed, 3);
    let ds = (0..n)
        .map(|_| lift_total(density_with(&mut r, max_segments, |g| quarter(g, -5, 10))))
        .collect();
    AdditiveInstance::new(ds).expect("n >= 1")
}

/// `F_1 >= F_2 >= ... >= F_n >= ...` with `F_n(1) >= 0`: the last agent is
/// signed and every earlier density adds a nonnegative increment.
pub fn value_ordered(seed: u64, n: usize, max_segments: usize) -> AdditiveInstance {
    let mut r = rng(seed, 4);
    let mut current = lift_total(density_with(&mut r, max_segments, |g| quarter(g, -5, 5)));
    let mut ds = vec![current.clone()];
    for _ in 1..n {
        let increment = density_with(&mut r, max_segments, |g| quarter(g, 0, 3));
        current = current.plus(&increment);
        ds.push(current.clone());
    }
    ds.reverse();
    AdditiveInstance::new(ds).expect("n >= 1")
}

/// All agents share one density with nonnegative total.
pub fn identical(seed: u64, n: usize, max_segments: usize) -> AdditiveInstance {
    let mut r = rng(seed, 5);
    let d = lift_total(density_with(&mut r, max_segments, |g| quarter(g, -5, 10)));
    AdditiveInstance::new(vec![d; n]).expect("n >= 1")
}

/// One split-cake density: negative outside a window of segments, positive
/// inside, lifted inside the window until the total is nonnegative.
fn split_cake_density(r: &mut ChaCha8Rng, max_segments: usize) -> PiecewiseConstantDensity {
    let segments = r.gen_range(1..=max_segments.max(1));
    let bps = breakpoints(r, segments);
    let first = r.gen_range(0..segments);
    let last = r.gen_range(first..segments);
    let mut values: Vec<Rational> = (0..segments)
        .map(|j| {
            if (first..=last).contains(&j) {
                quarter(r, 0, 10) + ratio(1, 4)
            } else {
                -quarter(r, 0, 5)
            }
        })
        .collect();
    let probe = PiecewiseConstantDensity::new(bps.clone(), values.clone()).expect("valid");
    if probe.total().is_negative() {
        let width = &bps[last + 1] - &bps[first];
        let lift = -probe.total().clone() / width;
        for v in &mut values[first..=last] {
            *v += &lift;
        }
    }
    PiecewiseConstantDensity::new(bps, values).expect("valid")
}

/// Split-cake agents in shuffled order.
pub fn split_cake(seed: u64, n: usize, max_segments: usize) -> AdditiveInstance {
    let mut r = rng(seed, 6);
    let mut ds: Vec<PiecewiseConstantDensity> =
        (0..n).map(|_| split_cake_density(&mut r, max_segments)).collect();
    ds.shuffle(&mut r);
    AdditiveInstance::new(ds).expect("n >= 1")
}

/// Unimodal step density with values in `[-5, 10]`; the total may be negative.
pub fn single_peaked_density(seed: u64, max_segments: usize) -> PiecewiseConstantDensity {
    let mut r = rng(seed, 7);
    let segments = r.gen_range(1..=max_segments.max(1));
    let bps = breakpoints(&mut r, segments);
    let mut values: Vec<Rational> = (0..segments).map(|_| quarter(&mut r, -5, 10)).collect();
    let peak = r.gen_range(0..segments);
    values[..=peak].sort();
    values[peak..].sort_by(|a, b| b.cmp(a));
    PiecewiseConstantDensity::new(bps, values).expect("valid")
}

/// Uniformly spread cut-sets with denominator 997.
pub fn cutsets(seed: u64, n: usize, count: usize) -> Vec<CutSet> {
    const DEN: u64 = 997;
    let mut r = rng(seed, 8);
    (0..count)
        .map(|_| {
            let mut cuts: Vec<u64> = (0..n.saturating_sub(1)).map(|_| r.gen_range(0..=DEN)).collect();
            cuts.sort_unstable();
            let mut prev = 0;
            let mut parts = Vec::with_capacity(n);
            for c in cuts.into_iter().chain(std::iter::once(DEN)) {
                parts.push(ratio((c - prev) as i64, DEN as i64));
                prev = c;
            }
            CutSet::new(parts).expect("parts sum to 1")
        })
        .collect()
}

/// Whether every density value is at least 0.
pub fn is_nonnegative(inst: &AdditiveInstance) -> bool {
    inst.densities()
        .iter()
        .all(|d| d.values().iter().all(|v| !v.is_negative()))
}

/// Whether every agent's full-cake value is at least 0.
pub fn has_nonnegative_totals(inst: &AdditiveInstance) -> bool {
    inst.densities().iter().all(|d| !d.total().is_negative())
}
