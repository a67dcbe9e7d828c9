//! Happiest-agent labeling, Sperner checks, fully labeled cells and the
//! refinement solver for connected ε-equitable divisions.
//!
//! Every grid vertex is labeled by its happiest agent: among the agents with
//! maximal value, those holding the longest piece, and among those the lowest
//! index. When the instance guarantees some agent with a nonempty piece a
//! nonnegative value, this labeling is a Sperner labeling, so each resolution
//! has an odd number of fully labeled cells, and those cells shrink onto
//! equitable cut-sets as the resolution doubles.

use std::cmp::Ordering;
use std::fmt;

use dashmap::DashMap;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg;
use crate::rational::Rational;
use crate::simplex::{self, ElementarySimplex, GridPoint, KuhnTriangulation, SimplexError};
use crate::valuation::{equity_gap, CutSet, Scalar, ValuationError, Valuations};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// A vertex label: the 0-based index of the happiest agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub usize);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

/// Happy, happier and happiest agents at one cut-set (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HappySets {
    pub happy: Vec<usize>,
    pub happier: Vec<usize>,
    pub happiest: Label,
}

/// Classifies agents from an already computed value vector.
pub fn happy_sets_from_values<S: Scalar>(values: &[S], x: &CutSet) -> HappySets {
    let top = values
        .iter()
        .fold(&values[0], |best, v| if v > best { v } else { best });
    let happy: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].partial_cmp(top) == Some(Ordering::Equal))
        .collect();
    let longest = happy
        .iter()
        .map(|&i| &x.parts()[i])
        .max()
        .expect("the maximum is attained");
    let happier: Vec<usize> = happy
        .iter()
        .copied()
        .filter(|&i| x.parts()[i] == *longest)
        .collect();
    let happiest = Label(happier[0]);
    HappySets {
        happy,
        happier,
        happiest,
    }
}

pub fn happy_sets<V: Valuations>(inst: &V, x: &CutSet) -> Result<HappySets, ValuationError> {
    let values = inst.evaluate(x)?;
    Ok(happy_sets_from_values(&values, x))
}

pub fn label_vertex<V: Valuations>(inst: &V, x: &CutSet) -> Result<Label, ValuationError> {
    Ok(happy_sets(inst, x)?.happiest)
}

/// A grid vertex on the facet `x_label = 0` that nevertheless carries `label`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpernerViolation {
    pub vertex: CutSet,
    pub label: Label,
    /// Whether the vertex is a corner `e_i` (so its label should have been `i`).
    pub at_corner: bool,
}

impl SpernerViolation {
    /// Agent whose empty-piece facet contains the vertex.
    pub fn facet(&self) -> usize {
        self.label.0
    }
}

impl fmt::Display for SpernerViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vertex {} on facet x_{} = 0 is labeled {}",
            self.vertex,
            self.label,
            self.label
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpernerCheck {
    Ok,
    Violation(SpernerViolation),
}

/// Concurrent label memo keyed by the reduced grid point, so labels computed
/// at resolution `m` are reused at `2m`. Values are deterministic; racing
/// writers store the same label.
pub struct Labeler<'a, V> {
    inst: &'a V,
    memo: DashMap<(Vec<u64>, u64), Label>,
}

impl<'a, V: Valuations> Labeler<'a, V> {
    pub fn new(inst: &'a V) -> Self {
        Labeler {
            inst,
            memo: DashMap::new(),
        }
    }

    pub fn label(&self, p: &GridPoint) -> Result<Label, ValuationError> {
        let key = p.reduced();
        if let Some(l) = self.memo.get(&key) {
            return Ok(*l);
        }
        let l = label_vertex(self.inst, &p.to_cutset())?;
        self.memo.insert(key, l);
        Ok(l)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Labels of every vertex, indexed by [`simplex::GridIndex::rank`].
    fn label_grid(&self, tri: &KuhnTriangulation) -> Result<Vec<Label>, ValuationError> {
        let vertices: Vec<GridPoint> = tri.vertices().collect();
        vertices.par_iter().map(|p| self.label(p)).collect()
    }
}

fn violation_at(p: &GridPoint, label: Label) -> Option<SpernerViolation> {
    let k = p.coords();
    (k[label.0] == 0).then(|| SpernerViolation {
        vertex: p.to_cutset(),
        label,
        at_corner: k.iter().filter(|&&ki| ki > 0).count() == 1,
    })
}

/// Corner vertices first, then the remaining boundary in grid order.
fn boundary_scan_order(n: usize, m: u64) -> Vec<GridPoint> {
    let corners = (0..n).map(|i| {
        let mut k = vec![0; n];
        k[i] = m;
        GridPoint::new(k, m).expect("corner is a grid point")
    });
    let rest = simplex::grid_vertices(n, m)
        .expect("validated arguments")
        .filter(|p| p.on_boundary() && p.coords().iter().filter(|&&k| k > 0).count() > 1);
    corners.chain(rest).collect()
}

fn first_violation(
    n: usize,
    m: u64,
    label_of: impl Fn(&GridPoint) -> Result<Label, ValuationError> + Sync,
) -> Result<SpernerCheck, ValuationError> {
    let found = boundary_scan_order(n, m)
        .par_iter()
        .map(|p| label_of(p).map(|l| violation_at(p, l)))
        .find_first(|r| !matches!(r, Ok(None)));
    match found {
        None => Ok(SpernerCheck::Ok),
        Some(Ok(Some(v))) => Ok(SpernerCheck::Violation(v)),
        Some(Ok(None)) => unreachable!(),
        Some(Err(e)) => Err(e),
    }
}

/// Checks both boundary conditions of a Sperner labeling at resolution `m`:
/// corner `e_i` carries label `i`, and no vertex with `x_i = 0` carries label
/// `i`. Interior vertices are never inspected.
pub fn check_sperner<V: Valuations>(inst: &V, m: u64) -> Result<SpernerCheck, SolveError> {
    simplex::grid_vertices(inst.agents(), m)?;
    Ok(first_violation(inst.agents(), m, |p| {
        label_vertex(inst, &p.to_cutset())
    })?)
}

/// Every boundary violation at resolution `m`, in scan order.
pub fn sperner_violations<V: Valuations>(
    inst: &V,
    m: u64,
) -> Result<Vec<SpernerViolation>, SolveError> {
    simplex::grid_vertices(inst.agents(), m)?;
    let found: Result<Vec<Option<SpernerViolation>>, ValuationError> =
        boundary_scan_order(inst.agents(), m)
            .par_iter()
            .map(|p| label_vertex(inst, &p.to_cutset()).map(|l| violation_at(p, l)))
            .collect();
    Ok(found?.into_iter().flatten().collect())
}

fn all_distinct(labels: impl Iterator<Item = Label>, n: usize) -> bool {
    let mut seen = 0u128;
    let mut count = 0;
    for l in labels {
        let bit = 1u128 << l.0;
        if seen & bit != 0 {
            return false;
        }
        seen |= bit;
        count += 1;
    }
    count == n
}

fn fully_labeled_cells(tri: &KuhnTriangulation, labels: &[Label]) -> Vec<ElementarySimplex> {
    let index = tri.index();
    let n = tri.dimension();
    let bases: Vec<GridPoint> = tri.bases().collect();
    bases
        .par_iter()
        .flat_map_iter(|b| {
            tri.cells_at(b).into_iter().filter(|cell| {
                all_distinct(
                    cell.vertex_coords().iter().map(|k| labels[index.rank(k)]),
                    n,
                )
            })
        })
        .collect()
}

/// Cells of the resolution-`m` triangulation whose `n` vertices carry `n`
/// distinct labels. For a Sperner labeling their number is odd.
pub fn fully_labeled<V: Valuations>(
    inst: &V,
    m: u64,
) -> Result<Vec<ElementarySimplex>, SolveError> {
    let n = inst.agents();
    if n > 128 {
        return Err(SolveError::InvalidOptions(format!("{n} agents exceed 128")));
    }
    let tri = KuhnTriangulation::new(n, m)?;
    let labels = Labeler::new(inst).label_grid(&tri)?;
    Ok(fully_labeled_cells(&tri, &labels))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub eps: f64,
    pub m0: u64,
    pub mmax: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            eps: 1e-6,
            m0: 8,
            mmax: 1024,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<(), SolveError> {
        if !(self.eps > 0.0) {
            return Err(SolveError::InvalidOptions(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.m0 < 1 || self.m0 > self.mmax {
            return Err(SolveError::InvalidOptions(format!(
                "need 1 <= m0 <= mmax, got m0 = {}, mmax = {}",
                self.m0, self.mmax
            )));
        }
        Ok(())
    }
}

/// How a candidate cut-set was extracted from a fully labeled cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateSource {
    Barycenter,
    /// Equal-value point of the affine interpolant of the vertex values.
    Interpolated,
    /// Exact equal-value point of an affine piece of an additive instance.
    AffinePiece,
}

impl CandidateSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            CandidateSource::Barycenter => "barycenter",
            CandidateSource::Interpolated => "interpolated",
            CandidateSource::AffinePiece => "affine-piece",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate<S> {
    pub cutset: CutSet,
    pub values: Vec<S>,
    pub gap: S,
    pub source: CandidateSource,
    pub resolution: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport<S> {
    pub m: u64,
    pub fully_labeled: usize,
    /// Smallest equity gap over the barycenters of this level's fully labeled cells.
    pub barycenter_gap: Option<S>,
    /// Smallest gap over every candidate of this level.
    pub best_gap: Option<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveStatus {
    Converged,
    BudgetExhausted,
    LabelingViolation(SpernerViolation),
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::BudgetExhausted => "budget-exhausted",
            SolveStatus::LabelingViolation(_) => "labeling-violation",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<S> {
    /// Best candidate over all levels; `None` only when the first level
    /// already failed the Sperner check.
    pub best: Option<Candidate<S>>,
    pub resolution_reached: u64,
    pub levels: Vec<LevelReport<S>>,
    pub status: SolveStatus,
}

impl<S: Scalar> SolveReport<S> {
    pub fn best_cutset(&self) -> Option<&CutSet> {
        self.best.as_ref().map(|c| &c.cutset)
    }

    pub fn values(&self) -> Option<&[S]> {
        self.best.as_ref().map(|c| c.values.as_slice())
    }

    pub fn gap(&self) -> Option<&S> {
        self.best.as_ref().map(|c| &c.gap)
    }

    pub fn fully_labeled_counts(&self) -> Vec<(u64, usize)> {
        self.levels.iter().map(|l| (l.m, l.fully_labeled)).collect()
    }

    pub fn is_converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    fn negate_values(&mut self) {
        if let Some(best) = &mut self.best {
            for v in &mut best.values {
                *v = -v.clone();
            }
        }
    }
}

fn evaluate_candidate<V: Valuations>(
    inst: &V,
    cutset: CutSet,
    source: CandidateSource,
    resolution: u64,
) -> Result<Candidate<V::Value>, ValuationError> {
    let values = inst.evaluate(&cutset)?;
    let gap = equity_gap(&values)?;
    Ok(Candidate {
        cutset,
        values,
        gap,
        source,
        resolution,
    })
}

/// Weights `λ` (summing to 1) at which the affine interpolant of the vertex
/// values is the same for every agent, mapped back to a cut-set.
fn interpolated_point<S: Scalar>(vertices: &[CutSet], values: &[Vec<S>]) -> Option<CutSet> {
    let n = vertices.len();
    if n < 2 {
        return None;
    }
    // values[j][i]: agent i at vertex j
    let mut matrix = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n - 1 {
        matrix.push(
            (0..n)
                .map(|j| values[j][i].clone() - values[j][n - 1].clone())
                .collect(),
        );
        rhs.push(S::zero());
    }
    matrix.push(vec![S::one(); n]);
    rhs.push(S::one());
    let weights = linalg::solve(matrix, rhs)?;
    let weights: Vec<Rational> = weights.iter().map(|w| w.to_rational()).collect::<Option<_>>()?;
    let total: Rational = weights.iter().sum();
    if total.is_zero() {
        return None;
    }
    let dim = vertices[0].len();
    let parts: Vec<Rational> = (0..dim)
        .map(|c| {
            weights
                .iter()
                .zip(vertices)
                .map(|(w, v)| w * &v.parts()[c])
                .sum::<Rational>()
                / &total
        })
        .collect();
    CutSet::new(parts).ok()
}

fn cell_candidates<V: Valuations>(
    inst: &V,
    cell: &ElementarySimplex,
) -> Result<Vec<Candidate<V::Value>>, ValuationError> {
    let m = cell.resolution();
    let mut out = vec![evaluate_candidate(
        inst,
        cell.barycenter(),
        CandidateSource::Barycenter,
        m,
    )?];
    let vertices = cell.vertices();
    let values: Vec<Vec<V::Value>> = vertices
        .iter()
        .map(|x| inst.evaluate(x))
        .collect::<Result<_, _>>()?;
    if let Some(x) = interpolated_point(&vertices, &values) {
        out.push(evaluate_candidate(inst, x, CandidateSource::Interpolated, m)?);
    }
    // One extra grid step of slack around the cell catches equal-value points
    // that sit just across a facet.
    let step = Rational::new(1.into(), m.into());
    let (lo, hi) = cell.cut_ranges();
    let lo: Vec<Rational> = lo
        .into_iter()
        .map(|s| (s - &step).max(Rational::zero()))
        .collect();
    let hi: Vec<Rational> = hi
        .into_iter()
        .map(|s| (s + &step).min(Rational::one()))
        .collect();
    for x in inst.equitable_points_near(&lo, &hi) {
        out.push(evaluate_candidate(inst, x, CandidateSource::AffinePiece, m)?);
    }
    Ok(out)
}

fn better<S: Scalar>(candidate: &S, incumbent: Option<&S>) -> bool {
    incumbent.is_none_or(|best| candidate < best)
}

/// Refinement solver: for `m = m0, 2 m0, ... <= mmax` checks the Sperner
/// boundary conditions, enumerates the fully labeled cells, and scores the
/// candidates extracted from each. Stops once the best gap is at most `eps`.
///
/// The labels are oriented for nonnegative instances; use [`solve_sanp`] for
/// the nonpositive mirror.
pub fn solve<V: Valuations>(
    inst: &V,
    opts: &SolveOptions,
) -> Result<SolveReport<V::Value>, SolveError> {
    opts.validate()?;
    let n = inst.agents();
    if n > 128 {
        return Err(SolveError::InvalidOptions(format!("{n} agents exceed 128")));
    }
    let labeler = Labeler::new(inst);
    let mut best: Option<Candidate<V::Value>> = None;
    let mut levels = Vec::new();
    let mut resolution_reached = 0;

    for m in simplex::refinement_schedule(opts.m0, opts.mmax) {
        let tri = KuhnTriangulation::new(n, m)?;
        let labels = labeler.label_grid(&tri)?;
        let index = tri.index();
        let check = first_violation(n, m, |p| Ok(labels[index.rank(p.coords())]))?;
        if let SpernerCheck::Violation(v) = check {
            return Ok(SolveReport {
                best,
                resolution_reached,
                levels,
                status: SolveStatus::LabelingViolation(v),
            });
        }
        resolution_reached = m;

        let cells = fully_labeled_cells(&tri, &labels);
        let per_cell: Vec<Vec<Candidate<V::Value>>> = cells
            .par_iter()
            .map(|cell| cell_candidates(inst, cell))
            .collect::<Result<_, _>>()?;

        let mut level = LevelReport {
            m,
            fully_labeled: cells.len(),
            barycenter_gap: None,
            best_gap: None,
        };
        for cand in per_cell.into_iter().flatten() {
            if cand.source == CandidateSource::Barycenter
                && better(&cand.gap, level.barycenter_gap.as_ref())
            {
                level.barycenter_gap = Some(cand.gap.clone());
            }
            if better(&cand.gap, level.best_gap.as_ref()) {
                level.best_gap = Some(cand.gap.clone());
            }
            if better(&cand.gap, best.as_ref().map(|b| &b.gap)) {
                best = Some(cand);
            }
        }
        levels.push(level);

        if best.as_ref().is_some_and(|b| b.gap.at_most(opts.eps)) {
            return Ok(SolveReport {
                best,
                resolution_reached,
                levels,
                status: SolveStatus::Converged,
            });
        }
    }

    Ok(SolveReport {
        best,
        resolution_reached,
        levels,
        status: SolveStatus::BudgetExhausted,
    })
}

/// Solves the negated instance and reports values on the original scale.
pub fn solve_sanp<V: Valuations>(
    inst: &V,
    opts: &SolveOptions,
) -> Result<SolveReport<V::Value>, SolveError> {
    let mut report = solve(&inst.negate(), opts)?;
    report.negate_values();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::{int, ratio};
    use crate::valuation::{AdditiveInstance, GlobalInstance, PiecewiseConstantDensity, ValuationFn};
    use std::sync::Arc;

    fn cut(parts: &[(i64, i64)]) -> CutSet {
        CutSet::new(parts.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    fn lengths_instance(n: usize) -> AdditiveInstance {
        AdditiveInstance::new(vec![PiecewiseConstantDensity::constant(int(1)); n]).unwrap()
    }

    #[test]
    fn happy_sets_examples() {
        let ex1 = catalog::happiness();
        let h = happy_sets(&ex1, &cut(&[(1, 5), (2, 5), (2, 5)])).unwrap();
        assert_eq!(h.happy, vec![0, 1, 2]);
        assert_eq!(h.happier, vec![1, 2]);
        assert_eq!(h.happiest, Label(1));
        for i in 0..3 {
            let h = happy_sets(&ex1, &CutSet::corner(3, i)).unwrap();
            assert_eq!(h.happier, vec![i]);
            assert_eq!(label_vertex(&ex1, &CutSet::corner(3, i)).unwrap(), Label(i));
        }
        let ex3 = catalog::no_sann_ordering();
        let h = happy_sets(&ex3, &cut(&[(4, 5), (1, 5), (0, 1)])).unwrap();
        assert_eq!(h.happy, vec![2]);
        assert_eq!(h.happiest, Label(2));
    }

    #[test]
    fn sperner_check_examples() {
        assert_eq!(check_sperner(&catalog::happiness(), 10).unwrap(), SpernerCheck::Ok);
        let ex3 = catalog::no_sann_ordering();
        let SpernerCheck::Violation(v) = check_sperner(&ex3, 10).unwrap() else {
            panic!("expected a violation");
        };
        assert!(v.vertex.parts()[v.facet()].is_zero());
        assert_eq!(label_vertex(&ex3, &v.vertex).unwrap(), v.label);
        let all = sperner_violations(&ex3, 10).unwrap();
        assert_eq!(all[0], v);
        assert!(all
            .iter()
            .any(|w| w.vertex == cut(&[(4, 5), (1, 5), (0, 1)]) && w.label == Label(2)));
        let single = lengths_instance(1);
        assert_eq!(check_sperner(&single, 5).unwrap(), SpernerCheck::Ok);
    }

    #[test]
    fn fully_labeled_segment_for_piece_lengths() {
        let inst = lengths_instance(2);
        let cells = fully_labeled(&inst, 4).unwrap();
        assert_eq!(cells.len(), 1);
        let verts = cells[0].vertices();
        assert!(verts.contains(&cut(&[(1, 2), (1, 2)])));
        let labels: Vec<_> = verts.iter().map(|x| label_vertex(&inst, x).unwrap()).collect();
        assert!(labels.contains(&Label(0)) && labels.contains(&Label(1)));
        let one = fully_labeled(&lengths_instance(1), 3).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn fully_labeled_parity_on_happiness_instance() {
        for m in [1, 2, 5, 10, 16] {
            let cells = fully_labeled(&catalog::happiness(), m).unwrap();
            assert_eq!(cells.len() % 2, 1, "m={m}");
        }
    }

    #[test]
    fn labels_stable_under_refinement() {
        let inst = catalog::happiness();
        let tri = KuhnTriangulation::new(3, 6).unwrap();
        for p in tri.vertices() {
            let fine = GridPoint::new(p.coords().iter().map(|k| 2 * k).collect(), 12).unwrap();
            assert_eq!(
                label_vertex(&inst, &p.to_cutset()).unwrap(),
                label_vertex(&inst, &fine.to_cutset()).unwrap()
            );
        }
        let labeler = Labeler::new(&inst);
        let coarse = labeler.label_grid(&tri).unwrap();
        let before = labeler.memo_len();
        let fine = labeler.label_grid(&KuhnTriangulation::new(3, 12).unwrap()).unwrap();
        assert_eq!(labeler.memo_len(), before + fine.len() - coarse.len());
    }

    #[test]
    fn solve_converges_on_happiness_instance() {
        let inst = catalog::happiness();
        let report = solve(&inst, &SolveOptions::default()).unwrap();
        assert!(report.is_converged());
        let best = report.best.as_ref().unwrap();
        assert!(best.gap.at_most(1e-6));
        assert_eq!(best.values, inst.evaluate(&best.cutset).unwrap());
        assert_eq!(best.gap, equity_gap(&best.values).unwrap());
    }

    #[test]
    fn solve_reports_labeling_violation() {
        let report = solve(&catalog::no_sann_ordering(), &SolveOptions::default()).unwrap();
        assert!(matches!(report.status, SolveStatus::LabelingViolation(_)));
        assert!(report.best.is_none());
    }

    #[test]
    fn solve_rejects_bad_options() {
        let inst = catalog::happiness();
        for opts in [
            SolveOptions { eps: 0.0, ..Default::default() },
            SolveOptions { eps: f64::NAN, ..Default::default() },
            SolveOptions { m0: 16, mmax: 8, ..Default::default() },
            SolveOptions { m0: 0, ..Default::default() },
        ] {
            assert!(matches!(solve(&inst, &opts), Err(SolveError::InvalidOptions(_))));
        }
    }

    #[test]
    fn sanp_mirrors_nonnegative_solve() {
        let inst = catalog::happiness();
        let opts = SolveOptions::default();
        let direct = solve(&inst, &opts).unwrap();
        let mirrored = solve_sanp(&inst.negate(), &opts).unwrap();
        assert_eq!(direct.best_cutset(), mirrored.best_cutset());
        let neg: Vec<Rational> = direct.values().unwrap().iter().map(|v| -v).collect();
        assert_eq!(mirrored.values().unwrap(), neg.as_slice());
        let equitable = mirrored.best.unwrap();
        assert!(equitable.values.iter().all(|v| *v < int(0)));
        let zero = AdditiveInstance::new(vec![PiecewiseConstantDensity::constant(int(0)); 3]).unwrap();
        let r = solve_sanp(&zero, &opts).unwrap();
        assert!(r.is_converged());
        assert_eq!(r.levels.len(), 1);
        assert!(r.gap().unwrap().is_zero());
    }

    #[test]
    fn global_mode_sanp_instance() {
        // v1 >= 0, v2 <= 0, v3 <= 0, with a nonpositive agent on every nonempty piece.
        let vals: Vec<ValuationFn> = vec![
            Arc::new(|x: &[f64]| x[0] * (x[1] + x[2])),
            Arc::new(|x: &[f64]| -x[0] * (1.0 + x[1]).ln()),
            Arc::new(|x: &[f64]| (1.0 - x[2].exp()) * (2.0 + x[0]).ln()),
        ];
        let inst = GlobalInstance::new(vals).unwrap();
        let opts = SolveOptions { eps: 1e-6, m0: 8, mmax: 1024 };
        let report = solve_sanp(&inst, &opts).unwrap();
        assert!(report.is_converged(), "{:?}", report.levels);
        let best = report.best.unwrap();
        let values = inst.evaluate(&best.cutset).unwrap();
        assert!(equity_gap(&values).unwrap() <= 1e-6);
    }

    #[test]
    fn interpolation_is_exact_for_affine_values() {
        // piece lengths: equal-value point is the centroid
        let inst = lengths_instance(3);
        let cell = KuhnTriangulation::new(3, 1).unwrap().cells().next().unwrap();
        let verts = cell.vertices();
        let values: Vec<Vec<Rational>> = verts.iter().map(|x| inst.evaluate(x).unwrap()).collect();
        let x = interpolated_point(&verts, &values).unwrap();
        assert_eq!(x, cut(&[(1, 3), (1, 3), (1, 3)]));
    }
}
