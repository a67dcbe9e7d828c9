//! Kuhn (Freudenthal) triangulation of the standard simplex at resolution `m`.
//!
//! Grid vertices are the cut-sets `k / m` with `k` a composition of `m` into
//! `n` nonnegative parts. In cut coordinates `s_j = k_1 + ... + k_j` the
//! simplex is `0 <= s_1 <= ... <= s_{n-1} <= m`, and an elementary simplex is
//! a base point `b` plus a permutation `perm` of the `n - 1` unit steps in
//! `s`. A step in direction `d` adds one grid unit to `k_d` and removes one
//! from `k_{d+1}`.

use itertools::Itertools;
use num_integer::Integer;
use thiserror::Error;

use crate::rational::Rational;
use crate::valuation::CutSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("resolution must be at least 1, got {0}")]
    InvalidResolution(u64),
    #[error("grid coordinates {k:?} do not sum to resolution {m}")]
    InvalidGridPoint { k: Vec<u64>, m: u64 },
}

fn check_args(n: usize, m: u64) -> Result<(), SimplexError> {
    if n < 1 {
        return Err(SimplexError::InvalidDimension(n));
    }
    if m < 1 {
        return Err(SimplexError::InvalidResolution(m));
    }
    Ok(())
}

/// The cut-set `k / m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    k: Vec<u64>,
    m: u64,
}

impl GridPoint {
    pub fn new(k: Vec<u64>, m: u64) -> Result<Self, SimplexError> {
        if m == 0 {
            return Err(SimplexError::InvalidResolution(m));
        }
        if k.is_empty() || k.iter().sum::<u64>() != m {
            return Err(SimplexError::InvalidGridPoint { k, m });
        }
        Ok(GridPoint { k, m })
    }

    pub fn coords(&self) -> &[u64] {
        &self.k
    }

    pub fn resolution(&self) -> u64 {
        self.m
    }

    pub fn dimension(&self) -> usize {
        self.k.len()
    }

    pub fn to_cutset(&self) -> CutSet {
        CutSet::from_grid(&self.k, self.m)
    }

    /// Lowest-terms representative; equal for the same cut-set at any resolution.
    pub fn reduced(&self) -> (Vec<u64>, u64) {
        let g = self.k.iter().fold(self.m, |g, &ki| g.gcd(&ki));
        (self.k.iter().map(|ki| ki / g).collect(), self.m / g)
    }

    pub fn on_boundary(&self) -> bool {
        self.k.contains(&0)
    }
}

/// `C(m + n - 1, n - 1)`, the number of grid vertices.
pub fn grid_size(n: usize, m: u64) -> u128 {
    binomial(m as u128 + n as u128 - 1, n as u128 - 1)
}

fn binomial(a: u128, b: u128) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1u128, |acc, i| acc * (a - i) / (i + 1))
}

/// Compositions of `m` into `n` parts in lexicographic order of `k`.
#[derive(Clone, Debug)]
pub struct Compositions {
    next: Option<Vec<u64>>,
    m: u64,
}

impl Iterator for Compositions {
    type Item = GridPoint;

    fn next(&mut self) -> Option<GridPoint> {
        let current = self.next.take()?;
        let n = current.len();
        let mut succ = current.clone();
        let mut tail = 0u64;
        // rightmost position (not last) with mass strictly to its right
        for i in (0..n.saturating_sub(1)).rev() {
            tail += succ[i + 1];
            if tail > 0 {
                succ[i] += 1;
                for s in &mut succ[i + 1..n - 1] {
                    *s = 0;
                }
                succ[n - 1] = tail - 1;
                self.next = Some(succ);
                break;
            }
        }
        Some(GridPoint {
            k: current,
            m: self.m,
        })
    }
}

/// Every grid vertex of resolution `m` on the `(n-1)`-simplex, each once.
pub fn grid_vertices(n: usize, m: u64) -> Result<Compositions, SimplexError> {
    check_args(n, m)?;
    Ok(compositions(n, m))
}

fn compositions(n: usize, m: u64) -> Compositions {
    let mut first = vec![0; n];
    first[n - 1] = m;
    Compositions {
        next: Some(first),
        m,
    }
}

/// Position of a grid vertex in [`grid_vertices`] order.
#[derive(Clone, Debug)]
pub struct GridIndex {
    n: usize,
    m: u64,
    // binom[a][b] = C(a, b) for a <= m + n, b <= n
    binom: Vec<Vec<usize>>,
}

impl GridIndex {
    pub fn new(n: usize, m: u64) -> Self {
        let rows = m as usize + n + 1;
        let mut binom = vec![vec![0usize; n + 1]; rows];
        for a in 0..rows {
            binom[a][0] = 1;
            for b in 1..=n.min(a) {
                binom[a][b] = binom[a - 1][b - 1] + if b < a { binom[a - 1][b] } else { 0 };
            }
        }
        GridIndex { n, m, binom }
    }

    pub fn len(&self) -> usize {
        self.binom[self.m as usize + self.n - 1][self.n - 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rank(&self, k: &[u64]) -> usize {
        let mut rank = 0;
        let mut remaining = self.m as usize;
        for (i, &ki) in k.iter().enumerate().take(self.n - 1) {
            let ki = ki as usize;
            let parts = self.n - i - 1;
            // compositions whose i-th part is smaller than k_i (hockey stick)
            rank += self.binom[remaining + parts][parts] - self.binom[remaining - ki + parts][parts];
            remaining -= ki;
        }
        rank
    }
}

/// One cell of the Kuhn triangulation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementarySimplex {
    base: GridPoint,
    perm: Vec<usize>,
}

impl ElementarySimplex {
    pub fn base(&self) -> &GridPoint {
        &self.base
    }

    pub fn steps(&self) -> &[usize] {
        &self.perm
    }

    pub fn resolution(&self) -> u64 {
        self.base.m
    }

    /// Grid coordinates of the `n` vertices, base first.
    pub fn vertex_coords(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::with_capacity(self.perm.len() + 1);
        let mut k = self.base.k.clone();
        out.push(k.clone());
        for &d in &self.perm {
            k[d] += 1;
            k[d + 1] -= 1;
            out.push(k.clone());
        }
        out
    }

    pub fn vertex_points(&self) -> Vec<GridPoint> {
        self.vertex_coords()
            .into_iter()
            .map(|k| GridPoint { k, m: self.base.m })
            .collect()
    }

    pub fn vertices(&self) -> Vec<CutSet> {
        self.vertex_coords()
            .iter()
            .map(|k| CutSet::from_grid(k, self.base.m))
            .collect()
    }

    /// Largest Euclidean distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let verts = self.vertex_coords();
        let sq = verts
            .iter()
            .tuple_combinations()
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| {
                        let d = *x as i64 - *y as i64;
                        (d * d) as u64
                    })
                    .sum::<u64>()
            })
            .max()
            .unwrap_or(0);
        (sq as f64).sqrt() / self.base.m as f64
    }

    pub fn barycenter(&self) -> CutSet {
        let verts = self.vertex_coords();
        let n = verts.len() as u64;
        let sums: Vec<u64> = (0..self.base.k.len())
            .map(|i| verts.iter().map(|v| v[i]).sum())
            .collect();
        CutSet::from_grid(&sums, n * self.base.m)
    }

    /// Range `[lo_j, hi_j]` of each interior cut `s_j` over the cell.
    pub fn cut_ranges(&self) -> (Vec<Rational>, Vec<Rational>) {
        let m = Rational::from_integer(self.base.m.into());
        let mut s = 0u64;
        let mut lo = Vec::with_capacity(self.perm.len());
        let mut hi = Vec::with_capacity(self.perm.len());
        for &kj in &self.base.k[..self.base.k.len() - 1] {
            s += kj;
            lo.push(Rational::from_integer(s.into()) / &m);
            hi.push(Rational::from_integer((s + 1).into()) / &m);
        }
        (lo, hi)
    }
}

/// Kuhn triangulation of the `(n-1)`-simplex at resolution `m`.
#[derive(Clone, Debug)]
pub struct KuhnTriangulation {
    n: usize,
    m: u64,
    perms: Vec<Vec<usize>>,
}

impl KuhnTriangulation {
    pub fn new(n: usize, m: u64) -> Result<Self, SimplexError> {
        check_args(n, m)?;
        let dirs = n - 1;
        Ok(KuhnTriangulation {
            n,
            m,
            perms: (0..dirs).permutations(dirs).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> u64 {
        self.m
    }

    pub fn vertices(&self) -> Compositions {
        compositions(self.n, self.m)
    }

    pub fn index(&self) -> GridIndex {
        GridIndex::new(self.n, self.m)
    }

    /// Cell bases: grid points with a positive last coordinate. Cells with
    /// distinct bases are disjoint work units for parallel consumers.
    pub fn bases(&self) -> impl Iterator<Item = GridPoint> + '_ {
        compositions(self.n, self.m - 1).map(move |mut p| {
            p.k[self.n - 1] += 1;
            p.m = self.m;
            p
        })
    }

    /// Cells sharing the given base. A step order is admissible when, for each
    /// zero coordinate `k_{d+1}` of the base, step `d + 1` precedes step `d`.
    pub fn cells_at(&self, base: &GridPoint) -> Vec<ElementarySimplex> {
        let k = &base.k;
        self.perms
            .iter()
            .filter(|perm| {
                let mut pos = vec![0; perm.len()];
                for (i, &d) in perm.iter().enumerate() {
                    pos[d] = i;
                }
                (0..perm.len().saturating_sub(1)).all(|d| k[d + 1] > 0 || pos[d + 1] < pos[d])
            })
            .map(|perm| ElementarySimplex {
                base: base.clone(),
                perm: perm.clone(),
            })
            .collect()
    }

    pub fn cells(&self) -> impl Iterator<Item = ElementarySimplex> + '_ {
        self.bases().flat_map(move |b| self.cells_at(&b))
    }

    /// `m^(n-1)`.
    pub fn cell_count(&self) -> u128 {
        (self.m as u128).pow(self.n as u32 - 1)
    }
}

/// Every elementary simplex of the resolution-`m` triangulation, lazily.
pub fn elementary_simplices(
    n: usize,
    m: u64,
) -> Result<impl Iterator<Item = ElementarySimplex>, SimplexError> {
    let tri = KuhnTriangulation::new(n, m)?;
    let bases: Vec<GridPoint> = tri.bases().collect();
    Ok(bases.into_iter().flat_map(move |b| tri.cells_at(&b)))
}

/// Doubling schedule `m0, 2 m0, ...` up to and including `mmax`.
pub fn refinement_schedule(m0: u64, mmax: u64) -> impl Iterator<Item = u64> {
    std::iter::successors(Some(m0), |&m| m.checked_mul(2)).take_while(move |&m| m <= mmax)
}
