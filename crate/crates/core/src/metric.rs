//! Finite metric spaces, cross-ratios and metric regularity estimators.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::Grid;
use crate::math::{self, Vec3};
use crate::spaces::alpha::AlphaPatch;
use crate::{Error, Result};

/// How distances between sample points are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    /// Euclidean distance of the ambient coordinates.
    Chordal,
    /// Great-circle distance; coordinates are unit vectors.
    Angular,
    /// Round sphere whose distances inside one cap follow the `d_alpha` formula.
    AlphaPatch(AlphaPatch),
    /// Explicit symmetric distance matrix (row-major, `n * n`).
    Matrix(Vec<f64>),
}

impl Metric {
    fn dominates_chordal(&self) -> bool {
        !matches!(self, Metric::Matrix(_))
    }
}

/// A finite set of points with a distance oracle.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    coords: Vec<Vec3>,
    n: usize,
    metric: Metric,
    diam: f64,
    adjacency: Option<Vec<Vec<u32>>>,
    grid: Option<Grid>,
    chordal_bound: bool,
}

impl FiniteMetricSpace {
    /// Space on ambient points with a coordinate-based metric.
    pub fn from_points(coords: Vec<Vec3>, metric: Metric) -> Result<Self> {
        if let Metric::Matrix(_) = metric {
            return Err(Error::InvalidInput("matrix metric needs from_matrix".into()));
        }
        let n = coords.len();
        let chordal_bound = metric.dominates_chordal();
        let grid = Some(Grid::new(&coords));
        let mut s = FiniteMetricSpace {
            coords,
            n,
            metric,
            diam: 0.0,
            adjacency: None,
            grid,
            chordal_bound,
        };
        s.diam = s.compute_diam();
        Ok(s)
    }

    /// Space given by an explicit distance matrix. Coordinates, when given,
    /// are kept for export only.
    pub fn from_matrix(n: usize, matrix: Vec<f64>, coords: Option<Vec<Vec3>>) -> Result<Self> {
        if matrix.len() != n * n {
            return Err(Error::InvalidInput("distance matrix has wrong size".into()));
        }
        for i in 0..n {
            if matrix[i * n + i] != 0.0 {
                return Err(Error::InvalidInput("nonzero diagonal".into()));
            }
            for j in 0..i {
                let d = matrix[i * n + j];
                if !(d >= 0.0) || d != matrix[j * n + i] {
                    return Err(Error::InvalidInput("matrix not symmetric nonnegative".into()));
                }
            }
        }
        let mut s = FiniteMetricSpace {
            coords: coords.unwrap_or_default(),
            n,
            metric: Metric::Matrix(matrix),
            diam: 0.0,
            adjacency: None,
            grid: None,
            chordal_bound: false,
        };
        s.diam = s.compute_diam();
        Ok(s)
    }

    /// Attach a mesh adjacency (used for connectivity certificates).
    pub fn with_adjacency(mut self, adjacency: Vec<Vec<u32>>) -> Result<Self> {
        if adjacency.len() != self.n {
            return Err(Error::InvalidInput("adjacency length mismatch".into()));
        }
        self.adjacency = Some(adjacency);
        Ok(self)
    }

    /// Declare that every distance is at least the chordal distance of the
    /// stored coordinates (e.g. graph-geodesic distances on a mesh), enabling
    /// the spatial index for matrix metrics.
    pub fn assume_chordal_lower_bound(mut self) -> Self {
        if self.coords.len() == self.n {
            self.chordal_bound = true;
            self.grid = Some(Grid::new(&self.coords));
        }
        self
    }

    fn compute_diam(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn coords(&self) -> &[Vec3] {
        &self.coords
    }

    pub fn adjacency(&self) -> Option<&[Vec<u32>]> {
        self.adjacency.as_deref()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match &self.metric {
            Metric::Chordal => math::dist(self.coords[i], self.coords[j]),
            Metric::Angular => math::angle_between(self.coords[i], self.coords[j]),
            Metric::AlphaPatch(p) => p.dist(self.coords[i], self.coords[j]),
            Metric::Matrix(m) => m[i * self.n + j],
        }
    }

    /// Distance between arbitrary ambient points (coordinate metrics only).
    pub fn dist_coords(&self, a: Vec3, b: Vec3) -> Option<f64> {
        match &self.metric {
            Metric::Chordal => Some(math::dist(a, b)),
            Metric::Angular => Some(math::angle_between(a, b)),
            Metric::AlphaPatch(p) => Some(p.dist(a, b)),
            Metric::Matrix(_) => None,
        }
    }

    /// Points `z` with `d(center, z) < radius` (open ball), sorted.
    pub fn ball(&self, center: usize, radius: f64) -> Vec<usize> {
        self.ball_filtered(center, radius, |d, r| d < r)
    }

    /// Points `z` with `d(center, z) <= radius` (closed ball), sorted.
    pub fn closed_ball(&self, center: usize, radius: f64) -> Vec<usize> {
        self.ball_filtered(center, radius, |d, r| d <= r)
    }

    fn ball_filtered(&self, center: usize, radius: f64, keep: impl Fn(f64, f64) -> bool) -> Vec<usize> {
        let mut out: Vec<usize> = match self.candidates(center, radius) {
            Some(c) => c.into_iter().filter(|&z| keep(self.dist(center, z), radius)).collect(),
            None => (0..self.n).filter(|&z| keep(self.dist(center, z), radius)).collect(),
        };
        out.sort_unstable();
        out
    }

    /// Superset of `{z : d(center, z) <= radius}` from the spatial index.
    pub fn candidates(&self, center: usize, radius: f64) -> Option<Vec<usize>> {
        if !self.chordal_bound {
            return None;
        }
        let g = self.grid.as_ref()?;
        g.candidates(self.coords[center], radius)
            .map(|v| v.into_iter().map(|i| i as usize).collect())
    }

    /// Minimum distance between two point sets.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> f64 {
        let mut best = f64::INFINITY;
        for &x in a {
            for &y in b {
                let d = self.dist(x, y);
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Diameter of a point subset.
    pub fn set_diam(&self, a: &[usize]) -> f64 {
        let mut d = 0.0f64;
        for (k, &x) in a.iter().enumerate() {
            for &y in &a[..k] {
                d = d.max(self.dist(x, y));
            }
        }
        d
    }

    /// Sampled check of the metric axioms; returns the worst relative
    /// triangle-inequality excess found.
    pub fn triangle_excess(&self, samples: usize, seed: u64) -> f64 {
        if self.n < 3 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let (i, j, k) = (
                rng.gen_range(0..self.n),
                rng.gen_range(0..self.n),
                rng.gen_range(0..self.n),
            );
            let lhs = self.dist(i, k);
            let rhs = self.dist(i, j) + self.dist(j, k);
            let scale = lhs.max(rhs).max(1e-300);
            worst = worst.max((lhs - rhs) / scale);
        }
        worst
    }

    /// Whether the mesh adjacency, if present, is connected.
    pub fn is_connected(&self) -> Option<bool> {
        let adj = self.adjacency.as_ref()?;
        Some(crate::graph::component_of(adj, 0, |_| true).len() == self.n || self.n == 0)
    }
}

/// Four point ids `(z1, z2, z3, z4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourTuple(pub [usize; 4]);

impl FourTuple {
    pub fn new(z1: usize, z2: usize, z3: usize, z4: usize) -> Self {
        FourTuple([z1, z2, z3, z4])
    }

    /// `z1 = z3` or `z2 = z4`: the cross-ratio is taken to be zero.
    pub fn is_degenerate(&self) -> bool {
        self.0[0] == self.0[2] || self.0[1] == self.0[3]
    }
}

/// Metric cross-ratio `d(z1,z3) d(z2,z4) / (d(z1,z4) d(z2,z3))` from the
/// six pairwise distances.
pub fn cross_ratio_from(d13: f64, d24: f64, d14: f64, d23: f64) -> Result<f64> {
    if d14 == 0.0 || d23 == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok((d13 * d24) / (d14 * d23))
}

pub fn cross_ratio(t: FourTuple, z: &FiniteMetricSpace) -> Result<f64> {
    let [a, b, c, d] = t.0;
    if a == d || b == c {
        return Err(Error::ZeroDenominator);
    }
    if t.is_degenerate() {
        return Ok(0.0);
    }
    cross_ratio_from(z.dist(a, c), z.dist(b, d), z.dist(a, d), z.dist(b, c))
}

/// The min-form cross-ratio `(d13 ∧ d24) / (d14 ∧ d23)`.
pub fn min_cross_ratio(t: FourTuple, z: &FiniteMetricSpace) -> Result<f64> {
    let [a, b, c, d] = t.0;
    if a == d || b == c {
        return Err(Error::ZeroDenominator);
    }
    if t.is_degenerate() {
        return Ok(0.0);
    }
    let num = z.dist(a, c).min(z.dist(b, d));
    let den = z.dist(a, d).min(z.dist(b, c));
    Ok(num / den)
}

/// Universal comparison function `3 (t ∨ √t)` bounding the min-form
/// cross-ratio by the cross-ratio.
pub fn eta0(t: f64) -> f64 {
    3.0 * t.max(math::sqrt(t))
}

/// A connected vertex subset of the mesh: the discrete stand-in for a continuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumSample {
    points: Vec<usize>,
    diam: f64,
}

impl ContinuumSample {
    /// Validates connectedness of the induced mesh subgraph.
    pub fn new(mut points: Vec<usize>, z: &FiniteMetricSpace) -> Result<Self> {
        points.sort_unstable();
        points.dedup();
        if points.len() < 2 {
            return Err(Error::DegenerateContinuum);
        }
        if let Some(&p) = points.iter().find(|&&p| p >= z.len()) {
            return Err(Error::UnknownVertex(p));
        }
        let adj = z.adjacency().ok_or(Error::InvalidInput("continuum needs mesh adjacency".into()))?;
        let mut inside = vec![false; z.len()];
        for &p in &points {
            inside[p] = true;
        }
        if crate::graph::component_of(adj, points[0], |v| inside[v]).len() != points.len() {
            return Err(Error::InvalidInput("continuum sample is not connected".into()));
        }
        let diam = z.set_diam(&points);
        Ok(ContinuumSample { points, diam })
    }

    /// Connected component of `center` inside the closed ball `B̄(center, radius)`.
    pub fn ball_component(z: &FiniteMetricSpace, center: usize, radius: f64) -> Result<Self> {
        let adj = z.adjacency().ok_or(Error::InvalidInput("continuum needs mesh adjacency".into()))?;
        let mut inside = vec![false; z.len()];
        for p in z.closed_ball(center, radius) {
            inside[p] = true;
        }
        let comp = crate::graph::component_of(adj, center, |v| inside[v]);
        Self::new(comp, z)
    }

    /// Connected component of `seed` among points with `d(center, ·) >= radius`.
    pub fn outside_component(z: &FiniteMetricSpace, center: usize, radius: f64, seed: usize) -> Result<Self> {
        let adj = z.adjacency().ok_or(Error::InvalidInput("continuum needs mesh adjacency".into()))?;
        let comp = crate::graph::component_of(adj, seed, |v| z.dist(center, v) >= radius);
        Self::new(comp, z)
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn contains(&self, p: usize) -> bool {
        self.points.binary_search(&p).is_ok()
    }
}

/// `dist(E, F) / (diam E ∧ diam F)`.
pub fn relative_distance(e: &ContinuumSample, f: &ContinuumSample, z: &FiniteMetricSpace) -> Result<f64> {
    let m = e.diam.min(f.diam);
    if m <= 0.0 {
        return Err(Error::DegenerateContinuum);
    }
    Ok(z.set_distance(&e.points, &f.points) / m)
}

/// Greedy cover count of a point set by balls of radius `rho`.
fn greedy_cover_count(z: &FiniteMetricSpace, pts: &[usize], rho: f64) -> usize {
    let mut covered = vec![false; pts.len()];
    let mut count = 0;
    for i in 0..pts.len() {
        if covered[i] {
            continue;
        }
        count += 1;
        for j in i..pts.len() {
            if !covered[j] && z.dist(pts[i], pts[j]) < rho {
                covered[j] = true;
            }
        }
    }
    count
}

/// Maximum over sampled balls `B(a, r)` of the greedy `(r/2)`-cover size.
/// All points serve as centers.
pub fn doubling_estimate(z: &FiniteMetricSpace, scales: &[f64]) -> Result<usize> {
    let centers: Vec<usize> = (0..z.len()).collect();
    doubling_estimate_on(z, scales, &centers)
}

/// As [`doubling_estimate`] with an explicit list of ball centers.
pub fn doubling_estimate_on(z: &FiniteMetricSpace, scales: &[f64], centers: &[usize]) -> Result<usize> {
    if scales.is_empty() {
        return Err(Error::EmptyScaleList);
    }
    for &r in scales {
        if !(r > 0.0) || (z.diam() > 0.0 && r > z.diam() * (1.0 + 1e-12)) {
            return Err(Error::BadRadius(r));
        }
    }
    let mut best = if z.is_empty() { 0 } else { 1 };
    for &r in scales {
        for &a in centers {
            let ball = z.ball(a, r);
            best = best.max(greedy_cover_count(z, &ball, r / 2.0));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlcEstimate {
    pub lambda1: f64,
    pub lambda2: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(PartialEq)]
struct Keyed(f64, usize);
impl Eq for Keyed {}
impl PartialOrd for Keyed {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Keyed {
    fn cmp(&self, o: &Self) -> Ordering {
        // min-heap on the key
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Smallest achievable `max value` along a mesh path from `src` to `dst`.
pub(crate) fn minimax_path(adj: &[Vec<u32>], value: impl Fn(usize) -> f64, src: usize, dst: usize) -> f64 {
    let mut best = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    best[src] = value(src);
    heap.push(Keyed(best[src], src));
    while let Some(Keyed(b, u)) = heap.pop() {
        if u == dst {
            return b;
        }
        if b > best[u] {
            continue;
        }
        for &w in &adj[u] {
            let w = w as usize;
            let nb = b.max(value(w));
            if nb < best[w] {
                best[w] = nb;
                heap.push(Keyed(nb, w));
            }
        }
    }
    f64::INFINITY
}

/// Empirical LLC constants from random ball configurations. For `LLC_1`,
/// points `x, y ∈ B(a, r)` are joined by the mesh path minimizing the largest
/// distance to `a`; for `LLC_2`, points outside `B(a, r)` by the path
/// maximizing the smallest distance to `a`.
pub fn llc_witnesses(z: &FiniteMetricSpace, trials: usize, seed: u64) -> Result<LlcEstimate> {
    let adj = z.adjacency().ok_or(Error::InvalidInput("LLC witnesses need mesh adjacency".into()))?;
    if z.is_connected() != Some(true) {
        return Err(Error::NotConnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut l1, mut l2) = (1.0f64, 1.0f64);
    let n = z.len();
    if n < 2 {
        return Ok(LlcEstimate { lambda1: 1.0, lambda2: 1.0, trials, seed });
    }
    for _ in 0..trials {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let r = z.dist(a, b) * rng.gen_range(0.5..1.5);
        if !(r > 0.0) || r > z.diam() {
            continue;
        }
        // LLC_1
        let ball = z.ball(a, r);
        if ball.len() >= 2 {
            let x = ball[rng.gen_range(0..ball.len())];
            let y = ball[rng.gen_range(0..ball.len())];
            if x != y {
                let m = minimax_path(adj, |v| z.dist(a, v), x, y);
                l1 = l1.max(m / r);
            }
        }
        // LLC_2: maximize the minimum distance to a == minimize its negation
        let outside: Vec<usize> = (0..n).filter(|&v| z.dist(a, v) >= r).collect();
        if outside.len() >= 2 {
            let x = outside[rng.gen_range(0..outside.len())];
            let y = outside[rng.gen_range(0..outside.len())];
            if x != y {
                let m = -minimax_path(adj, |v| -z.dist(a, v), x, y);
                if m > 0.0 {
                    l2 = l2.max(r / m);
                } else {
                    l2 = f64::INFINITY;
                }
            }
        }
    }
    Ok(LlcEstimate { lambda1: l1, lambda2: l2, trials, seed })
}

/// Exact check of weak `λ`-uniform perfectness of `m ⊆ Z` over the critical
/// radii. Returns the verdict and, on failure, a witness `(a, r)`.
pub fn weak_uniform_perfectness(m: &[usize], z: &FiniteMetricSpace, lambda: f64) -> (bool, Option<(usize, f64)>) {
    let diam_m = z.set_diam(m);
    for &a in m {
        let mut d: Vec<f64> = m.iter().filter(|&&x| x != a).map(|&x| z.dist(a, x)).filter(|&x| x > 0.0).collect();
        if d.is_empty() {
            continue;
        }
        d.sort_by(f64::total_cmp);
        for j in 0..d.len() {
            let r = lambda * d[j];
            if r > diam_m {
                break;
            }
            let next = d.get(j + 1).copied();
            match next {
                Some(nx) if nx < r => {}
                _ => return (false, Some((a, r))),
            }
        }
    }
    (true, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_points(xs.iter().map(|&x| [x, 0.0, 0.0]).collect(), Metric::Chordal).unwrap()
    }

    #[test]
    fn collinear_cross_ratio() {
        let z = line(&[0.0, 1.0, 2.0, 3.0]);
        let t = FourTuple::new(0, 1, 2, 3);
        assert!((cross_ratio(t, &z).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((cross_ratio(FourTuple::new(1, 0, 2, 3), &z).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(min_cross_ratio(t, &z).unwrap(), 2.0);
        assert!(2.0 <= eta0(4.0 / 3.0));
        assert_eq!(eta0(4.0 / 3.0), 4.0);
    }

    #[test]
    fn cross_ratio_brute_force_over_permutations() {
        // every permutation evaluated straight from the defining quotient
        let xs = [0.0, 1.0, 2.0, 3.0];
        let z = line(&xs);
        let perms = permutations4();
        for p in perms {
            let d = |i: usize, j: usize| (xs[p[i]] - xs[p[j]]).abs();
            let want = d(0, 2) * d(1, 3) / (d(0, 3) * d(1, 2));
            let got = cross_ratio(FourTuple(p), &z).unwrap();
            assert!((got - want).abs() <= 1e-15 * want.max(1.0));
        }
    }

    fn permutations4() -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let s = [a, b, c, d];
                        if (0..4).all(|i| (0..4).all(|j| i == j || s[i] != s[j])) {
                            out.push(s);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn square_cross_ratio() {
        let z = FiniteMetricSpace::from_points(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
            Metric::Chordal,
        )
        .unwrap();
        let t = FourTuple::new(0, 1, 2, 3);
        assert!((cross_ratio(t, &z).unwrap() - 2.0).abs() < 1e-15);
        assert!((min_cross_ratio(t, &z).unwrap() - math::sqrt(2.0)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_zero_denominator() {
        let z = line(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(cross_ratio(FourTuple::new(0, 1, 0, 3), &z).unwrap(), 0.0);
        assert_eq!(cross_ratio(FourTuple::new(0, 1, 2, 0), &z), Err(Error::ZeroDenominator));
        assert_eq!(min_cross_ratio(FourTuple::new(0, 1, 1, 3), &z), Err(Error::ZeroDenominator));
    }

    fn segment_with_adjacency(xs: Vec<f64>, gap_after: usize) -> FiniteMetricSpace {
        let n = xs.len();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n - 1 {
            if i + 1 != gap_after {
                adj[i].push(i as u32 + 1);
                adj[i + 1].push(i as u32);
            }
        }
        FiniteMetricSpace::from_points(xs.into_iter().map(|x| [x, 0.0, 0.0]).collect(), Metric::Chordal)
            .unwrap()
            .with_adjacency(adj)
            .unwrap()
    }

    #[test]
    fn relative_distance_of_segments() {
        let mut xs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        xs.extend((0..=20).map(|i| 3.0 + i as f64 * 0.1));
        let z = segment_with_adjacency(xs, 11);
        let e = ContinuumSample::new((0..=10).collect(), &z).unwrap();
        let f = ContinuumSample::new((11..32).collect(), &z).unwrap();
        assert!((relative_distance(&e, &f, &z).unwrap() - 2.0).abs() < 1e-12);
        let g = ContinuumSample::new((5..=10).collect(), &z).unwrap();
        assert_eq!(relative_distance(&e, &g, &z).unwrap(), 0.0);
        // a set straddling the gap is not a continuum
        assert!(ContinuumSample::new(vec![10, 11], &z).is_err());
    }

    #[test]
    fn doubling_single_point_and_errors() {
        let z = line(&[0.0]);
        assert_eq!(doubling_estimate_on(&z, &[1.0], &[0]).unwrap(), 1);
        assert_eq!(doubling_estimate(&z, &[]), Err(Error::EmptyScaleList));
    }

    #[test]
    fn wup_examples() {
        let z = line(&(0..=10).map(|i| i as f64 * 0.1).collect::<Vec<_>>());
        let all: Vec<usize> = (0..=10).collect();
        assert!(weak_uniform_perfectness(&all, &z, 4.0).0);
        let two = line(&[0.0, 1.0]);
        assert!(weak_uniform_perfectness(&[0, 1], &two, 4.0).0);
        let geo = line(&(0..12).map(|k| libm::pow(2.0, -(k as f64))).collect::<Vec<_>>());
        let (ok, w) = weak_uniform_perfectness(&(0..12).collect::<Vec<_>>(), &geo, 1.5);
        assert!(!ok);
        let (a, r) = w.unwrap();
        // witness: a point within r/λ exists and none in the annulus
        let inner = (0..12).any(|m| m != a && geo.dist(a, m) <= r / 1.5);
        let ann = (0..12).any(|m| geo.dist(a, m) > r / 1.5 && geo.dist(a, m) < r);
        assert!(inner && !ann);
    }

    #[test]
    fn wup_matches_radius_sweep_oracle() {
        // brute force over a fine grid of radii against the critical-radius check
        let pts = [0.0, 0.05, 0.3, 0.32, 0.9, 1.0];
        let z = line(&pts);
        let m: Vec<usize> = (0..pts.len()).collect();
        for &lambda in &[1.2, 2.0, 3.0, 8.0] {
            let mut brute = true;
            for &a in &m {
                for step in 1..=20000 {
                    let r = step as f64 / 20000.0;
                    let hyp = m.iter().any(|&x| x != a && z.dist(a, x) <= r / lambda);
                    let concl = m.iter().any(|&x| z.dist(a, x) > r / lambda && z.dist(a, x) < r);
                    if hyp && !concl {
                        brute = false;
                    }
                }
            }
            assert_eq!(weak_uniform_perfectness(&m, &z, lambda).0, brute, "lambda {lambda}");
        }
    }
}
