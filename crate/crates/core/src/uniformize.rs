//! Discrete uniformization: approximations of a space paired with the
//! sphere approximations induced by circle packings of the same graph,
//! plus distortion and modulus diagnostics of the resulting vertex maps.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::approx::{vertex_set_of, ApproximationLadder, KApproximation};
use crate::math::{self, Vec3};
use crate::metric::{cross_ratio_from, ContinuumSample, FiniteMetricSpace};
use crate::modulus::{annulus_modulus, mod_q};
use crate::packing::{mobius_normalize, pack_triangulation, SphereTriangulation, SphericalPacking};
use crate::{Error, Result};

/// Vertex map from a sample of `X` to the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMap {
    /// Point ids in `X`.
    pub domain: Vec<usize>,
    pub image: Vec<Vec3>,
    pub level: usize,
    pub triple: [usize; 3],
    /// Mesh size of the approximation the map came from.
    pub mesh: f64,
}

impl DiscreteMap {
    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// `X` point ids to their image, restricted to a copy of `X` (used for
    /// identity and similarity controls).
    pub fn from_points(x: &FiniteMetricSpace, domain: Vec<usize>, f: impl Fn(Vec3) -> Vec3) -> Self {
        let image = domain.iter().map(|&i| f(x.coords()[i])).collect();
        DiscreteMap { domain, image, level: 0, triple: [0, 0, 0], mesh: 0.0 }
    }

    fn position(&self, x: usize) -> Option<usize> {
        self.domain.iter().position(|&d| d == x)
    }
}

/// Piecewise-linear nondecreasing function through `(0, 0)` and its knots,
/// constant after the last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub knots: Vec<(f64, f64)>,
}

impl Envelope {
    /// Least nondecreasing function on the sample abscissae dominating
    /// every pair.
    pub fn upper(pairs: &[(f64, f64)]) -> Self {
        let mut p: Vec<(f64, f64)> = pairs.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut knots: Vec<(f64, f64)> = Vec::with_capacity(p.len());
        let mut m = 0.0f64;
        for (x, y) in p {
            m = m.max(y);
            match knots.last_mut() {
                Some(k) if k.0 == x => k.1 = m,
                _ => knots.push((x, m)),
            }
        }
        Envelope { knots }
    }

    /// Greatest nondecreasing function on the sample abscissae lying below
    /// every pair.
    pub fn lower(pairs: &[(f64, f64)]) -> Self {
        let mut p: Vec<(f64, f64)> = pairs.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut knots: Vec<(f64, f64)> = Vec::with_capacity(p.len());
        let mut m = f64::INFINITY;
        for &(x, y) in p.iter().rev() {
            m = m.min(y);
            match knots.last_mut() {
                Some(k) if k.0 == x => k.1 = m,
                _ => knots.push((x, m)),
            }
        }
        knots.reverse();
        Envelope { knots }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        if k.is_empty() || t <= 0.0 {
            return 0.0;
        }
        let i = k.partition_point(|p| p.0 < t);
        if i == k.len() {
            return k[i - 1].1;
        }
        if k[i].0 == t {
            return k[i].1;
        }
        let (x0, y0) = if i == 0 { (0.0, 0.0) } else { k[i - 1] };
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.knots.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1)
    }

    /// `sup |η(t) - t| / t` over knots with `t` in `[lo, hi]`.
    pub fn max_relative_deviation(&self, lo: f64, hi: f64) -> f64 {
        self.knots
            .iter()
            .filter(|k| k.0 >= lo && k.0 <= hi)
            .map(|&(t, y)| (y - t).abs() / t)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub count: usize,
    /// (input, output) values.
    pub pairs: Vec<(f64, f64)>,
    /// Dominates `output` as a function of `input`.
    pub envelope: Envelope,
    /// Dominates `input` as a function of `output`.
    pub inverse: Envelope,
    pub seed: u64,
}

impl DistortionReport {
    fn new(pairs: Vec<(f64, f64)>, seed: u64) -> Self {
        let inv: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
        DistortionReport {
            count: pairs.len(),
            envelope: Envelope::upper(&pairs),
            inverse: Envelope::upper(&inv),
            pairs,
            seed,
        }
    }

    /// Largest `|out / in - 1|`.
    pub fn max_ratio_error(&self) -> f64 {
        self.pairs.iter().filter(|p| p.0 > 0.0).map(|&(a, b)| (b / a - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Three vertices spread out over the sample: the first vertex, the vertex
/// closest to a third of the way around from it, and the vertex farthest
/// from both.
pub fn spread_triple(a: &KApproximation, z: &FiniteMetricSpace) -> [usize; 3] {
    let n = a.len();
    let d = |u: usize, v: usize| z.dist(a.p[u], a.p[v]);
    let v1 = 0;
    let far = (0..n).map(|v| d(v1, v)).fold(0.0, f64::max);
    let target = far * math::sqrt(3.0) / 2.0;
    let v2 = (0..n).min_by(|&u, &v| (d(v1, u) - target).abs().total_cmp(&(d(v1, v) - target).abs())).unwrap_or(0);
    let v3 = (0..n).max_by(|&u, &v| d(v1, u).min(d(v2, u)).total_cmp(&d(v1, v).min(d(v2, v)))).unwrap_or(0);
    [v1, v2, v3]
}

/// Packs the approximation's triangulation, normalizes on `triple` and
/// pairs each basepoint with its circle center.
pub fn uniformize_level(a: &KApproximation, z: &FiniteMetricSpace, triple: [usize; 3], tol: f64) -> Result<(DiscreteMap, SphericalPacking)> {
    let tris = a.graph.triangles().ok_or(Error::NotATriangulation("approximation graph carries no triangles".into()))?;
    for &v in &triple {
        if v >= a.len() {
            return Err(Error::UnknownVertex(v));
        }
    }
    let quarter = z.diam() / 4.0;
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        if z.dist(a.p[triple[i]], a.p[triple[j]]) < quarter {
            return Err(Error::TripleTooClose);
        }
    }
    let t = SphereTriangulation::new(a.len(), tris.to_vec())?;
    let packing = mobius_normalize(&pack_triangulation(&t, tol)?, triple)?;
    let map = DiscreteMap {
        domain: a.p.clone(),
        image: packing.centers.clone(),
        level: 0,
        triple,
        mesh: a.mesh_size()?,
    };
    Ok((map, packing))
}

fn euclid(a: Vec3, b: Vec3) -> f64 {
    math::dist(a, b)
}

/// Index of the domain point whose distance from `i` is closest to `rho`.
fn at_distance(x: &FiniteMetricSpace, m: &DiscreteMap, i: usize, rho: f64) -> usize {
    let di = m.domain[i];
    (0..m.len())
        .filter(|&j| j != i)
        .min_by(|&a, &b| (x.dist(di, m.domain[a]) - rho).abs().total_cmp(&(x.dist(di, m.domain[b]) - rho).abs()))
        .unwrap_or(i)
}

const DECADES: i32 = 3;

/// Samples distinct 4-tuples of the domain, stratified by the decade of the
/// input cross-ratio over `[1e-3, 1e3)`, and records (input, output)
/// cross-ratio pairs. The output side uses the Euclidean distance of the
/// image points.
pub fn distortion_fit(x: &FiniteMetricSpace, m: &DiscreteMap, tuples: usize, seed: u64) -> Result<DistortionReport> {
    let n = m.len();
    if n < 4 {
        return Err(Error::DomainTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diam = x.diam();
    let buckets = (2 * DECADES) as usize;
    let quota = tuples.div_ceil(buckets);
    let mut filled = vec![0usize; buckets];
    let mut pairs = Vec::with_capacity(tuples);
    let din = |a: usize, b: usize| x.dist(m.domain[a], m.domain[b]);
    let dout = |a: usize, b: usize| euclid(m.image[a], m.image[b]);
    let mut attempts = 0;
    while pairs.len() < tuples && attempts < 50 * tuples.max(1) {
        attempts += 1;
        let mut t = [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)];
        let mode = rng.gen_range(0..3);
        if mode > 0 {
            let rho = diam * math::powf(10.0, -rng.gen_range(0.0..2.5));
            // z3 near z1 makes the cross-ratio small, z4 near z1 makes it large
            let k = if mode == 1 { 2 } else { 3 };
            t[k] = at_distance(x, m, t[0], rho);
        }
        if (0..4).any(|i| (0..i).any(|j| t[i] == t[j])) {
            continue;
        }
        let [a, b, c, d] = t;
        let cin = cross_ratio_from(din(a, c), din(b, d), din(a, d), din(b, c))?;
        let cout = cross_ratio_from(dout(a, c), dout(b, d), dout(a, d), dout(b, c))?;
        let dec = math::floor(math::log10(cin)) as i32 + DECADES;
        if !(0..2 * DECADES).contains(&dec) || filled[dec as usize] >= quota {
            continue;
        }
        filled[dec as usize] += 1;
        pairs.push((cin, cout));
    }
    Ok(DistortionReport::new(pairs, seed))
}

/// Triple-ratio analogue of [`distortion_fit`]: pairs
/// `(d(x1,x2)/d(x1,x3), d(f x1, f x2)/d(f x1, f x3))`.
pub fn qs_distortion(x: &FiniteMetricSpace, m: &DiscreteMap, triples: usize, seed: u64) -> Result<DistortionReport> {
    let n = m.len();
    if n < 3 {
        return Err(Error::DomainTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diam = x.diam();
    let mut pairs = Vec::with_capacity(triples);
    let mut attempts = 0;
    while pairs.len() < triples && attempts < 50 * triples.max(1) {
        attempts += 1;
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        if rng.gen_bool(0.5) {
            j = at_distance(x, m, i, diam * math::powf(10.0, -rng.gen_range(0.0..2.0)));
        }
        let k = rng.gen_range(0..n);
        if i == j || j == k || i == k {
            continue;
        }
        let rin = x.dist(m.domain[i], m.domain[j]) / x.dist(m.domain[i], m.domain[k]);
        let rout = euclid(m.image[i], m.image[j]) / euclid(m.image[i], m.image[k]);
        pairs.push((rin, rout));
    }
    Ok(DistortionReport::new(pairs, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportReport {
    /// (relative distance in `X`, relative distance of the images).
    pub rows: Vec<(f64, f64)>,
    /// Nondecreasing lower envelope of the rows.
    pub envelope: Envelope,
    pub positive: bool,
}

fn image_set(m: &DiscreteMap, e: &ContinuumSample) -> Result<Vec<Vec3>> {
    e.points()
        .iter()
        .map(|&p| m.position(p).map(|i| m.image[i]).ok_or(Error::InvalidInput("continuum leaves the map's domain".into())))
        .collect()
}

fn euclid_diam(a: &[Vec3]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..a.len() {
        for j in 0..i {
            d = d.max(euclid(a[i], a[j]));
        }
    }
    d
}

/// Relative distances of continuum pairs before and after the map.
pub fn relative_distance_transport(x: &FiniteMetricSpace, m: &DiscreteMap, pairs: &[(ContinuumSample, ContinuumSample)]) -> Result<TransportReport> {
    let mut rows = Vec::with_capacity(pairs.len());
    for (e, f) in pairs {
        let din = crate::metric::relative_distance(e, f, x)?;
        let (fe, ff) = (image_set(m, e)?, image_set(m, f)?);
        let dd = euclid_diam(&fe).min(euclid_diam(&ff));
        if dd <= 0.0 {
            return Err(Error::DegenerateContinuum);
        }
        let mut dist = f64::INFINITY;
        for &a in &fe {
            for &b in &ff {
                dist = dist.min(euclid(a, b));
            }
        }
        rows.push((din, dist / dd));
    }
    let envelope = Envelope::lower(&rows);
    let positive = envelope.knots.iter().all(|k| k.1 > 0.0);
    Ok(TransportReport { rows, envelope, positive })
}

/// Preconditions for [`two_scale_consistency`], in combinatorial hops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoScaleOptions {
    /// Required `k(V_E, V_F)`.
    pub min_sep: u32,
    /// Pairs with a continuum inside some `St_L(v)` for this `L` are dropped;
    /// zero disables the check.
    pub star_l: u32,
}

impl TwoScaleOptions {
    /// `min_sep = 4K`, `star_l = K`.
    pub fn from_k(k: u32) -> Self {
        TwoScaleOptions { min_sep: 4 * k, star_l: k }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoScaleRow {
    pub pair: usize,
    /// `mod_Q(V_E, V_F)` per ladder level.
    pub values: Vec<f64>,
    /// Largest over smallest value.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoScaleReport {
    pub rows: Vec<TwoScaleRow>,
    /// (pair, level) where a precondition failed; the pair is skipped.
    pub dropped: Vec<(usize, usize)>,
    pub c_hat: f64,
    pub q: f64,
    pub options: TwoScaleOptions,
}

/// Whether every point of `e` lies in `St_l(v)` for one common `v`.
fn inside_some_star(a: &KApproximation, e: &[usize], l: u32, index: &[Vec<u32>]) -> bool {
    let mut common: Option<Vec<bool>> = None;
    for &p in e {
        let src: Vec<usize> = index[p].iter().map(|&v| v as usize).collect();
        let hops = a.graph.multi_bfs(&src, l.saturating_sub(1));
        let reach: Vec<bool> = hops.iter().map(|&h| h < l).collect();
        let c = match common {
            None => reach,
            Some(c) => c.iter().zip(&reach).map(|(x, y)| *x && *y).collect(),
        };
        if !c.iter().any(|&x| x) {
            return false;
        }
        common = Some(c);
    }
    common.is_some()
}

/// `mod_Q(V_E, V_F)` across the ladder for each pair; `Ĉ` is the largest
/// ratio between levels over the pairs that meet the preconditions at
/// every level.
pub fn two_scale_consistency(
    z: &FiniteMetricSpace,
    ladder: &ApproximationLadder,
    pairs: &[(ContinuumSample, ContinuumSample)],
    q: f64,
    options: TwoScaleOptions,
    tol: f64,
) -> Result<TwoScaleReport> {
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    let indices: Vec<Vec<Vec<u32>>> = ladder.levels.iter().map(|a| a.point_index(z.len())).collect();
    'pairs: for (pi, (e, f)) in pairs.iter().enumerate() {
        let mut values = Vec::with_capacity(ladder.levels.len());
        for (li, a) in ladder.levels.iter().enumerate() {
            let (ve, vf) = (vertex_set_of(e, a), vertex_set_of(f, a));
            let hops = a.graph.multi_bfs(&ve, options.min_sep);
            let sep = vf.iter().map(|&v| hops[v]).min().unwrap_or(u32::MAX);
            let in_star = options.star_l > 0
                && (inside_some_star(a, e.points(), options.star_l, &indices[li]) || inside_some_star(a, f.points(), options.star_l, &indices[li]));
            if sep < options.min_sep || in_star {
                dropped.push((pi, li));
                continue 'pairs;
            }
            values.push(mod_q(&a.graph, &ve, &vf, q, tol)?.value);
        }
        let hi = values.iter().copied().fold(0.0, f64::max);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(TwoScaleRow { pair: pi, values, ratio: hi / lo });
    }
    let c_hat = rows.iter().map(|r| r.ratio).fold(1.0, f64::max);
    Ok(TwoScaleReport { rows, dropped, c_hat, q, options })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallTrace {
    pub center: usize,
    pub radius: f64,
    /// Annulus modulus per ladder level.
    pub values: Vec<f64>,
    /// Last value exceeds the previous one by more than 5%.
    pub increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuffReport {
    pub lambda: f64,
    pub traces: Vec<BallTrace>,
    /// Largest last-level value.
    pub c_hat: f64,
    pub flagged: usize,
}

/// Growth that flags a trace as still increasing.
pub const INCREASE_FACTOR: f64 = 1.05;

/// Annulus moduli `mod_2(V_B, V_{Z \ λB})` across the ladder for the
/// given balls.
pub fn suff_condition_scan_at(z: &FiniteMetricSpace, ladder: &ApproximationLadder, lambda: f64, balls: &[(usize, f64)], tol: f64) -> Result<SuffReport> {
    let mut traces = Vec::with_capacity(balls.len());
    for &(center, radius) in balls {
        let values = ladder
            .levels
            .iter()
            .map(|a| annulus_modulus(a, z, center, radius, lambda, tol).map(|r| r.value))
            .collect::<Result<Vec<f64>>>()?;
        let increasing = values.len() >= 2 && values[values.len() - 1] > values[values.len() - 2] * INCREASE_FACTOR;
        traces.push(BallTrace { center, radius, values, increasing });
    }
    let c_hat = traces.iter().filter_map(|t| t.values.last().copied()).fold(0.0, f64::max);
    let flagged = traces.iter().filter(|t| t.increasing).count();
    Ok(SuffReport { lambda, traces, c_hat, flagged })
}

/// [`suff_condition_scan_at`] over `count` random balls with radii uniform
/// in `[diam/8, diam/4]`.
pub fn suff_condition_scan(z: &FiniteMetricSpace, ladder: &ApproximationLadder, lambda: f64, count: usize, seed: u64, tol: f64) -> Result<SuffReport> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidInput("lambda must exceed 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = z.diam();
    let balls: Vec<(usize, f64)> = (0..count).map(|_| (rng.gen_range(0..z.len()), rng.gen_range(d / 8.0..=d / 4.0))).collect();
    suff_condition_scan_at(z, ladder, lambda, &balls, tol)
}

/// Largest angular distance between the images of shared domain points of
/// consecutive maps.
pub fn level_convergence(maps: &[DiscreteMap]) -> Vec<f64> {
    maps.windows(2)
        .map(|w| {
            let next: BTreeMap<usize, Vec3> = w[1].domain.iter().copied().zip(w[1].image.iter().copied()).collect();
            w[0].domain
                .iter()
                .zip(&w[0].image)
                .filter_map(|(d, &y)| next.get(d).map(|&y2| math::angle_between(y, y2)))
                .fold(0.0, f64::max)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::build_approximation;
    use crate::spaces::round_sphere;

    #[test]
    fn envelope_dominates() {
        let pairs = vec![(1.0, 2.0), (0.5, 0.1), (2.0, 1.5), (3.0, 4.0)];
        let e = Envelope::upper(&pairs);
        assert!(e.is_nondecreasing());
        for &(x, y) in &pairs {
            assert!(e.eval(x) >= y);
        }
        let l = Envelope::lower(&pairs);
        for &(x, y) in &pairs {
            assert!(l.eval(x) <= y);
        }
        assert_eq!(e.eval(0.25), 0.05);
    }

    #[test]
    fn similarity_is_exact() {
        let ms = round_sphere(2);
        let z = ms.space().unwrap();
        let m = DiscreteMap::from_points(&z, (0..z.len()).collect(), |p| math::scale(p, 2.5));
        let r = distortion_fit(&z, &m, 600, 1).unwrap();
        assert!(r.count > 300);
        assert!(r.max_ratio_error() < 1e-12);
    }

    #[test]
    fn round_sphere_level() {
        let ms = round_sphere(3);
        let z = ms.space().unwrap();
        let a = build_approximation(&ms, &z, 2).unwrap();
        let tr = spread_triple(&a, &z);
        let (m, p) = uniformize_level(&a, &z, tr, 1e-12).unwrap();
        assert_eq!(m.len(), 162);
        assert!(p.tangency_residual(&SphereTriangulation::new(162, a.graph.triangles().unwrap().to_vec()).unwrap()) < 1e-9);
        let (m2, _) = uniformize_level(&a, &z, tr, 1e-12).unwrap();
        assert_eq!(m, m2);
        assert!(matches!(uniformize_level(&a, &z, [0, a.graph.neighbors(0)[0] as usize, 5], 1e-12), Err(Error::TripleTooClose)));
    }
}
