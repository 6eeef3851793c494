//! K-approximations: graphs with basepoints, local scales and covers.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{component_of, ApproxGraph};
use crate::metric::{ContinuumSample, FiniteMetricSpace};
use crate::spaces::MeshedSphere;
use crate::{Error, Result};

/// Largest `K` the verifier searches before giving up.
pub const K_MAX: u32 = 64;

/// Default ratio between the cover ball radius and the local scale.
pub const COVER_FACTOR: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    Valence,
    Cover,
    ScaleRatio,
    Incidence,
    Thickening,
    Connection,
}

/// Lower bound on `K` forced by one axiom, with the vertices attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomBound {
    pub axiom: Axiom,
    pub k: u32,
    /// Worst raw quantity measured (ratio or hop count).
    pub value: f64,
    pub witness: Vec<usize>,
}

/// Failures that no choice of `K` can repair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    /// Axiom (2): a point of `B(p_v, r_v)` is missing from `U_v`.
    BallNotInCover { v: usize, point: usize },
    /// Axiom (3): adjacent vertices with disjoint cover sets.
    AdjacentCoversDisjoint { u: usize, v: usize },
    NonPositiveScale { v: usize },
    /// A point of `Z` lies in no `U_v`.
    NotACover { point: usize },
    /// The axiom needs `K` above [`K_MAX`].
    CapExceeded { axiom: Axiom, v: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KReport {
    /// Smallest `K` satisfying all five axioms, if any does.
    pub k: Option<u32>,
    pub bounds: Vec<AxiomBound>,
    pub violations: Vec<Violation>,
}

/// `(G, p, r, U)` on a finite sample `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KApproximation {
    pub graph: ApproxGraph,
    pub p: Vec<usize>,
    pub r: Vec<f64>,
    /// Sorted point ids of each `U_v`.
    pub cover: Vec<Vec<usize>>,
    pub report: Option<KReport>,
}

impl KApproximation {
    pub fn new(graph: ApproxGraph, p: Vec<usize>, r: Vec<f64>, mut cover: Vec<Vec<usize>>) -> Result<Self> {
        let n = graph.len();
        if p.len() != n || r.len() != n || cover.len() != n {
            return Err(Error::InvalidInput("approximation arrays differ in length".into()));
        }
        for c in &mut cover {
            c.sort_unstable();
            c.dedup();
        }
        Ok(KApproximation { graph, p, r, cover, report: None })
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn k_report(&self) -> Option<u32> {
        self.report.as_ref().and_then(|r| r.k)
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// For each point of `Z`, the vertices whose cover set contains it.
    pub fn point_index(&self, npoints: usize) -> Vec<Vec<u32>> {
        let mut idx = vec![Vec::new(); npoints];
        for (v, c) in self.cover.iter().enumerate() {
            for &z in c {
                if z < npoints {
                    idx[z].push(v as u32);
                }
            }
        }
        idx
    }

    /// `St_L(v)`: union of `U_u` over `k(u, v) < L`, sorted.
    pub fn star(&self, v: usize, l: f64) -> Result<Vec<usize>> {
        self.check(v)?;
        let verts = self.graph.ball(v, l)?;
        Ok(self.union_of(&verts))
    }

    /// `N_s(A)` in the graph.
    pub fn neighborhood(&self, set: &[usize], s: f64) -> Result<Vec<usize>> {
        self.graph.neighborhood(set, s)
    }

    pub fn union_of(&self, verts: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = verts.iter().flat_map(|&u| self.cover[u].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `mesh(A) = max r_v`.
    pub fn mesh_size(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(self.r.iter().copied().fold(0.0, f64::max))
    }

    /// Vertices whose cover set meets `e`.
    pub fn vertex_set_of_points(&self, e: &[usize]) -> Vec<usize> {
        let mut inside = Vec::new();
        let max = e.iter().copied().max().map_or(0, |m| m + 1);
        inside.resize(max, false);
        for &z in e {
            inside[z] = true;
        }
        (0..self.len())
            .filter(|&v| self.cover[v].iter().any(|&z| z < max && inside[z]))
            .collect()
    }

    /// Cover multiplicity: the largest number of cover sets sharing a point.
    pub fn multiplicity(&self, npoints: usize) -> usize {
        self.point_index(npoints).iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// `V_E`: vertices whose cover set meets the continuum `E`.
pub fn vertex_set_of(e: &ContinuumSample, a: &KApproximation) -> Vec<usize> {
    a.vertex_set_of_points(e.points())
}

/// Maximal `r`-separated subset of `Z`, scanning points in a seeded order.
pub fn greedy_net(z: &FiniteMetricSpace, r: f64, seed: u64) -> Result<Vec<usize>> {
    if !(r > 0.0) {
        return Err(Error::BadRadius(r));
    }
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut blocked = vec![false; z.len()];
    let mut net = Vec::new();
    for x in order {
        if blocked[x] {
            continue;
        }
        net.push(x);
        for y in z.ball(x, r) {
            blocked[y] = true;
        }
    }
    net.sort_unstable();
    Ok(net)
}

/// Approximation of `Z` by the level-`level` mesh of `ms` with the default
/// cover factor.
pub fn build_approximation(ms: &MeshedSphere, z: &FiniteMetricSpace, level: usize) -> Result<KApproximation> {
    build_approximation_with(ms, z, level, COVER_FACTOR)
}

/// Vertices are the level's mesh vertices, `p(v) = v`, `r(v)` the longest
/// incident edge and `U_v = B(v, c r(v))` in `Z`.
pub fn build_approximation_with(ms: &MeshedSphere, z: &FiniteMetricSpace, level: usize, cover_factor: f64) -> Result<KApproximation> {
    let tris = ms.triangles(level)?;
    let n = ms.count(level)?;
    if z.len() < n {
        return Err(Error::InvalidInput("sample smaller than the approximation level".into()));
    }
    let graph = ApproxGraph::from_sphere_triangulation(n, tris)?;
    let r: Vec<f64> = (0..n)
        .map(|v| graph.neighbors(v).iter().map(|&u| z.dist(v, u as usize)).fold(0.0, f64::max))
        .collect();
    let cover = (0..n).map(|v| z.ball(v, cover_factor * r[v])).collect();
    let mut a = KApproximation::new(graph, (0..n).collect(), r, cover)?;
    a.report = Some(verify_k_approximation(&a, z));
    Ok(a)
}

/// Smallest integer `K` with `x < K` (for ratios that must be strictly below `K`).
fn strict_ceiling(x: f64) -> u32 {
    if !(x >= 0.0) {
        return 1;
    }
    let f = libm::floor(x) + 1.0;
    if f > K_MAX as f64 {
        K_MAX + 1
    } else {
        f as u32
    }
}

fn ceiling(x: f64) -> u32 {
    let f = libm::ceil(x).max(1.0);
    if f > K_MAX as f64 {
        K_MAX + 1
    } else {
        f as u32
    }
}

fn raise(b: &mut AxiomBound, k: u32, w: &[usize]) {
    raise_by(b, k, k as f64, w);
}

fn raise_by(b: &mut AxiomBound, k: u32, value: f64, w: &[usize]) {
    if value > b.value {
        b.value = value;
        b.witness = w.to_vec();
    }
    b.k = b.k.max(k);
}

/// Smallest `K` satisfying axioms (1)-(5) on the sample, with per-axiom
/// lower bounds. Axiom (5) uses the mesh adjacency of `Z` and is skipped
/// when `Z` has none.
pub fn verify_k_approximation(a: &KApproximation, z: &FiniteMetricSpace) -> KReport {
    let n = a.len();
    let mut violations = Vec::new();
    let mk = |axiom| AxiomBound { axiom, k: 1, value: 0.0, witness: Vec::new() };
    let mut b1 = mk(Axiom::Valence);
    let mut b2 = mk(Axiom::Cover);
    let mut b3 = mk(Axiom::ScaleRatio);
    let mut b3b = mk(Axiom::Incidence);
    let mut b4 = mk(Axiom::Thickening);
    let mut b5 = mk(Axiom::Connection);

    for v in 0..n {
        raise(&mut b1, a.graph.neighbors(v).len().max(1) as u32, &[v]);
    }
    // (2)
    for v in 0..n {
        let (p, r) = (a.p[v], a.r[v]);
        if !(r > 0.0) || p >= z.len() {
            violations.push(Violation::NonPositiveScale { v });
            continue;
        }
        if let Some(&pt) = z.ball(p, r).iter().find(|&&x| a.cover[v].binary_search(&x).is_err()) {
            violations.push(Violation::BallNotInCover { v, point: pt });
        }
        let worst = a.cover[v].iter().map(|&x| z.dist(p, x)).fold(0.0, f64::max);
        raise_by(&mut b2, strict_ceiling(worst / r), worst / r, &[v]);
    }
    // cover property
    let index = a.point_index(z.len());
    if let Some(pt) = index.iter().position(Vec::is_empty) {
        violations.push(Violation::NotACover { point: pt });
    }
    // (3) adjacency
    for (u, v) in a.graph.edges() {
        if !sorted_intersect(&a.cover[u], &a.cover[v]) {
            violations.push(Violation::AdjacentCoversDisjoint { u, v });
        }
        if a.r[u] > 0.0 && a.r[v] > 0.0 {
            let ratio = (a.r[u] / a.r[v]).max(a.r[v] / a.r[u]);
            // guard against ratios like 2.0000000000000004 from rounding
            raise_by(&mut b3, ceiling(ratio * (1.0 - 1e-12)), ratio, &[u, v]);
        }
    }
    // (3) incidence: overlapping covers are combinatorially close
    let mut overlap: Vec<Vec<u32>> = vec![Vec::new(); n];
    for vs in &index {
        for &u in vs {
            overlap[u as usize].extend(vs.iter().copied().filter(|&w| w > u));
        }
    }
    for (u, l) in overlap.iter_mut().enumerate() {
        l.sort_unstable();
        l.dedup();
        if l.is_empty() {
            continue;
        }
        let d = a.graph.bfs(u, K_MAX);
        for &w in l.iter() {
            let k = d[w as usize];
            let need = if k == u32::MAX { K_MAX + 1 } else { k + 1 };
            raise(&mut b3b, need, &[u, w as usize]);
        }
    }
    let base = [b1.k, b2.k, b3.k, b3b.k].into_iter().max().unwrap_or(1);

    // (4) and (5) are monotone in K; search each vertex upward from `base`.
    let adjz = z.adjacency();
    let mut in_star = vec![false; z.len()];
    let mut in_nbhd = vec![false; z.len()];
    for v in 0..n {
        if !(a.r[v] > 0.0) || a.cover[v].is_empty() {
            continue;
        }
        let mut k = base.max(b4.k).max(b5.k).min(K_MAX + 1);
        let dist = a.graph.bfs(v, K_MAX);
        loop {
            if k > K_MAX {
                violations.push(Violation::CapExceeded { axiom: Axiom::Thickening, v });
                break;
            }
            let mut star_pts = Vec::new();
            for u in 0..n {
                if dist[u] < k {
                    for &x in &a.cover[u] {
                        if !in_star[x] {
                            in_star[x] = true;
                            star_pts.push(x);
                        }
                    }
                }
            }
            let s = a.r[v] / k as f64;
            let mut nb_pts = Vec::new();
            let mut ok4 = true;
            'outer: for &x in &a.cover[v] {
                for y in z.ball(x, s) {
                    if !in_nbhd[y] {
                        in_nbhd[y] = true;
                        nb_pts.push(y);
                        if !in_star[y] {
                            ok4 = false;
                            break 'outer;
                        }
                    }
                }
            }
            let ok5 = ok4
                && match adjz {
                    None => true,
                    Some(adj) => {
                        let comp = component_of(adj, a.cover[v][0], |x| in_star[x]);
                        a.cover[v].iter().all(|x| comp.binary_search(x).is_ok())
                    }
                };
            for x in star_pts {
                in_star[x] = false;
            }
            for y in nb_pts {
                in_nbhd[y] = false;
            }
            if ok4 && ok5 {
                break;
            }
            if !ok4 {
                raise(&mut b4, k + 1, &[v]);
            } else {
                raise(&mut b5, k + 1, &[v]);
            }
            k += 1;
        }
    }
    if b1.k > K_MAX {
        violations.push(Violation::CapExceeded { axiom: Axiom::Valence, v: b1.witness[0] });
    }
    for b in [&b2, &b3, &b3b] {
        if b.k > K_MAX {
            violations.push(Violation::CapExceeded { axiom: b.axiom, v: b.witness[0] });
        }
    }
    let bounds = vec![b1, b2, b3, b3b, b4, b5];
    let k = if violations.is_empty() { bounds.iter().map(|b| b.k).max() } else { None };
    KReport { k, bounds, violations }
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Maximal set of vertices with pairwise combinatorial distance at least `l`.
pub fn maximal_separated_vertices(a: &KApproximation, l: u32) -> Vec<usize> {
    let mut blocked = vec![false; a.len()];
    let mut out = Vec::new();
    for v in 0..a.len() {
        if blocked[v] {
            continue;
        }
        out.push(v);
        let d = a.graph.bfs(v, l);
        for u in 0..a.len() {
            if d[u] < l {
                blocked[u] = true;
            }
        }
    }
    out
}

/// The weak uniform perfectness constant `16 L^2 K^(4 + 2L)`.
pub fn weak_up_constant(l: u32, k: u32) -> f64 {
    16.0 * (l as f64) * (l as f64) * libm::pow(k as f64, 4.0 + 2.0 * l as f64)
}

/// Pushforward of `a` (on `X`) under a sampled injective map `f` from the
/// points of `X` into the points of `Y`. The infimum defining `r'` is a
/// minimum over the sample, hence a lower bound for the continuum value.
pub fn pushforward_approximation(a: &KApproximation, x: &FiniteMetricSpace, f: &[usize], y: &FiniteMetricSpace) -> Result<KApproximation> {
    if f.len() != x.len() {
        return Err(Error::InvalidInput("map must be defined on every sample point".into()));
    }
    let mut seen = vec![false; y.len()];
    for &t in f {
        if t >= y.len() {
            return Err(Error::UnknownVertex(t));
        }
        if seen[t] {
            return Err(Error::InvalidInput("map is not injective".into()));
        }
        seen[t] = true;
    }
    let mesh = a.mesh_size()?;
    if !(mesh < x.diam() / 2.0) {
        return Err(Error::MeshTooCoarse { mesh, half_diam: x.diam() / 2.0 });
    }
    let n = a.len();
    let mut p2 = Vec::with_capacity(n);
    let mut r2 = Vec::with_capacity(n);
    for v in 0..n {
        let pv = a.p[v];
        let pp = f[pv];
        let m = (0..x.len())
            .filter(|&q| x.dist(q, pv) >= a.r[v])
            .map(|q| y.dist(f[q], pp))
            .fold(f64::INFINITY, f64::min);
        if !m.is_finite() {
            return Err(Error::EmptyInfimumSet(v));
        }
        p2.push(pp);
        r2.push(m);
    }
    let cover = a.cover.iter().map(|c| c.iter().map(|&q| f[q]).collect()).collect();
    let mut b = KApproximation::new(a.graph.clone(), p2, r2, cover)?;
    b.report = Some(verify_k_approximation(&b, y));
    Ok(b)
}

/// A sequence of approximations of one space with shrinking mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationLadder {
    pub levels: Vec<KApproximation>,
}

impl ApproximationLadder {
    pub fn new(levels: Vec<KApproximation>) -> Result<Self> {
        for i in 1..levels.len() {
            if !(levels[i].mesh_size()? < levels[i - 1].mesh_size()?) {
                return Err(Error::LadderNotRefining(i));
            }
        }
        Ok(ApproximationLadder { levels })
    }

    /// One `K` valid for every level, if all levels verified.
    pub fn common_k(&self) -> Option<u32> {
        self.levels.iter().map(KApproximation::k_report).try_fold(1, |m, k| k.map(|k| m.max(k)))
    }
}
