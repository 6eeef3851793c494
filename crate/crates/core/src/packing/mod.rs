//! Circle packings of triangulated 2-spheres.
//!
//! A vertex of largest valence is removed; the rest is packed as the
//! maximal packing of the hyperbolic plane (boundary circles are
//! horocycles), laid out in the upper half-plane with the removed vertex as
//! the lower half-plane, and lifted to the sphere by stereographic
//! projection. The result is centered by a Möbius transformation so that
//! the tangency points have conformal barycenter at the origin.

mod dd;
mod frame;
pub mod induced;
pub mod mobius;

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::math::{self, Vec3};
use dd::Dd;
use crate::mesh::TriMesh;
use crate::{Error, Result};
pub use induced::{induced_approximation, ring_lemma_check, RingLemmaReport};
use mobius::{boost, boost_point, cap_from_vector, cap_vector, common_orthogonal, rotate_cap, rotation_between, Cap4};



/// Combinatorial triangulation of the 2-sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereTriangulation {
    n: usize,
    tris: Vec<[u32; 3]>,
}

impl SphereTriangulation {
    pub fn new(n: usize, tris: Vec<[u32; 3]>) -> Result<Self> {
        if n < 4 {
            return Err(Error::NotATriangulation(alloc::format!("{n} vertices")));
        }
        let m = TriMesh::new(n, tris.clone()).map_err(|e| Error::NotATriangulation(alloc::format!("{e}")))?;
        m.check_sphere().map_err(|e| Error::NotATriangulation(alloc::format!("{e}")))?;
        Ok(SphereTriangulation { n, tris })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.tris
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        TriMesh::new(self.n, self.tris.clone()).unwrap().adjacency()
    }

    /// Random triangulation with `n` vertices: repeated insertion of a
    /// vertex into a random face of the tetrahedron, then random edge flips.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n < 4 {
            return Err(Error::NotATriangulation(alloc::format!("{n} vertices")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tris: Vec<[u32; 3]> = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
        for v in 4..n as u32 {
            let i = rng.gen_range(0..tris.len());
            let [a, b, c] = tris[i];
            tris[i] = [a, b, v];
            tris.push([b, c, v]);
            tris.push([c, a, v]);
        }
        let mut deg = vec![0usize; n];
        for t in &tris {
            for &v in t {
                deg[v as usize] += 1;
            }
        }
        for _ in 0..2 * n {
            let i = rng.gen_range(0..tris.len());
            let k = rng.gen_range(0..3);
            let (a, b, c) = (tris[i][k], tris[i][(k + 1) % 3], tris[i][(k + 2) % 3]);
            // the other face on edge a-b contains b -> a
            let Some(j) = tris.iter().position(|t| (0..3).any(|m| t[m] == b && t[(m + 1) % 3] == a)) else { continue };
            let m = (0..3).find(|&m| tris[j][m] == b).unwrap();
            let d = tris[j][(m + 2) % 3];
            let has_cd = tris.iter().any(|t| t.contains(&c) && t.contains(&d));
            if has_cd || deg[a as usize] <= 3 || deg[b as usize] <= 3 {
                continue;
            }
            tris[i] = [c, a, d];
            tris[j] = [d, b, c];
            deg[a as usize] -= 1;
            deg[b as usize] -= 1;
            deg[c as usize] += 1;
            deg[d as usize] += 1;
        }
        SphereTriangulation::new(n, tris)
    }
}

/// Circle packing on the unit sphere with angular radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalPacking {
    pub centers: Vec<Vec3>,
    pub radii: Vec<f64>,
    /// Vertices placed equally spaced on a great circle, if normalized.
    pub triple: Option<[usize; 3]>,
    /// Vertex removed for the planar stage.
    pub removed: usize,
    /// Final angle-sum residual of the radius iteration.
    pub residual: f64,
    pub sweeps: usize,
}

impl SphericalPacking {
    pub fn caps(&self) -> Vec<Cap4> {
        self.centers.iter().zip(&self.radii).map(|(&c, &r)| cap_vector(c, r)).collect()
    }

    fn with_caps(&self, caps: &[Cap4]) -> Self {
        let mut p = self.clone();
        for (i, &c) in caps.iter().enumerate() {
            let (n, r) = cap_from_vector(c);
            p.centers[i] = n;
            p.radii[i] = r;
        }
        p
    }

    /// Tangency point of adjacent circles `u`, `v`.
    pub fn tangency_point(&self, u: usize, v: usize) -> Vec3 {
        let (a, b) = (self.centers[u], self.centers[v]);
        let w = math::sub(b, math::scale(a, math::dot(a, b)));
        let w = math::normalize(w);
        math::add(math::scale(a, math::cos(self.radii[u])), math::scale(w, math::sin(self.radii[u])))
    }

    /// Largest `|angle(c_u, c_v) - r_u - r_v|` over edges.
    pub fn tangency_residual(&self, t: &SphereTriangulation) -> f64 {
        let adj = t.adjacency();
        let mut worst = 0.0f64;
        for (u, l) in adj.iter().enumerate() {
            for &v in l {
                let v = v as usize;
                let d = math::angle_between(self.centers[u], self.centers[v]);
                worst = worst.max((d - self.radii[u] - self.radii[v]).abs());
            }
        }
        worst
    }

    /// Largest overlap `r_u + r_v - angle(c_u, c_v)` over non-adjacent pairs.
    pub fn overlap(&self, t: &SphereTriangulation) -> f64 {
        let adj = t.adjacency();
        let n = self.centers.len();
        let mut worst = f64::NEG_INFINITY;
        for u in 0..n {
            for v in 0..u {
                if adj[u].binary_search(&(v as u32)).is_ok() {
                    continue;
                }
                let d = math::angle_between(self.centers[u], self.centers[v]);
                worst = worst.max(self.radii[u] + self.radii[v] - d);
            }
        }
        worst
    }
}

/// Angle at a circle of hyperbolic radius `hv` in the triangle formed with
/// tangent neighbors of radii `ha`, `hb` (infinite for horocycles).
fn hyp_angle(hv: f64, ha: f64, hb: f64) -> f64 {
    // 1 - exp(-2x), exact for small and infinite x
    let om = |x: f64| -math::expm1(-2.0 * x);
    let x = math::exp(-2.0 * hv) * om(ha) * om(hb) / (om(hv + ha) * om(hv + hb));
    2.0 * math::asin(math::sqrt(x.clamp(0.0, 1.0)))
}

/// Radius that gives angle sum 2π at a vertex of valence `k` when its
/// neighbors are replaced by equal circles producing the current sum `theta`.
fn uniform_update(h: f64, theta: f64, k: f64) -> f64 {
    let beta = math::sin(theta / (2.0 * k));
    let delta = math::sin(math::PI / k);
    let s = math::exp(-h);
    // squared s-radius of the equal neighbors, and its complement
    let den = s * (1.0 - beta * s);
    let u = ((s - beta) / den).clamp(0.0, 1.0);
    let cu = (beta * -math::expm1(-2.0 * h) / den).clamp(0.0, 1.0);
    if u == 0.0 {
        return -math::ln(delta);
    }
    // t = 1 - s' is the small root of a t^2 - b t + c
    let (qa, qb, qc) = (delta * u, 2.0 * delta * u + cu, (1.0 - delta) * cu);
    let t = 2.0 * qc / (qb + math::sqrt((qb * qb - 4.0 * qa * qc).max(0.0)));
    if t < 0.5 {
        -math::log1p(-t)
    } else {
        -math::ln(1.0 - t)
    }
}

/// Cap on radius-iteration sweeps.
pub const MAX_SWEEPS: usize = 1_000_000;
/// Residuals below this are accepted once they stop decreasing.
const ROUNDING_FLOOR: f64 = 1e-10;
const TRACE_LEN: usize = 256;
/// Sweeps without a 10% gain that count as a stall.
const STALL_WINDOW: usize = 4096;

/// Packs `t` with angle-sum tolerance `tol` and returns the centered packing.
pub fn pack_triangulation(t: &SphereTriangulation, tol: f64) -> Result<SphericalPacking> {
    let adj = t.adjacency();
    let w = (0..t.n).max_by_key(|&v| (adj[v].len(), core::cmp::Reverse(v))).unwrap();
    pack_removing(t, w, tol)
}

/// As [`pack_triangulation`] with an explicit removed vertex.
pub fn pack_removing(t: &SphereTriangulation, w: usize, tol: f64) -> Result<SphericalPacking> {
    let n = t.n;
    if w >= n {
        return Err(Error::UnknownVertex(w));
    }
    let links = TriMesh::new(n, t.tris.clone())?.links()?;
    let mut boundary = vec![false; n];
    for &u in &links[w] {
        boundary[u as usize] = true;
    }
    // radius iteration on hyperbolic radii
    let mut h = vec![1.0f64; n];
    for v in 0..n {
        if boundary[v] || v == w {
            h[v] = f64::INFINITY;
        }
    }
    let interior: Vec<usize> = (0..n).filter(|&v| v != w && !boundary[v]).collect();
    let angle_sum = |h: &[f64], v: usize| -> f64 {
        let l = &links[v];
        (0..l.len()).map(|i| hyp_angle(h[v], h[l[i] as usize], h[l[(i + 1) % l.len()] as usize])).sum()
    };
    let mut sweeps = 0;
    let mut residual = 0.0;
    let mut trace = Vec::new();
    let (mut best, mut best_at) = (f64::INFINITY, 0usize);
    if !interior.is_empty() {
        loop {
            residual = 0.0f64;
            for &v in &interior {
                let theta = angle_sum(&h, v);
                residual = residual.max((theta - math::TAU).abs());
                h[v] = uniform_update(h[v], theta, links[v].len() as f64).clamp(1e-300, 700.0);
            }
            sweeps += 1;
            if sweeps % 64 == 0 {
                if trace.len() == TRACE_LEN {
                    trace.remove(0);
                }
                trace.push(residual);
            }
            if residual <= tol {
                break;
            }
            // stalled at the rounding floor
            if residual < best * 0.9 {
                best = residual;
                best_at = sweeps;
            } else if sweeps - best_at > STALL_WINDOW && residual < ROUNDING_FLOOR {
                break;
            }
            if !residual.is_finite() || sweeps >= MAX_SWEEPS {
                return Err(Error::IterationDiverged { residual, trace });
            }
        }
        // residual after the last sweep
        residual = interior.iter().map(|&v| (angle_sum(&h, v) - math::TAU).abs()).fold(0.0, f64::max);
    }
    // layout in the upper half-plane: center (x, y), euclidean radius kappa * y
    let kappa: Vec<f64> = h.iter().map(|&x| math::tanh(x)).collect();
    let lw = &links[w];
    let (u0, x0) = (lw[0] as usize, lw[1] as usize);
    let faces: Vec<[u32; 3]> = t.tris.iter().copied().filter(|f| !f.contains(&(w as u32))).collect();
    let pos = layout(n, &kappa, u0, x0, &faces)?;
    let pos: Vec<Circle> = pos
        .into_iter()
        .enumerate()
        .map(|(v, c)| match c {
            Some(c) => Ok(c),
            None if v == w => Ok(Circle { x: Dd::ZERO, y: Dd::ZERO, r: Dd::ZERO, line: true }),
            None => Err(Error::NotATriangulation("layout did not reach every vertex".into())),
        })
        .collect::<Result<_>>()?;
    // a direct lift is accurate only for circles that are not tiny on the
    // sphere; it serves to find the centered frame
    let mut centers = vec![[0.0; 3]; n];
    let mut radii = vec![0.0; n];
    for v in 0..n {
        (centers[v], radii[v]) = if v == w { ([0.0, -1.0, 0.0], math::PI / 2.0) } else { lift_disc(pos[v]) };
    }
    let mut rough = SphericalPacking { centers, radii, triple: None, removed: w, residual, sweeps };
    let flip = orientation(&rough, t) < 0.0;
    if flip {
        for c in &mut rough.centers {
            c[1] = -c[1];
        }
    }
    let rough = center_packing(&rough, t)?;
    // three well spread tangency points fix the map from the plane to it
    let adj = t.adjacency();
    let mut picks = [(f64::NEG_INFINITY, 0usize, 0usize); 3];
    let dirs = [[1.0, 0.0, 0.0], [-0.5, 0.866, 0.0], [-0.5, -0.866, 0.0]];
    for u in 0..n {
        for &v in &adj[u] {
            let v = v as usize;
            if (u == w && v == u0) || (u == u0 && v == w) {
                continue;
            }
            let tp = rough.tangency_point(u, v);
            for (k, d) in dirs.iter().enumerate() {
                let s = math::dot(tp, *d);
                if s > picks[k].0 {
                    picks[k] = (s, u, v);
                }
            }
        }
    }
    let plane_tangency = |u: usize, v: usize| -> (f64, f64) {
        let (a, b) = (pos[u], pos[v]);
        if u == w {
            (b.x.f(), 0.0)
        } else if v == w {
            (a.x.f(), 0.0)
        } else if a.line {
            (b.x.f(), a.y.f())
        } else if b.line {
            (a.x.f(), b.y.f())
        } else {
            let f = a.r / (a.r + b.r);
            ((a.x + (b.x - a.x) * f).f(), (a.y + (b.y - a.y) * f).f())
        }
    };
    let z = picks.map(|(_, u, v)| plane_tangency(u, v));
    let target = picks.map(|(_, u, v)| frame::to_plane(rough.tangency_point(u, v)));
    let m = frame::Mobius::through(z, target, flip);
    let mut centers = vec![[0.0; 3]; n];
    let mut radii = vec![0.0; n];
    for v in 0..n {
        let c = if v == w { Circle { x: Dd::ZERO, y: Dd::ZERO, r: Dd::ZERO, line: true } } else { pos[v] };
        (centers[v], radii[v]) = frame::image_cap(&m, c, v == w);
    }
    let p = SphericalPacking { centers, radii, triple: None, removed: w, residual, sweeps };
    center_packing(&p, t)
}

const LINE_HEIGHT: f64 = 2.0;

/// A planar circle; `line` marks the half-plane above `y = center.y`.
#[derive(Debug, Clone, Copy)]
struct Circle {
    x: Dd,
    y: Dd,
    r: Dd,
    line: bool,
}

/// Places every circle face by face. `u0` is the half-plane above
/// `y = LINE_HEIGHT` and `x0` sits under it at the origin; the interstice
/// of the removed vertex, `u0` and `x0` is then to the east.
fn layout(n: usize, kappa: &[f64], u0: usize, x0: usize, faces: &[[u32; 3]]) -> Result<Vec<Option<Circle>>> {
    let mut pos: Vec<Option<Circle>> = vec![None; n];
    pos[u0] = Some(Circle { x: Dd::ZERO, y: Dd::from(LINE_HEIGHT), r: Dd::ZERO, line: true });
    let half = Dd::from(LINE_HEIGHT / 2.0);
    pos[x0] = Some(Circle { x: Dd::ZERO, y: half, r: half, line: false });
    let mut face_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, f) in faces.iter().enumerate() {
        for &v in f {
            face_of[v as usize].push(i);
        }
    }
    let mut queue: VecDeque<usize> = face_of[u0].iter().copied().collect();
    let mut done = vec![false; faces.len()];
    while let Some(fi) = queue.pop_front() {
        if done[fi] {
            continue;
        }
        let f = faces[fi];
        let placed = (0..3).filter(|&k| pos[f[k] as usize].is_some()).count();
        if placed < 2 {
            continue;
        }
        done[fi] = true;
        if placed == 2 {
            let k = (0..3).find(|&k| pos[f[k] as usize].is_none()).unwrap();
            let (a, b, c) = (f[(k + 1) % 3] as usize, f[(k + 2) % 3] as usize, f[k] as usize);
            pos[c] = Some(place_third(pos[a].unwrap(), pos[b].unwrap(), kappa[c])?);
        }
        for &v in &f {
            for &g in &face_of[v as usize] {
                if !done[g] {
                    queue.push_back(g);
                }
            }
        }
    }
    Ok(pos)
}

/// Circle tangent to circles `a` and `b` (in that counterclockwise order)
/// with radius `kappa * y`.
fn place_third(a: Circle, b: Circle, kappa: f64) -> Result<Circle> {
    let fail = || Error::NotATriangulation("layout failed to place a circle".into());
    let k = Dd::from(kappa);
    if a.line || b.line {
        let (line, o, east) = if a.line { (a, b, true) } else { (b, a, false) };
        if o.line {
            return Err(fail());
        }
        let y = line.y / Dd::from(1.0 + kappa);
        let sum = o.r + k * y;
        let dy = y - o.y;
        let h2 = (sum - dy) * (sum + dy);
        if !(h2.hi >= -1e-6 * sum.hi * sum.hi) {
            return Err(fail());
        }
        let h = h2.sqrt();
        return Ok(Circle { x: if east { o.x + h } else { o.x - h }, y, r: k * y, line: false });
    }
    // coordinates relative to a
    let (bu, bv) = (b.x - a.x, b.y - a.y);
    let (ra, rb, ya) = (a.r, b.r, a.y);
    let two = Dd::from(2.0);
    // |c|^2 = (ra + rc)^2 and |c - b|^2 = (rb + rc)^2 with rc = k (ya + v);
    // their difference is linear in c
    let (lx, ly) = (bu * two, (bv - k * (ra - rb)) * two);
    let l0 = bu.sq() + bv.sq() + (ra - rb) * (ra + rb + k * ya * two);
    let nn = lx.sq() + ly.sq();
    let (px, py) = (l0 * lx / nn, l0 * ly / nn);
    let (dx, dy) = (-ly, lx);
    let f0 = ra + k * (ya + py);
    let qa = dx.sq() + dy.sq() - (k * dy).sq();
    let qb = ((px * dx + py * dy) - f0 * k * dy) * two;
    let pm = (px.sq() + py.sq()).sqrt();
    let qc = (pm - f0) * (pm + f0);
    let disc = qb.sq() - qa * qc * 4.0;
    if !(disc.hi >= -1e-6 * qb.hi * qb.hi) {
        return Err(fail());
    }
    let sq = disc.sqrt();
    let mut best = None;
    // stable roots; `qa` vanishes for horocycles
    let q = (qb + if qb.hi >= 0.0 { sq } else { -sq }) * -0.5;
    for t in [qa.hi.ne(&0.0).then(|| q / qa), q.hi.ne(&0.0).then(|| qc / q)].into_iter().flatten() {
        if !t.hi.is_finite() {
            continue;
        }
        let (u, v) = (px + t * dx, py + t * dy);
        // new center left of a -> b
        let y = ya + v;
        if y.hi > 0.0 && (bu * v - bv * u).hi > 0.0 {
            best = Some(Circle { x: a.x + u, y, r: k * y, line: false });
        }
    }
    best.ok_or_else(fail)
}

/// Spherical cap that is the image of a planar circle under inverse
/// stereographic projection `(x, y) -> (2x, 2y, |p|^2 - 1) / (|p|^2 + 1)`.
fn lift_disc(c: Circle) -> (Vec3, f64) {
    if c.line {
        // half-plane above a horizontal line
        let f1 = 2.0 * math::atan(c.y.f());
        let fc = 0.5 * (f1 + math::PI);
        return ([0.0, math::sin(fc), -math::cos(fc)], 0.5 * (math::PI - f1));
    }
    let m2 = c.x.sq() + c.y.sq();
    let m = m2.sqrt();
    let dir = if m.hi > 0.0 { [(c.x / m).f(), (c.y / m).f()] } else { [1.0, 0.0] };
    // the cap spans polar angles 2 atan(m - r) to 2 atan(m + r) from the south pole
    let (p1, p2) = ((m - c.r).f(), (m + c.r).f());
    let fc = math::atan(p1) + math::atan(p2);
    let radius = math::atan2((c.r * 2.0).f(), (Dd::from(1.0) + m2 - c.r.sq()).f());
    ([math::sin(fc) * dir[0], math::sin(fc) * dir[1], -math::cos(fc)], radius)
}

fn orientation(p: &SphericalPacking, t: &SphereTriangulation) -> f64 {
    t.tris
        .iter()
        .map(|f| {
            let (a, b, c) = (p.centers[f[0] as usize], p.centers[f[1] as usize], p.centers[f[2] as usize]);
            math::dot(a, math::cross(b, c))
        })
        .sum()
}

fn apply(p: &SphericalPacking, caps: &[Cap4], beta: Vec3) -> (Vec<Cap4>, SphericalPacking) {
    let c2: Vec<Cap4> = caps.iter().map(|&c| boost(c, beta)).collect();
    let q = p.with_caps(&c2);
    (c2, q)
}

/// Applies a Möbius transformation so that the tangency points have
/// conformal barycenter at the origin (unique up to rotation).
pub fn center_packing(p: &SphericalPacking, t: &SphereTriangulation) -> Result<SphericalPacking> {
    let adj = t.adjacency();
    let edges: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(u, l)| l.iter().filter(move |&&v| (v as usize) > u).map(move |&v| (u, v as usize)))
        .collect();
    let mut caps = p.caps();
    let mut pts: Vec<Vec3> = edges.iter().map(|&(u, v)| p.tangency_point(u, v)).collect();
    let m = pts.len() as f64;
    for _ in 0..200 {
        let f = pts.iter().fold([0.0; 3], |s, &x| math::add(s, x));
        let fn_ = math::norm(f);
        if fn_ <= 1e-14 * m {
            break;
        }
        let mut jac = vec![0.0; 9];
        for x in &pts {
            for i in 0..3 {
                for j in 0..3 {
                    jac[i * 3 + j] -= x[i] * x[j];
                }
            }
        }
        for i in 0..3 {
            jac[i * 4] += m;
        }
        let step = math::solve_dense(jac, vec![-f[0], -f[1], -f[2]], 1e-300).ok_or(Error::DegenerateTriple)?;
        let mut beta = [step[0], step[1], step[2]];
        // damped step: accept once the residual decreases
        for _ in 0..60 {
            let cand: Vec<Vec3> = pts.iter().map(|&x| boost_point(x, beta)).collect();
            let f2 = cand.iter().fold([0.0; 3], |s, &x| math::add(s, x));
            if math::norm(f2) < fn_ {
                pts = cand;
                caps = caps.iter().map(|&c| boost(c, beta)).collect();
                break;
            }
            beta = math::scale(beta, 0.5);
        }
    }
    let mut q = p.with_caps(&caps);
    q.triple = None;
    Ok(q)
}

fn equator_angle(c: Vec3) -> f64 {
    math::atan2(c[1], c[0])
}

/// Möbius image in which the centers of `v1, v2, v3` lie on the equator
/// at longitudes `0`, `2π/3`, `4π/3`.
pub fn mobius_normalize(p: &SphericalPacking, v: [usize; 3]) -> Result<SphericalPacking> {
    let n = p.centers.len();
    if v.iter().any(|&x| x >= n) || v[0] == v[1] || v[1] == v[2] || v[0] == v[2] {
        return Err(Error::DegenerateTriple);
    }
    let mut caps = p.caps();
    let m = common_orthogonal([caps[v[0]], caps[v[1]], caps[v[2]]])?;
    // boost the orthogonal circle onto a great circle
    let sp = [m[0], m[1], m[2]];
    let nsp = math::norm(sp);
    let phi = math::atanh(-m[3] / nsp);
    let beta = math::scale(sp, phi / nsp);
    let (c2, _) = apply(p, &caps, beta);
    caps = c2;
    let axis = math::normalize(sp);
    let (ax, ang) = rotation_between(axis, [0.0, 0.0, 1.0]);
    caps = caps.iter().map(|&c| rotate_cap(c, ax, ang)).collect();
    // in-plane boosts to equalize the spacing
    let third = math::TAU / 3.0;
    let err = |caps: &[Cap4]| -> [f64; 2] {
        let a: Vec<f64> = v.iter().map(|&i| equator_angle(cap_from_vector(caps[i]).0)).collect();
        let g12 = math::rem_euclid(a[1] - a[0], math::TAU);
        let g13 = math::rem_euclid(a[2] - a[0], math::TAU);
        if g12 < g13 {
            [g12 - third, g13 - 2.0 * third]
        } else {
            [g12 - 2.0 * third, g13 - third]
        }
    };
    let mut e = err(&caps);
    for _ in 0..200 {
        let en = math::hypot(e[0], e[1]);
        if en <= 1e-14 {
            break;
        }
        let h = 1e-6;
        let mut jac = vec![0.0; 4];
        for k in 0..2 {
            let mut b = [0.0; 3];
            b[k] = h;
            let cp: Vec<Cap4> = v.iter().map(|&i| boost(caps[i], b)).collect();
            b[k] = -h;
            let cm: Vec<Cap4> = v.iter().map(|&i| boost(caps[i], b)).collect();
            let mut full_p = caps.clone();
            let mut full_m = caps.clone();
            for (j, &i) in v.iter().enumerate() {
                full_p[i] = cp[j];
                full_m[i] = cm[j];
            }
            let (ep, em) = (err(&full_p), err(&full_m));
            jac[k] = (ep[0] - em[0]) / (2.0 * h);
            jac[2 + k] = (ep[1] - em[1]) / (2.0 * h);
        }
        let step = math::solve_dense(jac, vec![-e[0], -e[1]], 1e-300).ok_or(Error::DegenerateTriple)?;
        let mut b = [step[0], step[1], 0.0];
        let mut moved = false;
        for _ in 0..60 {
            let cand: Vec<Cap4> = caps.iter().map(|&c| boost(c, b)).collect();
            let e2 = err(&cand);
            if math::hypot(e2[0], e2[1]) < en {
                caps = cand;
                e = e2;
                moved = true;
                break;
            }
            b = math::scale(b, 0.5);
        }
        if !moved {
            break;
        }
    }
    // rotate v1 to longitude 0 and put v2 at 2π/3
    let a1 = equator_angle(cap_from_vector(caps[v[0]]).0);
    caps = caps.iter().map(|&c| rotate_cap(c, [0.0, 0.0, 1.0], -a1)).collect();
    let a2 = equator_angle(cap_from_vector(caps[v[1]]).0);
    if a2 < 0.0 {
        caps = caps.iter().map(|&c| rotate_cap(c, [1.0, 0.0, 0.0], math::PI)).collect();
    }
    let mut q = p.with_caps(&caps);
    q.triple = Some(v);
    Ok(q)
}

/// Largest deviation of the triple's pairwise angular distances from
/// `2π/3` together with its distance from a common great circle.
pub fn normalization_error(p: &SphericalPacking) -> Option<f64> {
    let v = p.triple?;
    let c = v.map(|i| p.centers[i]);
    let mut worst = 0.0f64;
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        worst = worst.max((math::angle_between(c[i], c[j]) - math::TAU / 3.0).abs());
    }
    let nrm = math::normalize(math::cross(math::sub(c[1], c[0]), math::sub(c[2], c[0])));
    worst = worst.max(math::dot(nrm, c[0]).abs());
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh;

    fn tri((v, t): (Vec<Vec3>, Vec<[u32; 3]>)) -> SphereTriangulation {
        SphereTriangulation::new(v.len(), t).unwrap()
    }

    #[test]
    fn platonic_radii() {
        let want = [
            (tri(mesh::tetrahedron()), 0.5 * math::acos(-1.0 / 3.0)),
            (tri(mesh::octahedron()), math::PI / 4.0),
            (tri(mesh::icosahedron()), 0.5 * math::acos(1.0 / math::sqrt(5.0))),
        ];
        for (t, r) in want {
            let p = pack_triangulation(&t, 1e-13).unwrap();
            for &x in &p.radii {
                assert!((x - r).abs() < 1e-9, "{x} vs {r}");
            }
            assert!(p.tangency_residual(&t) < 1e-9);
        }
    }

    #[test]
    fn three_vertices_rejected() {
        assert!(matches!(SphereTriangulation::new(3, vec![[0, 1, 2], [0, 2, 1]]), Err(Error::NotATriangulation(_))));
    }

    #[test]
    fn normalize_random() {
        let t = SphereTriangulation::random(40, 3).unwrap();
        let p = pack_triangulation(&t, 1e-12).unwrap();
        assert!(p.tangency_residual(&t) < 1e-9);
        assert!(p.overlap(&t) < 1e-9);
        let q = mobius_normalize(&p, [0, 5, 17]).unwrap();
        assert!(normalization_error(&q).unwrap() < 1e-9);
        assert!(q.tangency_residual(&t) < 1e-9);
        let q2 = mobius_normalize(&q, [0, 5, 17]).unwrap();
        for i in 0..t.len() {
            assert!(math::angle_between(q.centers[i], q2.centers[i]) < 1e-9);
        }
    }

    #[test]
    fn independent_of_removed_vertex() {
        let t = SphereTriangulation::random(150, 11).unwrap();
        let a = mobius_normalize(&pack_removing(&t, 3, 1e-13).unwrap(), [0, 40, 90]).unwrap();
        let b = mobius_normalize(&pack_removing(&t, 77, 1e-13).unwrap(), [0, 40, 90]).unwrap();
        for i in 0..t.len() {
            assert!(math::angle_between(a.centers[i], b.centers[i]) < 1e-6);
            assert!((a.radii[i] - b.radii[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn large_random() {
        let t = SphereTriangulation::random(500, 5).unwrap();
        let p = pack_triangulation(&t, 1e-12).unwrap();
        assert!(p.tangency_residual(&t) < 1e-8);
        assert!(p.overlap(&t) < 1e-8);
        assert!(p.radii.iter().all(|&r| r > 0.0 && r < math::PI / 2.0));
    }
}
