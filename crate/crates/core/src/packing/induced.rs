//! Approximations of the round sphere induced by a packing.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{SphereTriangulation, SphericalPacking};
use crate::approx::{verify_k_approximation, KApproximation};
use crate::graph::ApproxGraph;
use crate::grid::Grid;
use crate::math::{self, Vec3};
use crate::mesh::{self, TriMesh};
use crate::metric::{FiniteMetricSpace, Metric};
use crate::Result;

fn det(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    math::dot(a, math::cross(b, c))
}

/// Sample of the sphere: the packing centers (ids `0..n`, so `p(v) = v`)
/// followed by the vertices of a subdivided icosahedron, with angular
/// distance. Mesh edges of the icosphere plus links from each center to its
/// nearest icosphere points serve as the path structure.
fn sample(p: &SphericalPacking, level: usize) -> Result<FiniteMetricSpace> {
    let n = p.centers.len();
    let (mut ico, mut tris) = mesh::icosahedron();
    for _ in 0..level {
        tris = mesh::subdivide(&mut ico, &tris, true);
    }
    let grid = Grid::new(&p.centers);
    let spacing = 2.0 * math::PI / math::sqrt(ico.len() as f64);
    // icosphere points on top of a center are dropped
    let mut id = vec![u32::MAX; ico.len()];
    let mut coords = p.centers.clone();
    for (i, &x) in ico.iter().enumerate() {
        let near = match grid.candidates(x, 1e-9) {
            Some(c) => c.iter().any(|&j| math::dist(p.centers[j as usize], x) < 1e-9),
            None => p.centers.iter().any(|&c| math::dist(c, x) < 1e-9),
        };
        if !near {
            id[i] = coords.len() as u32;
            coords.push(x);
        }
    }
    let mut adj = vec![Vec::new(); coords.len()];
    let link = |a: u32, b: u32, adj: &mut Vec<Vec<u32>>| {
        if a != b {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
    };
    let ico_grid = Grid::new(&ico);
    let nearest = |x: Vec3| -> usize {
        let cand = ico_grid.candidates(x, spacing).unwrap_or_else(|| (0..ico.len() as u32).collect());
        let mut best = (f64::INFINITY, 0);
        for &j in &cand {
            let d = math::dist(ico[j as usize], x);
            if d < best.0 {
                best = (d, j as usize);
            }
        }
        if best.0.is_finite() {
            best.1
        } else {
            (0..ico.len()).min_by(|&a, &b| math::dist(ico[a], x).total_cmp(&math::dist(ico[b], x))).unwrap()
        }
    };
    // an icosphere vertex that coincides with a center is replaced by it
    for (i, &x) in ico.iter().enumerate() {
        if id[i] == u32::MAX {
            let near = (0..n).min_by(|&a, &b| math::dist(p.centers[a], x).total_cmp(&math::dist(p.centers[b], x))).unwrap();
            id[i] = near as u32;
        }
    }
    for t in &tris {
        for k in 0..3 {
            link(id[t[k] as usize], id[t[(k + 1) % 3] as usize], &mut adj);
        }
    }
    for v in 0..n {
        let j = nearest(p.centers[v]);
        link(v as u32, id[j], &mut adj);
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    FiniteMetricSpace::from_points(coords, Metric::Angular)?.with_adjacency(adj)
}

/// The approximation with `p(v)` the center, `r(v)` the angular radius and
/// `U_v` the open star of `v` in the geodesic triangulation on the centers,
/// over an icosphere sample of the given subdivision level. Returns the
/// sample alongside; the verifier report is attached.
pub fn induced_approximation(p: &SphericalPacking, t: &SphereTriangulation, sample_level: usize) -> Result<(KApproximation, FiniteMetricSpace)> {
    let n = t.len();
    let z = sample(p, sample_level)?;
    let pts = z.coords();
    let grid = Grid::new(pts);
    let mut cover: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for f in t.triangles() {
        let c = f.map(|v| p.centers[v as usize]);
        let mid = math::normalize(math::add(math::add(c[0], c[1]), c[2]));
        let rad = c.iter().map(|&x| math::dist(x, mid)).fold(0.0, f64::max) + 1e-12;
        let cand: Vec<u32> = grid.candidates(mid, rad).unwrap_or_else(|| (0..pts.len() as u32).collect());
        for &q in &cand {
            let x = pts[q as usize];
            if math::dist(x, mid) > rad {
                continue;
            }
            let s = [det(c[1], c[2], x), det(c[2], c[0], x), det(c[0], c[1], x)];
            if s.iter().any(|&d| d < -1e-14) {
                continue;
            }
            // side k is opposite corner k; the point is in the open star of
            // corner k unless it sits on that side
            for k in 0..3 {
                if s[k] > 1e-14 {
                    cover[f[k] as usize].push(q as usize);
                }
            }
        }
    }
    let graph = ApproxGraph::from_sphere_triangulation(n, t.triangles())?;
    let mut a = KApproximation::new(graph, (0..n).collect(), p.radii.clone(), cover)?;
    a.report = Some(verify_k_approximation(&a, &z));
    Ok((a, z))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingLemmaReport {
    /// Largest `r_v / r_u` over ordered edges.
    pub max_ratio: f64,
    /// Largest ratio keyed by the valence of `v`, ascending.
    pub by_valence: Vec<(usize, f64)>,
}

/// Ratios of adjacent radii grouped by valence.
pub fn ring_lemma_check(p: &SphericalPacking, t: &SphereTriangulation) -> Result<RingLemmaReport> {
    let adj = TriMesh::new(t.len(), t.triangles().to_vec())?.adjacency();
    let mut table: BTreeMap<usize, f64> = BTreeMap::new();
    let mut max_ratio = 1.0f64;
    for (v, l) in adj.iter().enumerate() {
        for &u in l {
            let q = p.radii[v] / p.radii[u as usize];
            max_ratio = max_ratio.max(q);
            let e = table.entry(l.len()).or_insert(1.0);
            *e = e.max(q);
        }
    }
    Ok(RingLemmaReport { max_ratio, by_valence: table.into_iter().collect() })
}
