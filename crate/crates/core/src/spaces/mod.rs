//! Test spaces: round and warped spheres, the snowball, the `d_alpha` patch.

pub mod alpha;
pub mod graded;
pub mod snowball;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::math::{self, Vec3};
use crate::mesh::{self, TriMesh};
use crate::metric::{FiniteMetricSpace, Metric};
use crate::{Error, Result};

pub use alpha::AlphaPatch;
pub use graded::graded_sphere;
pub use snowball::{snowball, SquareComplex};

/// Largest sample for which graph-geodesic distances are tabulated.
pub const GEODESIC_MAX_POINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MetricMode {
    /// Restriction of the Euclidean metric of the ambient space.
    Chordal,
    /// Great-circle distance (unit-sphere samples only).
    Angular,
    /// Shortest paths along mesh edges of the finest level.
    GraphGeodesic,
    AlphaPatch(AlphaPatch),
}

/// Nested triangulated 2-spheres sharing one vertex array: the vertices
/// of level `k` are the first `counts[k]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshedSphere {
    coords: Vec<Vec3>,
    levels: Vec<Vec<[u32; 3]>>,
    counts: Vec<usize>,
    pub mode: MetricMode,
    pub label: String,
}

impl MeshedSphere {
    pub(crate) fn from_parts(coords: Vec<Vec3>, levels: Vec<Vec<[u32; 3]>>, counts: Vec<usize>, mode: MetricMode, label: &str) -> Self {
        MeshedSphere { coords, levels, counts, mode, label: label.to_string() }
    }

    /// Single-level mesh from raw data; checks it is a sphere with positive
    /// triangle areas.
    pub fn from_triangles(coords: Vec<Vec3>, tris: Vec<[u32; 3]>, mode: MetricMode, label: &str) -> Result<Self> {
        let m = TriMesh::new(coords.len(), tris)?;
        m.check_sphere()?;
        if let Some(i) = m.triangles().iter().position(|&t| !(mesh::triangle_area(&coords, t) > 0.0)) {
            return Err(Error::InvalidInput(alloc::format!("triangle {i} has zero area")));
        }
        let n = coords.len();
        Ok(MeshedSphere::from_parts(coords, vec![m.triangles().to_vec()], vec![n], mode, label))
    }

    pub fn coords(&self) -> &[Vec3] {
        &self.coords
    }

    pub fn finest(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn triangles(&self, level: usize) -> Result<&[[u32; 3]]> {
        self.levels.get(level).map(Vec::as_slice).ok_or(Error::LevelTooDeep(level as u32))
    }

    pub fn count(&self, level: usize) -> Result<usize> {
        self.counts.get(level).copied().ok_or(Error::LevelTooDeep(level as u32))
    }

    pub fn with_mode(mut self, mode: MetricMode) -> Self {
        self.mode = mode;
        self
    }

    /// Keeps levels `0..=level` only.
    pub fn truncate(mut self, level: usize) -> Result<Self> {
        let n = self.count(level)?;
        self.levels.truncate(level + 1);
        self.counts.truncate(level + 1);
        self.coords.truncate(n);
        Ok(self)
    }

    /// Finest-level sample with its mesh adjacency.
    pub fn space(&self) -> Result<FiniteMetricSpace> {
        self.level_space(self.finest())
    }

    /// Vertices of `level` with that level's adjacency and metric.
    pub fn level_space(&self, level: usize) -> Result<FiniteMetricSpace> {
        let n = self.count(level)?;
        let tris = self.triangles(level)?;
        let adj = TriMesh::new(n, tris.to_vec())?.adjacency();
        let pts = self.coords[..n].to_vec();
        let s = match &self.mode {
            MetricMode::Chordal => FiniteMetricSpace::from_points(pts, Metric::Chordal)?,
            MetricMode::Angular => FiniteMetricSpace::from_points(pts, Metric::Angular)?,
            MetricMode::AlphaPatch(p) => FiniteMetricSpace::from_points(pts, Metric::AlphaPatch(p.clone()))?,
            MetricMode::GraphGeodesic => {
                if n > GEODESIC_MAX_POINTS {
                    return Err(Error::InvalidInput("too many points for a geodesic distance table".into()));
                }
                let m = geodesic_table(&pts, &adj);
                FiniteMetricSpace::from_matrix(n, m, Some(pts))?.assume_chordal_lower_bound()
            }
        };
        s.with_adjacency(adj)
    }
}

fn geodesic_table(pts: &[Vec3], adj: &[Vec<u32>]) -> Vec<f64> {
    let n = pts.len();
    let mut m = vec![0.0; n * n];
    let len: Vec<Vec<f64>> = adj
        .iter()
        .enumerate()
        .map(|(u, l)| l.iter().map(|&v| math::dist(pts[u], pts[v as usize])).collect())
        .collect();
    for s in 0..n {
        let d = crate::graph::edge_dijkstra(adj, &len, s);
        m[s * n..(s + 1) * n].copy_from_slice(&d);
    }
    // symmetrize rounding differences
    for i in 0..n {
        for j in 0..i {
            let v = m[i * n + j].min(m[j * n + i]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

/// Icosahedron subdivided `level` times, all levels kept, on the unit sphere.
pub fn round_sphere(level: usize) -> MeshedSphere {
    let (mut coords, t0) = mesh::icosahedron();
    let mut levels = vec![t0];
    let mut counts = vec![coords.len()];
    for _ in 0..level {
        let t = mesh::subdivide(&mut coords, levels.last().unwrap(), true);
        levels.push(t);
        counts.push(coords.len());
    }
    MeshedSphere::from_parts(coords, levels, counts, MetricMode::Chordal, "round_sphere")
}

/// Round sphere carrying the `d_alpha` patch on a cap of angular radius
/// `cap` around the north pole.
pub fn alpha_patch_sphere(alpha: f64, level: usize, cap: f64) -> Result<MeshedSphere> {
    let p = AlphaPatch::new(alpha, [0.0, 0.0, 1.0], cap)?;
    let mut m = round_sphere(level).with_mode(MetricMode::AlphaPatch(p));
    m.label = "alpha_patch".to_string();
    Ok(m)
}

/// Radial perturbation `x -> (1 + eps g(x)) x` by a random smooth `g` with
/// `|g| <= 1`, scaled so every mesh edge changes length by a factor in
/// `[1/L, L]` (checked edge by edge, halving `eps` on failure).
pub fn bilipschitz_warp(m: &MeshedSphere, l: f64, seed: u64) -> Result<MeshedSphere> {
    if !(l >= 1.0) {
        return Err(Error::InvalidInput("bilipschitz constant must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<(Vec3, f64, f64)> = (0..4)
        .map(|_| {
            let k = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            (k, rng.gen_range(0.0..math::TAU), 0.25)
        })
        .collect();
    let grad: f64 = waves.iter().map(|(k, _, a)| a * math::norm(*k)).sum();
    let g = |x: Vec3| waves.iter().map(|(k, ph, a)| a * math::sin(math::dot(*k, x) + ph)).sum::<f64>();
    let rmax = m.coords.iter().map(|&p| math::norm(p)).fold(0.0, f64::max).max(1e-300);
    let mut eps = (l - 1.0) / (l + 1.0) / (1.0 + 2.0 * grad * rmax);
    let edges = TriMesh::new(m.coords.len(), m.levels[m.finest()].clone())?.edges();
    for _ in 0..60 {
        let coords: Vec<Vec3> = m.coords.iter().map(|&p| math::scale(p, 1.0 + eps * g(p))).collect();
        let ok = edges.iter().all(|&(a, b)| {
            let d0 = math::dist(m.coords[a as usize], m.coords[b as usize]);
            let d1 = math::dist(coords[a as usize], coords[b as usize]);
            d1 <= l * d0 && d0 <= l * d1
        });
        if ok {
            let mut out = m.clone();
            out.coords = coords;
            out.mode = MetricMode::Chordal;
            out.label = alloc::format!("{}_warped", m.label);
            return Ok(out);
        }
        eps /= 2.0;
    }
    Err(Error::InvalidInput("warp could not meet the bilipschitz bound".into()))
}

/// Distances of `m`'s edges before and after a warp: the worst ratio.
pub fn max_edge_ratio(a: &MeshedSphere, b: &MeshedSphere) -> Result<f64> {
    let edges = TriMesh::new(a.coords.len(), a.levels[a.finest()].clone())?.edges();
    Ok(edges
        .iter()
        .map(|&(u, v)| {
            let d0 = math::dist(a.coords[u as usize], a.coords[v as usize]);
            let d1 = math::dist(b.coords[u as usize], b.coords[v as usize]);
            (d1 / d0).max(d0 / d1)
        })
        .fold(1.0, f64::max))
}
