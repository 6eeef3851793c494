//! Triangle meshes of 2-spheres: topology checks and midpoint subdivision.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{self, Vec3};
use crate::{Error, Result};

/// Oriented triangle list over vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    n: usize,
    tris: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(n: usize, tris: Vec<[u32; 3]>) -> Result<Self> {
        for t in &tris {
            for &v in t {
                if v as usize >= n {
                    return Err(Error::UnknownVertex(v as usize));
                }
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidInput("degenerate triangle".into()));
            }
        }
        Ok(TriMesh { n, tris })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.tris
    }

    /// Directed edge -> number of faces using it in that direction.
    fn directed_edges(&self) -> BTreeMap<(u32, u32), u32> {
        let mut m = BTreeMap::new();
        for t in &self.tris {
            for k in 0..3 {
                *m.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        m
    }

    /// Undirected edges, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = self
            .tris
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Checks that this is a connected, consistently oriented closed surface
    /// of Euler characteristic 2 using every vertex.
    pub fn check_sphere(&self) -> Result<()> {
        let de = self.directed_edges();
        for (&(a, b), &c) in &de {
            if c != 1 || de.get(&(b, a)) != Some(&1) {
                return Err(Error::NonManifoldEdge(a as usize, b as usize));
            }
        }
        let e = de.len() / 2;
        let chi = self.n as i64 - e as i64 + self.tris.len() as i64;
        if chi != 2 {
            return Err(Error::NotASphereMesh(chi));
        }
        let adj = self.adjacency();
        if adj.iter().any(Vec::is_empty) || crate::graph::component_of(&adj, 0, |_| true).len() != self.n {
            return Err(Error::NotASphereMesh(chi));
        }
        // every vertex link must be a single cycle
        let mut link: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.n];
        for t in &self.tris {
            for k in 0..3 {
                link[t[k] as usize].push((t[(k + 1) % 3], t[(k + 2) % 3]));
            }
        }
        for (v, l) in link.iter().enumerate() {
            if ordered_link(l).map(|c| c.len()) != Some(l.len()) {
                return Err(Error::NonManifoldEdge(v, v));
            }
        }
        Ok(())
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        for (a, b) in self.edges() {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    /// Cyclically ordered link (neighbors in counterclockwise order) of every vertex.
    pub fn links(&self) -> Result<Vec<Vec<u32>>> {
        let mut link: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.n];
        for t in &self.tris {
            for k in 0..3 {
                link[t[k] as usize].push((t[(k + 1) % 3], t[(k + 2) % 3]));
            }
        }
        link.iter()
            .enumerate()
            .map(|(v, l)| ordered_link(l).ok_or(Error::NonManifoldEdge(v, v)))
            .collect()
    }
}

/// Chains the link edges `(a, b)` of one vertex into a cycle `a, b, ...`.
fn ordered_link(l: &[(u32, u32)]) -> Option<Vec<u32>> {
    if l.is_empty() {
        return None;
    }
    let next: BTreeMap<u32, u32> = l.iter().copied().collect();
    if next.len() != l.len() {
        return None;
    }
    let start = l[0].0;
    let mut cyc = vec![start];
    let mut cur = start;
    loop {
        let nx = *next.get(&cur)?;
        if nx == start {
            break;
        }
        if cyc.len() > l.len() {
            return None;
        }
        cyc.push(nx);
        cur = nx;
    }
    Some(cyc)
}

/// Regular icosahedron on the unit sphere, outward oriented.
pub fn icosahedron() -> (Vec<Vec3>, Vec<[u32; 3]>) {
    let t = (1.0 + math::sqrt(5.0)) / 2.0;
    let raw: [Vec3; 12] = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let tris = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (raw.iter().map(|&p| math::normalize(p)).collect(), tris)
}

/// Regular tetrahedron on the unit sphere.
pub fn tetrahedron() -> (Vec<Vec3>, Vec<[u32; 3]>) {
    let s = 1.0 / math::sqrt(3.0);
    let v = vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
    let t = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    (v, t)
}

/// Regular octahedron on the unit sphere.
pub fn octahedron() -> (Vec<Vec3>, Vec<[u32; 3]>) {
    let v = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let t = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    (v, t)
}

/// One 1-to-4 midpoint subdivision. New vertices are appended, so the old
/// vertex ids stay valid; midpoints are pushed to the unit sphere when
/// `project` is set.
pub fn subdivide(coords: &mut Vec<Vec3>, tris: &[[u32; 3]], project: bool) -> Vec<[u32; 3]> {
    let mut mid: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    let mut out = Vec::with_capacity(tris.len() * 4);
    let mut midpoint = |a: u32, b: u32, coords: &mut Vec<Vec3>| -> u32 {
        let key = (a.min(b), a.max(b));
        *mid.entry(key).or_insert_with(|| {
            let p = math::scale(math::add(coords[a as usize], coords[b as usize]), 0.5);
            coords.push(if project { math::normalize(p) } else { p });
            (coords.len() - 1) as u32
        })
    };
    for t in tris {
        let ab = midpoint(t[0], t[1], coords);
        let bc = midpoint(t[1], t[2], coords);
        let ca = midpoint(t[2], t[0], coords);
        out.push([t[0], ab, ca]);
        out.push([t[1], bc, ab]);
        out.push([t[2], ca, bc]);
        out.push([ab, bc, ca]);
    }
    out
}

/// Signed volume contribution used to check outward orientation.
pub fn signed_volume(coords: &[Vec3], tris: &[[u32; 3]]) -> f64 {
    tris.iter()
        .map(|t| {
            let (a, b, c) = (coords[t[0] as usize], coords[t[1] as usize], coords[t[2] as usize]);
            math::dot(a, math::cross(b, c)) / 6.0
        })
        .sum()
}

pub fn triangle_area(coords: &[Vec3], t: [u32; 3]) -> f64 {
    let (a, b, c) = (coords[t[0] as usize], coords[t[1] as usize], coords[t[2] as usize]);
    0.5 * math::norm(math::cross(math::sub(b, a), math::sub(c, a)))
}
