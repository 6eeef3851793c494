//! Sphere meshes graded towards a point by longest-edge bisection.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{round_sphere, MeshedSphere, MetricMode};
use crate::math::{self, Vec3};
use crate::{Error, Result};

/// Refinement stops with an error beyond this many vertices.
pub const MAX_VERTICES: usize = 200_000;

struct Lepp {
    coords: Vec<Vec3>,
    tris: Vec<[u32; 3]>,
    alive: Vec<bool>,
    edges: BTreeMap<(u32, u32), Vec<usize>>,
}

fn key(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

impl Lepp {
    fn new(coords: Vec<Vec3>, tris: Vec<[u32; 3]>) -> Self {
        let mut s = Lepp { coords, tris: Vec::new(), alive: Vec::new(), edges: BTreeMap::new() };
        for t in tris {
            s.add(t);
        }
        s
    }

    fn add(&mut self, t: [u32; 3]) {
        let id = self.tris.len();
        self.tris.push(t);
        self.alive.push(true);
        for k in 0..3 {
            self.edges.entry(key(t[k], t[(k + 1) % 3])).or_default().push(id);
        }
    }

    fn kill(&mut self, id: usize) {
        self.alive[id] = false;
        let t = self.tris[id];
        for k in 0..3 {
            let e = key(t[k], t[(k + 1) % 3]);
            if let Some(l) = self.edges.get_mut(&e) {
                l.retain(|&x| x != id);
                if l.is_empty() {
                    self.edges.remove(&e);
                }
            }
        }
    }

    fn len(&self, e: (u32, u32)) -> f64 {
        math::dist(self.coords[e.0 as usize], self.coords[e.1 as usize])
    }

    /// Longest edge with a deterministic tie-break on vertex ids.
    fn longest(&self, id: usize) -> (u32, u32) {
        let t = self.tris[id];
        let mut best = key(t[0], t[1]);
        for k in 1..3 {
            let e = key(t[k], t[(k + 1) % 3]);
            let (le, lb) = (self.len(e), self.len(best));
            if le > lb || (le == lb && e > best) {
                best = e;
            }
        }
        best
    }

    fn bisect(&mut self, e: (u32, u32)) {
        let m = math::normalize(math::scale(math::add(self.coords[e.0 as usize], self.coords[e.1 as usize]), 0.5));
        self.coords.push(m);
        let mid = (self.coords.len() - 1) as u32;
        let owners = self.edges.get(&e).cloned().unwrap_or_default();
        for id in owners {
            let t = self.tris[id];
            let k = (0..3).find(|&k| key(t[k], t[(k + 1) % 3]) == e).unwrap();
            let (x, y, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            self.kill(id);
            self.add([x, mid, c]);
            self.add([mid, y, c]);
        }
    }

    fn refine(&mut self, t: usize) {
        while self.alive[t] {
            let mut cur = t;
            loop {
                let e = self.longest(cur);
                let nb = self.edges[&e].iter().copied().find(|&x| x != cur);
                match nb {
                    Some(nb) if self.longest(nb) != e => cur = nb,
                    _ => {
                        self.bisect(e);
                        break;
                    }
                }
            }
        }
    }
}

/// Unit-sphere mesh whose triangles have longest edge at most
/// `eta * (scale + |z0 - x|)` at their centroid `x`, refined from the
/// icosahedral mesh of the given level.
pub fn graded_sphere(z0: Vec3, scale: f64, eta: f64, base_level: usize) -> Result<MeshedSphere> {
    if !(scale > 0.0 && eta > 0.0) {
        return Err(Error::BadRadius(scale.min(eta)));
    }
    let base = round_sphere(base_level);
    let z0 = math::normalize(z0);
    let mut l = Lepp::new(base.coords().to_vec(), base.triangles(base_level)?.to_vec());
    let needs = |l: &Lepp, id: usize| {
        let t = l.tris[id];
        let c = math::scale(
            math::add(math::add(l.coords[t[0] as usize], l.coords[t[1] as usize]), l.coords[t[2] as usize]),
            1.0 / 3.0,
        );
        let e = l.longest(id);
        l.len(e) > eta * (scale + math::dist(z0, c))
    };
    let mut i = 0;
    while i < l.tris.len() {
        if l.alive[i] && needs(&l, i) {
            l.refine(i);
            if l.coords.len() > MAX_VERTICES {
                return Err(Error::InvalidInput("graded mesh exceeds the vertex budget".into()));
            }
        }
        i += 1;
    }
    let tris: Vec<[u32; 3]> = l.tris.iter().zip(&l.alive).filter(|(_, &a)| a).map(|(t, _)| *t).collect();
    let n = l.coords.len();
    let counts = vec![n];
    Ok(MeshedSphere::from_parts(l.coords, vec![tris], counts, MetricMode::Chordal, "graded_sphere"))
}
