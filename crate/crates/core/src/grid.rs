//! Uniform-cell spatial index over ambient coordinates.
//!
//! Used only as a candidate filter: every metric that opts into the index
//! dominates the chordal distance, so a chordal range query never misses a
//! point of the exact metric ball.

use alloc::vec::Vec;

use crate::math::Vec3;

#[derive(Debug, Clone)]
pub struct Grid {
    cell: f64,
    origin: Vec3,
    /// (cell key, point index), sorted by key.
    entries: Vec<([i32; 3], u32)>,
    len: usize,
}

impl Grid {
    pub fn new(points: &[Vec3]) -> Self {
        let n = points.len().max(1);
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 3];
            hi = [1.0; 3];
        }
        let extent = (0..3).map(|k| hi[k] - lo[k]).fold(0.0f64, f64::max).max(1e-300);
        // Point sets here are mostly surface samples: spacing ~ extent / sqrt(n).
        let cell = 2.0 * extent / crate::math::sqrt(n as f64).max(1.0);
        let mut g = Grid {
            cell,
            origin: lo,
            entries: Vec::with_capacity(points.len()),
            len: points.len(),
        };
        for (i, p) in points.iter().enumerate() {
            let key = g.key(*p);
            g.entries.push((key, i as u32));
        }
        g.entries.sort_unstable();
        g
    }

    fn key(&self, p: Vec3) -> [i32; 3] {
        let f = |k: usize| crate::math::floor((p[k] - self.origin[k]) / self.cell) as i32;
        [f(0), f(1), f(2)]
    }

    /// Indices of all points whose cell intersects the cube of half-width
    /// `radius` around `p`; a superset of the chordal ball. Returns `None`
    /// when the query would touch so many cells that a linear scan is cheaper.
    pub fn candidates(&self, p: Vec3, radius: f64) -> Option<Vec<u32>> {
        let span = crate::math::ceil(radius / self.cell);
        if !(span <= 1e6) || ((2.0 * span + 1.0) * (2.0 * span + 1.0) * (2.0 * span + 1.0)) as usize > self.len.max(64) {
            return None;
        }
        let c = self.key(p);
        let span = span as i32;
        let mut out = Vec::new();
        for dx in -span..=span {
            for dy in -span..=span {
                // z-runs are contiguous in the sorted order
                let lo = [c[0] + dx, c[1] + dy, c[2] - span];
                let hi = [c[0] + dx, c[1] + dy, c[2] + span];
                let start = self.entries.partition_point(|e| e.0 < lo);
                for e in &self.entries[start..] {
                    if e.0 > hi {
                        break;
                    }
                    out.push(e.1);
                }
            }
        }
        Some(out)
    }
}
