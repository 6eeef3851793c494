//! The snowball: a cube whose faces are repeatedly bumped outward.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{MeshedSphere, MetricMode};
use crate::{Error, Result};

/// Deepest level generated (level 3 has 146 334 squares).
pub const MAX_LEVEL: u32 = 3;

/// Similarity dimension `log 29 / log 5`.
pub fn similarity_dimension() -> f64 {
    libm::log(29.0) / libm::log(5.0)
}

type I3 = [i64; 3];

fn add(a: I3, b: I3) -> I3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn div(a: I3, k: i64) -> I3 {
    [a[0] / k, a[1] / k, a[2] / k]
}

fn mul(a: I3, k: i64) -> I3 {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn cross(a: I3, b: I3) -> I3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Square with corners `o, o+u, o+u+v, o+v` (integer coordinates over a
/// common denominator); the outward normal is `u x v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Square {
    pub origin: I3,
    pub u: I3,
    pub v: I3,
}

impl Square {
    pub fn corners(&self) -> [I3; 4] {
        let o = self.origin;
        [o, add(o, self.u), add(add(o, self.u), self.v), add(o, self.v)]
    }

    /// Unit outward normal (axis-aligned).
    pub fn normal(&self) -> I3 {
        let c = cross(self.u, self.v);
        let s = self.side();
        div(c, s * s)
    }

    pub fn side(&self) -> i64 {
        self.u.iter().map(|x| x.abs()).sum()
    }

    fn bbox(&self) -> (I3, I3) {
        let c = self.corners();
        let mut lo = c[0];
        let mut hi = c[0];
        for p in &c[1..] {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// The 29 squares replacing this one.
    fn refine(&self, out: &mut Vec<Square>) {
        let a = div(self.u, 5);
        let b = div(self.v, 5);
        let h = mul(self.normal(), self.side() / 5);
        for i in 0..5 {
            for j in 0..5 {
                let o = add(add(self.origin, mul(a, i)), mul(b, j));
                if i == 2 && j == 2 {
                    let top = add(o, h);
                    out.push(Square { origin: top, u: a, v: b });
                    out.push(Square { origin: o, u: a, v: h });
                    out.push(Square { origin: add(o, b), u: h, v: a });
                    out.push(Square { origin: o, u: h, v: b });
                    out.push(Square { origin: add(o, a), u: b, v: h });
                } else {
                    out.push(Square { origin: o, u: a, v: b });
                }
            }
        }
    }
}

/// Square complexes `Z_0, ..., Z_n` over the denominator `5^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareComplex {
    pub denominator: i64,
    pub levels: Vec<Vec<Square>>,
}

impl SquareComplex {
    pub fn level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn squares(&self, level: usize) -> &[Square] {
        &self.levels[level]
    }

    /// Corner coordinate as an exact `num/den` string in lowest terms.
    pub fn rational(&self, x: i64) -> String {
        let g = gcd(x.abs(), self.denominator);
        let (n, d) = (x / g, self.denominator / g);
        if d == 1 {
            format!("{n}")
        } else {
            format!("{n}/{d}")
        }
    }

    /// Exact check that the squares of a level form an embedded complex:
    /// any two meet in nothing, a common corner, or a common full edge.
    pub fn check_embedded(&self, level: usize) -> Result<()> {
        let sq = &self.levels[level];
        let mut boxes: Vec<(I3, I3, usize)> = sq.iter().enumerate().map(|(i, s)| {
            let (lo, hi) = s.bbox();
            (lo, hi, i)
        }).collect();
        boxes.sort_by_key(|b| b.0[0]);
        for i in 0..boxes.len() {
            let (lo1, hi1, a) = boxes[i];
            for &(lo2, hi2, b) in &boxes[i + 1..] {
                if lo2[0] > hi1[0] {
                    break;
                }
                let mut lo = [0; 3];
                let mut hi = [0; 3];
                let mut empty = false;
                for k in 0..3 {
                    lo[k] = lo1[k].max(lo2[k]);
                    hi[k] = hi1[k].min(hi2[k]);
                    empty |= lo[k] > hi[k];
                }
                if empty {
                    continue;
                }
                let dim = (0..3).filter(|&k| lo[k] < hi[k]).count();
                let ok = match dim {
                    0 => is_corner(&sq[a], lo) && is_corner(&sq[b], lo),
                    1 => is_edge(&sq[a], lo, hi) && is_edge(&sq[b], lo, hi),
                    _ => false,
                };
                if !ok {
                    return Err(Error::InvalidInput(format!("squares {a} and {b} overlap")));
                }
            }
        }
        Ok(())
    }

    /// Triangulated corner mesh of every level; corner ids of coarser
    /// levels are a prefix of the finer ones.
    pub fn mesh(&self) -> MeshedSphere {
        let mut ids: BTreeMap<I3, u32> = BTreeMap::new();
        let mut coords = Vec::new();
        let mut levels = Vec::new();
        let mut counts = Vec::new();
        let den = self.denominator as f64;
        for sqs in &self.levels {
            let mut tris = Vec::with_capacity(2 * sqs.len());
            for s in sqs {
                let c = s.corners().map(|p| {
                    *ids.entry(p).or_insert_with(|| {
                        coords.push([p[0] as f64 / den, p[1] as f64 / den, p[2] as f64 / den]);
                        (coords.len() - 1) as u32
                    })
                });
                tris.push([c[0], c[1], c[2]]);
                tris.push([c[0], c[2], c[3]]);
            }
            counts.push(coords.len());
            levels.push(tris);
        }
        MeshedSphere::from_parts(coords, levels, counts, MetricMode::Chordal, "snowball")
    }
}

fn is_corner(s: &Square, p: I3) -> bool {
    s.corners().contains(&p)
}

fn is_edge(s: &Square, lo: I3, hi: I3) -> bool {
    let c = s.corners();
    (0..4).any(|k| {
        let (a, b) = (c[k], c[(k + 1) % 4]);
        let (elo, ehi) = ([a[0].min(b[0]), a[1].min(b[1]), a[2].min(b[2])], [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]);
        elo == lo && ehi == hi
    })
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Snowball complexes up to `level`.
pub fn snowball(level: u32) -> Result<SquareComplex> {
    if level > MAX_LEVEL {
        return Err(Error::LevelTooDeep(level));
    }
    let s = 5i64.pow(level);
    let (x, y, z) = ([s, 0, 0], [0, s, 0], [0, 0, s]);
    let zero = [0, 0, 0];
    let cube = alloc::vec![
        Square { origin: zero, u: y, v: x },
        Square { origin: z, u: x, v: y },
        Square { origin: zero, u: x, v: z },
        Square { origin: y, u: z, v: x },
        Square { origin: zero, u: z, v: y },
        Square { origin: x, u: y, v: z },
    ];
    let mut levels = alloc::vec![cube];
    for _ in 0..level {
        let prev = levels.last().unwrap();
        let mut next = Vec::with_capacity(prev.len() * 29);
        for sq in prev {
            sq.refine(&mut next);
        }
        levels.push(next);
    }
    Ok(SquareComplex { denominator: s, levels })
}
