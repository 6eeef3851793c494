//! Moving a planar layout onto the sphere through a Möbius map, keeping
//! the relative accuracy of circles that are tiny in the plane.

use super::dd::Dd;
use super::Circle;
use crate::math::{self, Vec3};

type C = (f64, f64);

fn mul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn sub(a: C, b: C) -> C {
    (a.0 - b.0, a.1 - b.1)
}

fn neg(a: C) -> C {
    (-a.0, -a.1)
}

/// `z -> (a z + b) / (c z + d)`, optionally after complex conjugation.
#[derive(Debug, Clone, Copy)]
pub(super) struct Mobius {
    m: [C; 4],
    conj: bool,
}

fn compose(p: [C; 4], q: [C; 4]) -> [C; 4] {
    [
        (mul(p[0], q[0]).0 + mul(p[1], q[2]).0, mul(p[0], q[0]).1 + mul(p[1], q[2]).1),
        (mul(p[0], q[1]).0 + mul(p[1], q[3]).0, mul(p[0], q[1]).1 + mul(p[1], q[3]).1),
        (mul(p[2], q[0]).0 + mul(p[3], q[2]).0, mul(p[2], q[0]).1 + mul(p[3], q[2]).1),
        (mul(p[2], q[1]).0 + mul(p[3], q[3]).0, mul(p[2], q[1]).1 + mul(p[3], q[3]).1),
    ]
}

/// Sends `z1, z2, z3` to `0, 1, infinity`.
fn to_standard(z: [C; 3]) -> [C; 4] {
    let (a, c) = (sub(z[1], z[2]), sub(z[1], z[0]));
    [a, neg(mul(z[0], a)), c, neg(mul(z[2], c))]
}

impl Mobius {
    /// The map taking each `z[i]` to `w[i]`.
    pub fn through(z: [C; 3], w: [C; 3], conj: bool) -> Mobius {
        let z = if conj { z.map(|p| (p.0, -p.1)) } else { z };
        let f = to_standard(z);
        let g = to_standard(w);
        let g_inv = [g[3], neg(g[1]), neg(g[2]), g[0]];
        Mobius { m: compose(g_inv, f), conj }
    }

    /// Image of a point, `None` for infinity.
    pub fn apply(&self, x: Dd, y: Dd) -> Option<(Dd, Dd)> {
        let y = if self.conj { -y } else { y };
        let lin = |p: C, q: C| -> (Dd, Dd) {
            let re = x * p.0 - y * p.1 + Dd::from(q.0);
            let im = x * p.1 + y * p.0 + Dd::from(q.1);
            (re, im)
        };
        let (nr, ni) = lin(self.m[0], self.m[1]);
        let (dr, di) = lin(self.m[2], self.m[3]);
        let den = dr.sq() + di.sq();
        if den.hi == 0.0 {
            return None;
        }
        Some(((nr * dr + ni * di) / den, (ni * dr - nr * di) / den))
    }

    /// Image of infinity.
    pub fn at_infinity(&self) -> Option<(Dd, Dd)> {
        let (a, c) = (self.m[0], self.m[2]);
        let den = c.0 * c.0 + c.1 * c.1;
        if den == 0.0 {
            return None;
        }
        let (a, c) = (Dd::from(a.0), Dd::from(a.1));
        let (p, q) = (Dd::from(self.m[2].0), Dd::from(self.m[2].1));
        let den = Dd::from(den);
        Some(((a * p + c * q) / den, (c * p - a * q) / den))
    }
}

/// Inverse stereographic projection matching the planar lift.
pub(super) fn to_sphere(z: Option<(Dd, Dd)>) -> Vec3 {
    match z {
        None => [0.0, 0.0, 1.0],
        Some((x, y)) => {
            let m2 = x.sq() + y.sq();
            let den = m2 + Dd::from(1.0);
            [(x * 2.0 / den).f(), (y * 2.0 / den).f(), ((m2 - Dd::from(1.0)) / den).f()]
        }
    }
}

/// Planar point of the sphere, the inverse of [`to_sphere`].
pub(super) fn to_plane(p: Vec3) -> C {
    // 1 - z computed without cancellation near the south pole
    let den = if p[2] > 0.0 { (p[0] * p[0] + p[1] * p[1]) / (1.0 + p[2]) } else { 1.0 - p[2] };
    (p[0] / den, p[1] / den)
}

/// Cap through three boundary points, on the side of `inside`.
fn cap_through(p: [Vec3; 3], inside: Vec3) -> (Vec3, f64) {
    let n = math::normalize(math::cross(math::sub(p[1], p[0]), math::sub(p[2], p[0])));
    let n = if math::dot(n, inside) < math::dot(n, p[0]) { math::scale(n, -1.0) } else { n };
    let r = (0..3).map(|i| math::angle_between(n, p[i])).sum::<f64>() / 3.0;
    (n, r)
}

/// Cap on the sphere of the region bounded by the image of a planar circle.
/// `lower` selects the half-plane below a line instead of above it.
pub(super) fn image_cap(m: &Mobius, c: Circle, lower: bool) -> (Vec3, f64) {
    let img = |x: Dd, y: Dd| to_sphere(m.apply(x, y));
    if c.line {
        let one = Dd::from(1.0);
        let pts = [img(c.x - one, c.y), img(c.x + one, c.y), to_sphere(m.at_infinity())];
        let inside = if lower { img(c.x, c.y - one) } else { img(c.x, c.y + one) };
        return cap_through(pts, inside);
    }
    let pts = [0.0, 1.0, 2.0].map(|k| {
        let t = k * math::TAU / 3.0;
        img(c.x + c.r * math::cos(t), c.y + c.r * math::sin(t))
    });
    cap_through(pts, img(c.x, c.y))
}
