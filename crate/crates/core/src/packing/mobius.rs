//! Möbius transformations of the sphere acting on caps, in inversive
//! (Lorentz) coordinates: a cap with center `n` and angular radius `θ` is
//! the unit spacelike vector `(n / sin θ, cot θ)`.

use crate::math::{self, Vec3};
use crate::{Error, Result};

pub type Cap4 = [f64; 4];

pub fn cap_vector(center: Vec3, radius: f64) -> Cap4 {
    let s = math::sin(radius);
    [center[0] / s, center[1] / s, center[2] / s, math::cos(radius) / s]
}

/// Center and angular radius of a cap vector.
pub fn cap_from_vector(c: Cap4) -> (Vec3, f64) {
    let v = [c[0], c[1], c[2]];
    let nv = math::norm(v);
    (math::scale(v, 1.0 / nv), math::atan2(1.0, c[3]))
}

pub fn minkowski(a: Cap4, b: Cap4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

/// Lorentz boost with rapidity vector `beta` (direction and magnitude).
pub fn boost(x: Cap4, beta: Vec3) -> Cap4 {
    let phi = math::norm(beta);
    if phi == 0.0 {
        return x;
    }
    let u = math::scale(beta, 1.0 / phi);
    let ux = u[0] * x[0] + u[1] * x[1] + u[2] * x[2];
    let (ch, sh) = (math::cosh(phi), math::sinh(phi));
    let k = (ch - 1.0) * ux + sh * x[3];
    [x[0] + k * u[0], x[1] + k * u[1], x[2] + k * u[2], ch * x[3] + sh * ux]
}

/// Image of a point of the sphere under the boost.
pub fn boost_point(p: Vec3, beta: Vec3) -> Vec3 {
    let y = boost([p[0], p[1], p[2], 1.0], beta);
    math::normalize([y[0] / y[3], y[1] / y[3], y[2] / y[3]])
}

/// Rotation applied to the spatial part.
pub fn rotate_cap(c: Cap4, axis: Vec3, angle: f64) -> Cap4 {
    let v = math::rotate([c[0], c[1], c[2]], axis, angle);
    [v[0], v[1], v[2], c[3]]
}

/// Rotation taking unit vector `a` to unit vector `b`, as (axis, angle).
pub fn rotation_between(a: Vec3, b: Vec3) -> (Vec3, f64) {
    let ax = math::cross(a, b);
    let n = math::norm(ax);
    let ang = math::atan2(n, math::dot(a, b));
    if n < 1e-300 {
        if math::dot(a, b) > 0.0 {
            ([0.0, 0.0, 1.0], 0.0)
        } else {
            (math::orthogonal(a), math::PI)
        }
    } else {
        (math::scale(ax, 1.0 / n), ang)
    }
}

/// Vector Minkowski-orthogonal to three cap vectors (the common orthogonal
/// circle), normalized to unit length; errors when it is not spacelike.
pub fn common_orthogonal(c: [Cap4; 3]) -> Result<Cap4> {
    // Euclidean 4D cross product, then flip the time sign
    let m = |i: usize, j: usize| c[i][j];
    let det3 = |cols: [usize; 3]| {
        let a = |r: usize, k: usize| m(r, cols[k]);
        a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
    };
    let e = [det3([1, 2, 3]), -det3([0, 2, 3]), det3([0, 1, 3]), -det3([0, 1, 2])];
    let v = [e[0], e[1], e[2], -e[3]];
    let q = minkowski(v, v);
    let scale = v.iter().map(|x| x * x).sum::<f64>();
    if !(q > 1e-12 * scale) {
        return Err(Error::DegenerateTriple);
    }
    let s = 1.0 / math::sqrt(q);
    Ok([v[0] * s, v[1] * s, v[2] * s, v[3] * s])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boost_preserves_form_and_caps() {
        let c = cap_vector(math::normalize([1.0, 2.0, -0.5]), 0.7);
        assert!((minkowski(c, c) - 1.0).abs() < 1e-14);
        let b = boost(c, [0.3, -0.2, 0.5]);
        assert!((minkowski(b, b) - 1.0).abs() < 1e-12);
        // a boundary point of the cap stays on the image cap's boundary
        let (n, r) = cap_from_vector(c);
        let p = math::rotate(n, math::orthogonal(n), r);
        let q = boost_point(p, [0.3, -0.2, 0.5]);
        let (n2, r2) = cap_from_vector(b);
        assert!((math::angle_between(n2, q) - r2).abs() < 1e-12);
    }
}
