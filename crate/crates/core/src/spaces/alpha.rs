//! Sphere with a cap whose metric is `|x1 - x2| + |y1 - y2|^alpha` in cap coordinates.

use serde::{Deserialize, Serialize};

use crate::math::{self, Vec3};
use crate::{Error, Result};

/// Width of the transition annulus as a fraction of the cap radius.
pub const BLEND: f64 = 0.1;

/// `d(p, q) = max(|p - q|, d_alpha(phi(p), phi(q)))`, where `phi` is the
/// azimuthal chart of the cap, squeezed to the origin across the
/// transition annulus so it vanishes outside the cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaPatch {
    pub alpha: f64,
    pub center: Vec3,
    /// Angular cap radius.
    pub radius: f64,
    e1: Vec3,
    e2: Vec3,
}

/// `|x1 - x2| + |y1 - y2|^alpha`.
pub fn d_alpha(a: [f64; 2], b: [f64; 2], alpha: f64) -> f64 {
    (a[0] - b[0]).abs() + math::powf((a[1] - b[1]).abs(), alpha)
}

impl AlphaPatch {
    pub fn new(alpha: f64, center: Vec3, radius: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::BadAlpha(alpha));
        }
        if !(radius > 0.0 && radius * (1.0 + BLEND) < math::PI) {
            return Err(Error::BadRadius(radius));
        }
        let c = math::normalize(center);
        let e1 = math::orthogonal(c);
        let e2 = math::cross(c, e1);
        Ok(AlphaPatch { alpha, center: c, radius, e1, e2 })
    }

    /// Cap chart.
    pub fn chart(&self, p: Vec3) -> [f64; 2] {
        let rho = math::angle_between(self.center, p);
        let rc = self.radius;
        let s = if rho <= rc {
            rho
        } else if rho < rc * (1.0 + BLEND) {
            rc * (rc * (1.0 + BLEND) - rho) / (rc * BLEND)
        } else {
            return [0.0, 0.0];
        };
        let th = math::atan2(math::dot(p, self.e2), math::dot(p, self.e1));
        [s * math::cos(th), s * math::sin(th)]
    }

    /// Point of the unit sphere with cap coordinates `(x, y)`, `x^2 + y^2 <= radius^2`.
    pub fn cap_point(&self, x: f64, y: f64) -> Vec3 {
        let rho = math::hypot(x, y);
        if rho == 0.0 {
            return self.center;
        }
        let dir = math::add(math::scale(self.e1, x / rho), math::scale(self.e2, y / rho));
        math::add(math::scale(self.center, math::cos(rho)), math::scale(dir, math::sin(rho)))
    }

    /// The patch term alone.
    pub fn patch_distance(&self, p: Vec3, q: Vec3) -> f64 {
        d_alpha(self.chart(p), self.chart(q), self.alpha)
    }

    pub fn dist(&self, p: Vec3, q: Vec3) -> f64 {
        math::dist(p, q).max(self.patch_distance(p, q))
    }
}
