use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{mass, min_chain_sum};
use crate::approx::{vertex_set_of, KApproximation};
use crate::metric::{relative_distance, ContinuumSample, FiniteMetricSpace};
use crate::{Error, Result};

/// The logarithmic weight for two far-apart continua and its mass bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fcr2Certificate {
    pub weights: Vec<f64>,
    pub delta: f64,
    /// Diameter of the smaller continuum.
    pub r: f64,
    pub z0: usize,
    pub v_e: Vec<usize>,
    pub v_f: Vec<usize>,
    /// `sum w^Q` of the unscaled weight.
    pub raw_mass: f64,
    /// Lightest `V_E`-`V_F` chain under the unscaled weight.
    pub min_chain: f64,
    /// Factor making the weight admissible (`max(1, 1/min_chain)`).
    pub rescale: f64,
    /// `rescale^Q * raw_mass`, an upper bound for `mod_Q(V_E, V_F)`.
    pub certified_bound: f64,
    pub admissible: bool,
    /// The mesh-refined bound when a lower regularity exponent is supplied.
    pub refined_bound: Option<f64>,
}

/// Builds `w(v) = r(v) / (log Δ (R + d(z0, p(v))))` on `d(z0, p(v)) <= R Δ`
/// (zero elsewhere), checks admissibility for `(V_E, V_F)` and returns the
/// resulting upper bound, rescaled when the weight falls short.
pub fn fcr2_weight(
    a: &KApproximation,
    z: &FiniteMetricSpace,
    e: &ContinuumSample,
    f: &ContinuumSample,
    q: f64,
    q_prime: Option<f64>,
    tol: f64,
) -> Result<Fcr2Certificate> {
    if !(q > 1.0) {
        return Err(Error::InvalidInput("exponent Q must exceed 1".into()));
    }
    let delta = relative_distance(e, f, z)?;
    if !(delta >= 2.0) {
        return Err(Error::SeparationTooSmall(delta));
    }
    let (e, f) = if e.diam() <= f.diam() { (e, f) } else { (f, e) };
    let k = a.k_report().ok_or(Error::InvalidInput("approximation has no verified K".into()))?;
    let v_e = vertex_set_of(e, a);
    let v_f = vertex_set_of(f, a);
    for (c, vs) in [(e, &v_e), (f, &v_f)] {
        for v in a.graph.neighborhood(vs, k as f64)? {
            let st = a.star(v, k as f64)?;
            if c.points().iter().all(|x| st.binary_search(x).is_ok()) {
                return Err(Error::InvalidInput("continuum lies inside a K-star".into()));
            }
        }
    }
    let r = e.diam();
    // basepoint: the point of E with the smallest eccentricity in E
    let z0 = *e
        .points()
        .iter()
        .min_by(|&&x, &&y| {
            let ex = e.points().iter().map(|&t| z.dist(x, t)).fold(0.0, f64::max);
            let ey = e.points().iter().map(|&t| z.dist(y, t)).fold(0.0, f64::max);
            ex.total_cmp(&ey)
        })
        .unwrap();
    let ld = libm::log(delta);
    let reach = r * delta;
    let weights: Vec<f64> = (0..a.len())
        .map(|v| {
            let d = z.dist(z0, a.p[v]);
            if d <= reach {
                a.r[v] / (ld * (r + d))
            } else {
                0.0
            }
        })
        .collect();
    let raw_mass = mass(&weights, q);
    let min_chain = min_chain_sum(&weights, &a.graph, &v_e, &v_f);
    let rescale = if min_chain >= 1.0 - tol { 1.0 } else if min_chain > 0.0 { 1.0 / min_chain } else { f64::INFINITY };
    let certified_bound = libm::pow(rescale, q) * raw_mass;
    let refined_bound = match q_prime {
        Some(qp) if qp < q => {
            let mesh = a.mesh_size()?;
            let m = e.diam().min(f.diam());
            let inner: f64 = (0..a.len())
                .filter(|&v| weights[v] > 0.0)
                .map(|v| libm::pow(a.r[v] / (r + z.dist(z0, a.p[v])), qp))
                .sum();
            Some(libm::pow(rescale, q) * libm::pow(mesh / m, q - qp) * inner / libm::pow(ld, q))
        }
        _ => None,
    };
    Ok(Fcr2Certificate {
        weights,
        delta,
        r,
        z0,
        v_e,
        v_f,
        raw_mass,
        min_chain,
        rescale,
        certified_bound,
        admissible: min_chain >= 1.0 - tol,
        refined_bound,
    })
}

/// As [`fcr2_weight`], but a weight that is not admissible as constructed is
/// an error carrying the rescaling it would need.
pub fn fcr2_weight_strict(
    a: &KApproximation,
    z: &FiniteMetricSpace,
    e: &ContinuumSample,
    f: &ContinuumSample,
    q: f64,
    tol: f64,
) -> Result<Fcr2Certificate> {
    let c = fcr2_weight(a, z, e, f, q, None, tol)?;
    if !c.admissible {
        return Err(Error::AdmissibilityFailed { chain_sum: c.min_chain, rescale: c.rescale });
    }
    Ok(c)
}
