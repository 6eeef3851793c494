use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{mass, min_chain_sum, mod_q, ModulusResult, Status};
use crate::approx::{vertex_set_of, KApproximation};
use crate::metric::{ContinuumSample, FiniteMetricSpace};
use crate::{Error, Result};

/// `(V_B, V_{Z \ λB})` for `B = B(a, r)`; the second set is `None` when
/// `λB` covers the sample.
pub fn annulus_vertex_sets(a: &KApproximation, z: &FiniteMetricSpace, center: usize, r: f64, lambda: f64) -> (Vec<usize>, Option<Vec<usize>>) {
    let inner = z.ball(center, r);
    let outer: Vec<usize> = (0..z.len()).filter(|&x| !(z.dist(center, x) < lambda * r)).collect();
    let vb = a.vertex_set_of_points(&inner);
    if outer.is_empty() {
        return (vb, None);
    }
    (vb, Some(a.vertex_set_of_points(&outer)))
}

/// `mod_2(V_B, V_{Z \ λB})`, zero when `λB` is all of `Z`.
pub fn annulus_modulus(a: &KApproximation, z: &FiniteMetricSpace, center: usize, r: f64, lambda: f64, tol: f64) -> Result<ModulusResult> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidInput("lambda must exceed 1".into()));
    }
    if !(r > 0.0) {
        return Err(Error::BadRadius(r));
    }
    let (vb, vo) = annulus_vertex_sets(a, z, center, r, lambda);
    match vo {
        None => Ok(ModulusResult {
            value: 0.0,
            weights: vec![0.0; a.len()],
            active_chains: Vec::new(),
            status: Status::NoChains,
            q: 2.0,
            lower_bound: 0.0,
            iterations: 0,
        }),
        Some(vo) => mod_q(&a.graph, &vb, &vo, 2.0, tol),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelescopeReport {
    /// Number of nested annuli `N`.
    pub n: usize,
    /// Pointwise supremum of the annulus weights.
    pub weights: Vec<f64>,
    /// `sum w_i^2` for each annulus.
    pub annulus_masses: Vec<f64>,
    /// `sum w^2`.
    pub mass: f64,
    /// Lightest `V_E`-`V_F` chain under `w / N`.
    pub scaled_min_chain: f64,
    pub scaled_admissible: bool,
}

/// Nested annuli `B_i = B(a, λ^(2i-2) r)` with `r = 2 diam E` between `E`
/// and `F`: combines admissible annulus weights by pointwise supremum and
/// checks that `w / N` is admissible for `(V_E, V_F)`. Annulus weights are
/// computed when not supplied.
pub fn telescope_weight(
    a: &KApproximation,
    z: &FiniteMetricSpace,
    e: &ContinuumSample,
    f: &ContinuumSample,
    lambda: f64,
    supplied: Option<Vec<Vec<f64>>>,
    tol: f64,
) -> Result<TelescopeReport> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidInput("lambda must exceed 1".into()));
    }
    let (e, f) = if e.diam() <= f.diam() { (e, f) } else { (f, e) };
    let center = e.points()[0];
    let r = 2.0 * e.diam();
    let dist = z.set_distance(e.points(), f.points());
    // largest N with r λ^(2N - 1) < dist(E, F)
    let mut n = 0usize;
    while r * libm::pow(lambda, 2.0 * (n + 1) as f64 - 1.0) < dist {
        n += 1;
    }
    if n == 0 {
        return Err(Error::AnnulusCountZero);
    }
    let ws: Vec<Vec<f64>> = match supplied {
        Some(ws) => {
            if ws.len() != n || ws.iter().any(|w| w.len() != a.len()) {
                return Err(Error::InvalidInput("annulus weights do not match the annulus count".into()));
            }
            ws
        }
        None => (1..=n)
            .map(|i| {
                let ri = r * libm::pow(lambda, 2.0 * i as f64 - 2.0);
                annulus_modulus(a, z, center, ri, lambda, tol).map(|m| m.weights)
            })
            .collect::<Result<_>>()?,
    };
    let mut w = vec![0.0f64; a.len()];
    for wi in &ws {
        for (x, y) in w.iter_mut().zip(wi) {
            *x = x.max(*y);
        }
    }
    let scaled: Vec<f64> = w.iter().map(|x| x / n as f64).collect();
    let v_e = vertex_set_of(e, a);
    let v_f = vertex_set_of(f, a);
    let m = min_chain_sum(&scaled, &a.graph, &v_e, &v_f);
    Ok(TelescopeReport {
        n,
        annulus_masses: ws.iter().map(|wi| mass(wi, 2.0)).collect(),
        mass: mass(&w, 2.0),
        weights: w,
        scaled_min_chain: m,
        scaled_admissible: m >= 1.0 - tol,
    })
}
