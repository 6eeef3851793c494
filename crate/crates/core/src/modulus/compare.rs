use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{mass, mod_q, min_chain_sum, ModulusResult, Status};
use crate::graph::{edge_dijkstra, ApproxGraph};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodComparison {
    pub mod_ab: f64,
    pub mod_primed: f64,
    /// `sum w~^Q` for the transported weight.
    pub transported_mass: f64,
    /// `transported_mass / mod_ab`.
    pub c_est: f64,
    /// Lightest `A'`-`B'` chain under the transported weight.
    pub transported_min_chain: f64,
}

/// `w~(v) = sum of w(u) over u in B_G(v, s)`.
pub fn transported_weight(g: &ApproxGraph, w: &[f64], s: f64) -> Result<Vec<f64>> {
    (0..g.len())
        .map(|v| Ok(g.ball(v, s)?.iter().map(|&u| w[u]).sum()))
        .collect()
}

/// Compares `mod(A', B')` with `mod(A, B)` for `A' ⊆ N_s(A)`, `B' ⊆ N_s(B)`.
pub fn neighborhood_comparison(
    g: &ApproxGraph,
    a: &[usize],
    b: &[usize],
    a2: &[usize],
    b2: &[usize],
    s: f64,
    q: f64,
    tol: f64,
) -> Result<NeighborhoodComparison> {
    for (set, big) in [(a2, a), (b2, b)] {
        let nb = g.neighborhood(big, s)?;
        if let Some(&v) = set.iter().find(|v| nb.binary_search(v).is_err()) {
            return Err(Error::InclusionViolated(v));
        }
    }
    let m = mod_q(g, a, b, q, tol)?;
    let m2 = mod_q(g, a2, b2, q, tol)?;
    let wt = transported_weight(g, &m.weights, s)?;
    let tm = mass(&wt, q);
    Ok(NeighborhoodComparison {
        mod_ab: m.value,
        mod_primed: m2.value,
        transported_mass: tm,
        c_est: if m.value > 0.0 { tm / m.value } else { 0.0 },
        transported_min_chain: min_chain_sum(&wt, g, a2, b2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerrandEstimate {
    pub value: f64,
    pub chain_e: Vec<usize>,
    pub chain_f: Vec<usize>,
    pub result: ModulusResult,
}

/// Random-length shortest path from `s` to `t` (unit lengths when `jitter` is 0).
fn jittered_path(g: &ApproxGraph, s: usize, t: usize, jitter: f64, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let len: Vec<Vec<f64>> = g
        .adjacency()
        .iter()
        .map(|l| l.iter().map(|_| 1.0 + jitter * rng.gen::<f64>()).collect())
        .collect();
    // Dijkstra from t gives distances; walk greedily from s
    let d = edge_dijkstra(g.adjacency(), &len, t);
    if !d[s].is_finite() {
        return None;
    }
    let mut path = vec![s];
    let mut x = s;
    while x != t {
        let mut nx = usize::MAX;
        for (i, &u) in g.neighbors(x).iter().enumerate() {
            let u = u as usize;
            if (d[u] + len[x][i] - d[x]).abs() <= 1e-12 * (1.0 + d[x]) {
                nx = u;
                break;
            }
        }
        if nx == usize::MAX {
            return None;
        }
        path.push(nx);
        x = nx;
    }
    Some(path)
}

/// Upper estimate of the graph Ferrand cross-ratio `[v1, v2, v3, v4]_Q`:
/// the least `mod_Q(E, F)` over candidate chains `E ∋ v1, v3` and
/// `F ∋ v2, v4` (hop geodesics plus `budget` randomly perturbed geodesics).
pub fn ferrand_cr_graph(g: &ApproxGraph, v: [usize; 4], q: f64, budget: usize, seed: u64, tol: f64) -> Result<FerrandEstimate> {
    for i in 0..4 {
        if v[i] >= g.len() {
            return Err(Error::UnknownVertex(v[i]));
        }
        for j in 0..i {
            if v[i] == v[j] {
                return Err(Error::InvalidInput("vertices must be distinct".into()));
            }
        }
    }
    // edge lengths are symmetric, so a path from t to s is read backwards
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e0 = jittered_path(g, v[0], v[2], 0.0, &mut rng).ok_or(Error::NotConnected)?;
    let f0 = jittered_path(g, v[1], v[3], 0.0, &mut rng).ok_or(Error::NotConnected)?;
    let mut es = vec![e0];
    let mut fs = vec![f0];
    for k in 0..budget {
        let j = 0.25 + 2.0 * (k as f64 + 1.0) / (budget as f64 + 1.0);
        if k % 2 == 0 {
            if let Some(p) = jittered_path(g, v[0], v[2], j, &mut rng) {
                if !es.contains(&p) {
                    es.push(p);
                }
            }
        } else if let Some(p) = jittered_path(g, v[1], v[3], j, &mut rng) {
            if !fs.contains(&p) {
                fs.push(p);
            }
        }
    }
    let mut best: Option<FerrandEstimate> = None;
    for e in &es {
        for f in &fs {
            let r = mod_q(g, e, f, q, tol)?;
            if best.as_ref().map_or(true, |b| r.value < b.value) {
                best = Some(FerrandEstimate { value: r.value, chain_e: e.clone(), chain_f: f.clone(), result: r });
            }
        }
    }
    let mut b = best.unwrap();
    b.result.status = match b.result.status {
        Status::NoChains => Status::NoChains,
        _ => Status::UpperBoundOnly,
    };
    Ok(b)
}
