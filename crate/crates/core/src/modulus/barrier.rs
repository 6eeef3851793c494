//! Log-barrier solve of the modulus problem restricted to a finite chain
//! set, used for exponents other than 1 and 2.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Minimizes `sum w^q` subject to `sum_{v in c} w(v) >= 1` for each chain
/// `c` and `w >= 0`. Returns weights (indexed by vertex, `n` long) and the
/// dual lower bound for the restricted problem. `eps` is the target
/// relative accuracy.
pub(super) fn restricted_solve(chains: &[Vec<u32>], n: usize, q: f64, eps: f64, warm: Option<&[f64]>) -> (Vec<f64>, f64) {
    // local indexing of the vertices that occur in some chain
    let mut local = vec![u32::MAX; n];
    let mut verts: Vec<usize> = Vec::new();
    for c in chains {
        for &v in c {
            if local[v as usize] == u32::MAX {
                local[v as usize] = verts.len() as u32;
                verts.push(v as usize);
            }
        }
    }
    let k = verts.len();
    let m = chains.len();
    let ch: Vec<Vec<usize>> = chains.iter().map(|c| c.iter().map(|&v| local[v as usize] as usize).collect()).collect();
    let mut of_vertex: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (ci, c) in ch.iter().enumerate() {
        for &v in c {
            of_vertex[v].push(ci);
        }
    }
    let slack = |w: &[f64]| -> Vec<f64> { ch.iter().map(|c| c.iter().map(|&v| w[v]).sum::<f64>() - 1.0).collect() };
    // strictly feasible start
    let shortest = ch.iter().map(|c| c.len()).min().unwrap_or(1) as f64;
    let mut w: Vec<f64> = match warm {
        Some(wm) => verts.iter().map(|&v| wm[v].max(0.0) + 0.05 / shortest).collect(),
        None => vec![1.0 / shortest; k],
    };
    let s0 = slack(&w);
    let min_sum = s0.iter().fold(f64::INFINITY, |a, &x| a.min(x + 1.0));
    let lift = 1.5 / min_sum;
    if lift > 1.0 {
        w.iter_mut().for_each(|x| *x *= lift);
    }
    let mass = |w: &[f64]| -> f64 { w.iter().map(|&x| math::powf(x, q)).sum() };
    let barrier = |w: &[f64], t: f64| -> f64 {
        let s = slack(w);
        if w.iter().any(|&x| x <= 0.0) || s.iter().any(|&x| x <= 0.0) {
            return f64::INFINITY;
        }
        t * mass(w) - s.iter().map(|&x| math::ln(x)).sum::<f64>() - w.iter().map(|&x| math::ln(x)).sum::<f64>()
    };
    let mut t = ((m + k) as f64 / mass(&w).max(1e-300)).max(1.0);
    loop {
        // centering by damped Newton with a Woodbury solve
        for _ in 0..100 {
            let s = slack(&w);
            let g: Vec<f64> = (0..k)
                .map(|v| t * q * math::powf(w[v], q - 1.0) - of_vertex[v].iter().map(|&c| 1.0 / s[c]).sum::<f64>() - 1.0 / w[v])
                .collect();
            let d: Vec<f64> = (0..k).map(|v| t * q * (q - 1.0) * math::powf(w[v], q - 2.0) + 1.0 / (w[v] * w[v])).collect();
            let y: Vec<f64> = (0..k).map(|v| -g[v] / d[v]).collect();
            let z: Vec<f64> = ch.iter().map(|c| c.iter().map(|&v| y[v]).sum()).collect();
            let mut a = vec![0.0; m * m];
            for c in 0..m {
                a[c * m + c] = s[c] * s[c];
            }
            for v in 0..k {
                let inv = 1.0 / d[v];
                for &c1 in &of_vertex[v] {
                    for &c2 in &of_vertex[v] {
                        a[c1 * m + c2] += inv;
                    }
                }
            }
            let Some(u) = math::solve_dense(a, z, 1e-300) else { break };
            let mut step = y.clone();
            for (c, cv) in ch.iter().enumerate() {
                for &v in cv {
                    step[v] -= u[c] / d[v];
                }
            }
            let dec: f64 = -(0..k).map(|v| g[v] * step[v]).sum::<f64>();
            if !(dec > 1e-12) {
                break;
            }
            let f0 = barrier(&w, t);
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let cand: Vec<f64> = (0..k).map(|v| w[v] + alpha * step[v]).collect();
                let f1 = barrier(&cand, t);
                if f1 <= f0 - 0.25 * alpha * dec {
                    w = cand;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if (m + k) as f64 / t <= eps * mass(&w) || t > 1e30 {
            break;
        }
        t *= 8.0;
    }
    // dual point from the central path
    let s = slack(&w);
    let mut rho = vec![0.0; k];
    let mut total = 0.0;
    for (c, cv) in ch.iter().enumerate() {
        let mu = 1.0 / (t * s[c]);
        total += mu;
        for &v in cv {
            rho[v] += mu;
        }
    }
    let e = q / (q - 1.0);
    let lower = total - (q - 1.0) * rho.iter().map(|&r| math::powf(r / q, e)).sum::<f64>();
    let mut out = vec![0.0; n];
    for (i, &v) in verts.iter().enumerate() {
        out[v] = w[i];
    }
    (out, lower)
}
