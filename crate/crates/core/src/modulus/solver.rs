//! Cutting-plane solver for the combinatorial Q-modulus.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::{barrier, ModulusResult, Status};
use crate::graph::{chain_tree, lightest_chain, ApproxGraph};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative duality gap and admissibility tolerance.
    pub tol: f64,
    /// Cap on the number of chains added.
    pub max_chains: usize,
    /// Violated chains added per separation round.
    pub batch: usize,
    /// Cap on coordinate-ascent sweeps over all rounds.
    pub max_sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-7, max_chains: 100_000, batch: 8, max_sweeps: 2_000_000 }
    }
}

fn validate(g: &ApproxGraph, a: &[usize], b: &[usize], q: f64) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("modulus needs nonempty vertex sets".into()));
    }
    if let Some(&v) = a.iter().chain(b).find(|&&v| v >= g.len()) {
        return Err(Error::UnknownVertex(v));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidInput("exponent Q must be at least 1".into()));
    }
    Ok(())
}

fn flags(n: usize, set: &[usize]) -> Vec<bool> {
    let mut f = vec![false; n];
    for &v in set {
        f[v] = true;
    }
    f
}

/// `mod_Q(A, B)` with default options and the given tolerance.
pub fn mod_q(g: &ApproxGraph, a: &[usize], b: &[usize], q: f64, tol: f64) -> Result<ModulusResult> {
    mod_q_with(g, a, b, q, &SolverOptions { tol, ..SolverOptions::default() })
}

/// Lightest chain under `w` and whether it has weight at least `1 - tol`.
/// With no chain at all the weight is vacuously admissible.
pub fn is_admissible(w: &[f64], g: &ApproxGraph, a: &[usize], b: &[usize], tol: f64) -> Result<(bool, Option<Vec<usize>>)> {
    validate(g, a, b, 1.0)?;
    if w.len() != g.len() || w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
    }
    match lightest_chain(g.adjacency(), w, a, &flags(g.len(), b)) {
        None => Ok((true, None)),
        Some((len, path)) => Ok((len >= 1.0 - tol, (len < 1.0 - tol).then_some(path))),
    }
}

/// Minimum chain weight from `a` to `b` under `w` (`+inf` without chains).
pub fn min_chain_sum(w: &[f64], g: &ApproxGraph, a: &[usize], b: &[usize]) -> f64 {
    lightest_chain(g.adjacency(), w, a, &flags(g.len(), b)).map_or(f64::INFINITY, |x| x.0)
}

struct Dual {
    q: f64,
    /// `1 / (Q - 1)`
    p: f64,
    chains: Vec<Vec<u32>>,
    mu: Vec<f64>,
    rho: Vec<f64>,
    w: Vec<f64>,
}

impl Dual {
    fn weight(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            0.0
        } else if self.p == 1.0 {
            rho / self.q
        } else {
            libm::pow(rho / self.q, self.p)
        }
    }

    fn value(&self) -> f64 {
        let s: f64 = self.mu.iter().sum();
        let e = self.q * self.p;
        let pen: f64 = self.rho.iter().map(|&r| if r > 0.0 { libm::pow(r / self.q, e) } else { 0.0 }).sum();
        s - (self.q - 1.0) * pen
    }

    fn chain_sum(&self, c: usize) -> f64 {
        self.chains[c].iter().map(|&v| self.w[v as usize]).sum()
    }

    /// Exact maximization of the dual along `mu_c`.
    fn update(&mut self, c: usize) -> f64 {
        let mu = self.mu[c];
        let chain = &self.chains[c];
        let delta = if self.p == 1.0 {
            let s: f64 = chain.iter().map(|&v| self.w[v as usize]).sum();
            ((1.0 - s) * self.q / chain.len() as f64).max(-mu)
        } else {
            let phi = |t: f64| -> f64 { chain.iter().map(|&v| self.weight(self.rho[v as usize] + t)).sum() };
            let lo0 = -mu;
            if phi(lo0) >= 1.0 {
                lo0
            } else {
                let rmin = chain.iter().map(|&v| self.rho[v as usize]).fold(f64::INFINITY, f64::min);
                let (mut lo, mut hi) = (lo0, (self.q - rmin).max(lo0));
                let mut t = if self.mu[c] > 0.0 { 0.0f64.clamp(lo, hi) } else { 0.5 * (lo + hi) };
                for _ in 0..100 {
                    let f = phi(t) - 1.0;
                    if f > 0.0 {
                        hi = t;
                    } else {
                        lo = t;
                    }
                    if hi - lo <= 1e-16 * (1.0 + hi.abs()) {
                        break;
                    }
                    let d: f64 = chain
                        .iter()
                        .map(|&v| {
                            let x = self.rho[v as usize] + t;
                            if x > 0.0 {
                                self.p / self.q * libm::pow(x / self.q, self.p - 1.0)
                            } else {
                                0.0
                            }
                        })
                        .sum();
                    let nt = if d.is_finite() && d > 0.0 { t - f / d } else { f64::NAN };
                    t = if nt > lo && nt < hi { nt } else { 0.5 * (lo + hi) };
                    if f.abs() <= 1e-15 {
                        break;
                    }
                }
                t
            }
        };
        if delta != 0.0 {
            self.mu[c] = (mu + delta).max(0.0);
            for i in 0..self.chains[c].len() {
                let v = self.chains[c][i] as usize;
                self.rho[v] += delta;
                if self.rho[v] < 0.0 {
                    self.rho[v] = 0.0;
                }
                self.w[v] = self.weight(self.rho[v]);
            }
        }
        delta.abs()
    }

    /// KKT residual on the current chain set.
    fn residual(&self) -> f64 {
        (0..self.chains.len())
            .map(|c| {
                let s = self.chain_sum(c);
                if self.mu[c] > 0.0 {
                    (s - 1.0).abs()
                } else {
                    (1.0 - s).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }
}

const MAX_INNER: usize = 4096;

/// Cutting-plane solve of `min sum w^Q` over weights admissible for all
/// chains from `a` to `b`. The returned weights are rescaled by the lightest
/// chain so they are exactly admissible; `lower_bound` is the dual value.
pub fn mod_q_with(g: &ApproxGraph, a: &[usize], b: &[usize], q: f64, opt: &SolverOptions) -> Result<ModulusResult> {
    validate(g, a, b, q)?;
    let n = g.len();
    let tgt = flags(n, b);
    let adj = g.adjacency();
    let Some((_, first)) = lightest_chain(adj, &vec![1.0; n], a, &tgt) else {
        return Ok(ModulusResult {
            value: 0.0,
            weights: vec![0.0; n],
            active_chains: Vec::new(),
            status: Status::NoChains,
            q,
            lower_bound: 0.0,
            iterations: 0,
        });
    };
    if q == 1.0 {
        return Ok(min_vertex_cut(g, a, b));
    }
    let mut d = Dual { q, p: 1.0 / (q - 1.0), chains: Vec::new(), mu: Vec::new(), rho: vec![0.0; n], w: vec![0.0; n] };
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut add = |d: &mut Dual, path: Vec<usize>| -> bool {
        let mut key: Vec<u32> = path.iter().map(|&v| v as u32).collect();
        key.sort_unstable();
        key.dedup();
        if seen.insert(key.clone()) {
            d.chains.push(key);
            d.mu.push(0.0);
            true
        } else {
            false
        }
    };
    add(&mut d, first);
    let mut sweeps = 0usize;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut gap = f64::INFINITY;
    let mut inner_budget = 20usize;
    let (mut stall_gap, mut stalls) = (f64::INFINITY, 0);
    let mut status = Status::Optimal;
    let mut best_lower = 0.0f64;
    let mut eps = 1e-3f64.max(0.1 * opt.tol);
    loop {
        let lower = if q == 2.0 {
            // inner coordinate ascent on the current chain set
            let target = 0.1 * opt.tol;
            for _ in 0..inner_budget {
                sweeps += 1;
                for c in 0..d.chains.len() {
                    d.update(c);
                }
                if d.residual() <= target {
                    break;
                }
            }
            d.value().max(0.0)
        } else {
            sweeps += 1;
            let (w, lb) = barrier::restricted_solve(&d.chains, n, q, eps, best.as_ref().map(|b| b.1.as_slice()));
            d.w = w;
            lb.max(0.0)
        };
        best_lower = best_lower.max(lower);
        // separation
        let (da, pa) = chain_tree(adj, &d.w, a);
        let (db, pb) = chain_tree(adj, &d.w, b);
        let mut cand: Vec<(f64, usize)> = (0..n)
            .filter(|&v| da[v].is_finite() && db[v].is_finite())
            .map(|v| (da[v] + db[v] - d.w[v], v))
            .collect();
        cand.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let l = cand[0].0;
        let lower = best_lower;
        if l > 0.0 {
            let up: f64 = d.w.iter().map(|&x| libm::pow(x / l, q)).sum();
            if best.as_ref().map_or(true, |b| up < b.0) {
                best = Some((up, d.w.iter().map(|&x| x / l).collect()));
            }
        }
        if let Some((up, _)) = &best {
            gap = (up - lower).max(0.0);
            if gap <= opt.tol * up {
                break;
            }
        }
        let mut added = 0;
        if l < 1.0 - 0.1 * opt.tol {
            for &(len, v) in cand.iter() {
                if added >= opt.batch || len >= 1.0 - 0.1 * opt.tol {
                    break;
                }
                let mut path = Vec::new();
                let mut x = v;
                path.push(x);
                while pa[x] != u32::MAX {
                    x = pa[x] as usize;
                    path.push(x);
                }
                let mut x = v;
                while pb[x] != u32::MAX {
                    x = pb[x] as usize;
                    path.push(x);
                }
                if add(&mut d, path) {
                    added += 1;
                }
            }
        }
        inner_budget = if added > 0 { 20 } else { (inner_budget * 2).min(MAX_INNER) };
        if added == 0 && q != 2.0 {
            if eps <= 1e-3 * opt.tol {
                status = Status::UpperBoundOnly;
                break;
            }
            eps *= 0.1;
            continue;
        }
        // no new chains and no progress at full inner budget: the gap is at
        // the precision floor of the dual iteration
        if added == 0 && inner_budget == MAX_INNER {
            if gap < 0.99 * stall_gap {
                stall_gap = gap;
                stalls = 0;
            } else {
                stalls += 1;
                if stalls >= 4 {
                    status = Status::UpperBoundOnly;
                    break;
                }
            }
        }
        if d.chains.len() > opt.max_chains || sweeps > opt.max_sweeps {
            return Err(Error::NonConvergence { iterations: d.chains.len(), gap });
        }
    }
    let (value_bound, weights) = best.unwrap();
    let value: f64 = weights.iter().map(|&x| libm::pow(x, q)).sum();
    let active = d
        .chains
        .iter()
        .filter(|c| c.iter().map(|&v| weights[v as usize]).sum::<f64>() <= 1.0 + opt.tol)
        .map(|c| order_chain(g, c, a, &tgt))
        .collect();
    let _ = value_bound;
    Ok(ModulusResult {
        value,
        weights,
        active_chains: active,
        status,
        q,
        lower_bound: best_lower.min(value),
        iterations: d.chains.len(),
    })
}

/// Orders a chain's vertex set as a walk from `a` to `b` when possible.
fn order_chain(g: &ApproxGraph, set: &[u32], a: &[usize], tgt: &[bool]) -> Vec<usize> {
    let inside: BTreeSet<u32> = set.iter().copied().collect();
    let starts: Vec<usize> = a.iter().copied().filter(|v| inside.contains(&(*v as u32))).collect();
    let w: Vec<f64> = (0..g.len()).map(|v| if inside.contains(&(v as u32)) { 1.0 } else { f64::INFINITY }).collect();
    match lightest_chain(g.adjacency(), &w, &starts, tgt) {
        Some((len, p)) if len.is_finite() => p,
        _ => set.iter().map(|&v| v as usize).collect(),
    }
}

/// `Q = 1`: the modulus is the minimum number of vertices meeting every
/// chain (Menger), found by augmenting paths on the split graph.
fn min_vertex_cut(g: &ApproxGraph, a: &[usize], b: &[usize]) -> ModulusResult {
    let n = g.len();
    // node 2v = v_in, 2v+1 = v_out, 2n = source, 2n+1 = sink
    let (src, snk) = (2 * n, 2 * n + 1);
    let mut to: Vec<usize> = Vec::new();
    let mut cap: Vec<i64> = Vec::new();
    let mut head: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 2];
    let big = (n as i64) + 1;
    let edge = |u: usize, v: usize, c: i64, to: &mut Vec<usize>, cap: &mut Vec<i64>, head: &mut Vec<Vec<usize>>| {
        head[u].push(to.len());
        to.push(v);
        cap.push(c);
        head[v].push(to.len());
        to.push(u);
        cap.push(0);
    };
    for v in 0..n {
        edge(2 * v, 2 * v + 1, 1, &mut to, &mut cap, &mut head);
        for &u in g.neighbors(v) {
            edge(2 * v + 1, 2 * u as usize, big, &mut to, &mut cap, &mut head);
        }
    }
    for &v in a {
        edge(src, 2 * v, big, &mut to, &mut cap, &mut head);
    }
    for &v in b {
        edge(2 * v + 1, snk, big, &mut to, &mut cap, &mut head);
    }
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; 2 * n + 2];
        let mut seen = vec![false; 2 * n + 2];
        seen[src] = true;
        let mut qu = VecDeque::from([src]);
        while let Some(u) = qu.pop_front() {
            for &e in &head[u] {
                if cap[e] > 0 && !seen[to[e]] {
                    seen[to[e]] = true;
                    prev[to[e]] = e;
                    qu.push_back(to[e]);
                }
            }
        }
        if !seen[snk] {
            let mut w = vec![0.0; n];
            for v in 0..n {
                if seen[2 * v] && !seen[2 * v + 1] {
                    w[v] = 1.0;
                }
            }
            let value = w.iter().sum();
            return ModulusResult {
                value,
                weights: w,
                active_chains: Vec::new(),
                status: Status::Optimal,
                q: 1.0,
                lower_bound: flow as f64,
                iterations: flow,
            };
        }
        let mut x = snk;
        while x != src {
            let e = prev[x];
            cap[e] -= 1;
            cap[e ^ 1] += 1;
            x = to[e ^ 1];
        }
        flow += 1;
    }
}
