//! Independent reference computations for the modulus solver: chain
//! enumeration, Wolfe's minimum-norm-point algorithm, and small-graph
//! enumeration up to isomorphism.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Every simple chain that starts in `a` and stops at its first vertex of `b`.
pub fn simple_chains(adj: &[Vec<usize>], a: &[usize], b: &[usize]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut in_b = vec![false; n];
    for &v in b {
        in_b[v] = true;
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut on = vec![false; n];
    fn go(v: usize, adj: &[Vec<usize>], in_b: &[bool], on: &mut [bool], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        path.push(v);
        on[v] = true;
        if in_b[v] {
            out.push(path.clone());
        } else {
            for &u in &adj[v] {
                if !on[u] {
                    go(u, adj, in_b, on, path, out);
                }
            }
        }
        on[v] = false;
        path.pop();
    }
    let starts: BTreeSet<usize> = a.iter().copied().collect();
    for s in starts {
        go(s, adj, &in_b, &mut on, &mut path, &mut out);
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-13 {
            return None;
        }
        m.swap(c, p);
        r.swap(c, p);
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                m[i][j] -= f * m[c][j];
            }
            r[i] -= f * r[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (r[i] - (i + 1..n).map(|j| m[i][j] * x[j]).sum::<f64>()) / m[i][i];
    }
    Some(x)
}

/// Squared norm of the minimum-norm point of the convex hull of `pts`.
pub fn min_norm_sq(pts: &[Vec<f64>]) -> f64 {
    let dim = pts[0].len();
    let start = (0..pts.len()).min_by(|&i, &j| dot(&pts[i], &pts[i]).total_cmp(&dot(&pts[j], &pts[j]))).unwrap();
    let mut s = vec![start];
    let mut lam = vec![1.0];
    let mut x = pts[start].clone();
    let scale = pts.iter().map(|p| dot(p, p)).fold(0.0, f64::max);
    for _ in 0..10_000 {
        let j = (0..pts.len()).min_by(|&i, &k| dot(&x, &pts[i]).total_cmp(&dot(&x, &pts[k]))).unwrap();
        if dot(&x, &x) - dot(&x, &pts[j]) <= 1e-14 * scale || s.contains(&j) {
            return dot(&x, &x);
        }
        s.push(j);
        lam.push(0.0);
        loop {
            // affine minimizer over the corral
            let k = s.len();
            let mut m = vec![vec![0.0; k + 1]; k + 1];
            for a in 0..k {
                for b in 0..k {
                    m[a][b] = dot(&pts[s[a]], &pts[s[b]]);
                }
                m[a][k] = 1.0;
                m[k][a] = 1.0;
            }
            let mut rhs = vec![0.0; k + 1];
            rhs[k] = 1.0;
            let alpha = match solve(m, rhs) {
                Some(v) => v[..k].to_vec(),
                None => {
                    s.pop();
                    lam.pop();
                    return dot(&x, &x);
                }
            };
            if alpha.iter().all(|&a| a > 1e-15) {
                lam = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for i in 0..k {
                if alpha[i] <= 1e-15 {
                    theta = theta.min(lam[i] / (lam[i] - alpha[i]));
                }
            }
            for i in 0..k {
                lam[i] += theta * (alpha[i] - lam[i]);
            }
            let mut i = 0;
            while i < s.len() {
                if lam[i] <= 1e-15 {
                    s.remove(i);
                    lam.remove(i);
                } else {
                    i += 1;
                }
            }
            let tot: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= tot);
        }
        x = vec![0.0; dim];
        for (i, &p) in s.iter().enumerate() {
            for d in 0..dim {
                x[d] += lam[i] * pts[p][d];
            }
        }
    }
    dot(&x, &x)
}

/// Exact `mod_2(A, B)`: the reciprocal squared distance from the origin to
/// the hull of the chain indicator vectors; 0 without chains.
pub fn mod2_exact(adj: &[Vec<usize>], a: &[usize], b: &[usize]) -> f64 {
    let chains = simple_chains(adj, a, b);
    if chains.is_empty() {
        return 0.0;
    }
    let n = adj.len();
    let pts: Vec<Vec<f64>> = chains
        .iter()
        .map(|c| {
            let mut v = vec![0.0; n];
            for &x in c {
                v[x] = 1.0;
            }
            v
        })
        .collect();
    1.0 / min_norm_sq(&pts)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn canonical(edges: &BTreeSet<(usize, usize)>, perms: &[Vec<usize>]) -> Vec<(usize, usize)> {
    perms
        .iter()
        .map(|p| {
            let mut e: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
            e.sort_unstable();
            e
        })
        .min()
        .unwrap_or_default()
}

/// One representative per isomorphism class of graphs on `n` vertices.
pub fn all_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n <= 1 {
        return vec![vec![]];
    }
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    for g in all_graphs(n - 1) {
        for mask in 0u32..(1 << (n - 1)) {
            let mut e: BTreeSet<(usize, usize)> = g.iter().copied().collect();
            for i in 0..n - 1 {
                if mask >> i & 1 == 1 {
                    e.insert((i, n - 1));
                }
            }
            seen.insert(canonical(&e, &perms));
        }
    }
    seen.into_iter().collect()
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

pub fn is_connected(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Connected graphs on `n` vertices up to isomorphism.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    all_graphs(n).into_iter().filter(|e| is_connected(&adjacency(n, e))).collect()
}

/// Nonempty subsets of `0..n` as sorted vectors.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n)).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect()
}
