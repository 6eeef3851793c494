//! Combinatorial graphs: adjacency, hop distances, vertex-weighted paths.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Simple undirected graph on vertices `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxGraph {
    adj: Vec<Vec<u32>>,
    /// Faces of a 2-sphere triangulation whose 1-skeleton is this graph.
    triangles: Option<Vec<[u32; 3]>>,
}

impl ApproxGraph {
    /// Builds a graph from an edge list, dropping duplicates and loops is an
    /// error rather than a silent fix.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n {
                return Err(Error::UnknownVertex(a));
            }
            if b >= n {
                return Err(Error::UnknownVertex(b));
            }
            if a == b {
                return Err(Error::InvalidInput("self-loop".into()));
            }
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Ok(ApproxGraph { adj, triangles: None })
    }

    /// Builds from adjacency lists, checking symmetry and absence of loops.
    pub fn from_adjacency(mut adj: Vec<Vec<u32>>) -> Result<Self> {
        let n = adj.len();
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        for (v, l) in adj.iter().enumerate() {
            for &u in l {
                let u = u as usize;
                if u >= n {
                    return Err(Error::UnknownVertex(u));
                }
                if u == v {
                    return Err(Error::InvalidInput("self-loop".into()));
                }
                if adj[u].binary_search(&(v as u32)).is_err() {
                    return Err(Error::InvalidInput("adjacency not symmetric".into()));
                }
            }
        }
        Ok(ApproxGraph { adj, triangles: None })
    }

    /// 1-skeleton of a triangulated 2-sphere; checks the Euler
    /// characteristic and that every edge has exactly two faces.
    pub fn from_sphere_triangulation(n: usize, tris: &[[u32; 3]]) -> Result<Self> {
        let mesh = crate::mesh::TriMesh::new(n, tris.to_vec())?;
        mesh.check_sphere()?;
        let mut g = ApproxGraph::from_adjacency(mesh.adjacency())?;
        g.triangles = Some(tris.to_vec());
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    pub fn triangles(&self) -> Option<&[[u32; 3]]> {
        self.triangles.as_deref()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&(b as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_valence(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(v, l)| l.iter().filter(move |&&u| (u as usize) > v).map(move |&u| (v, u as usize)))
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Hop distances from `v`, truncated: vertices farther than `limit` get
    /// `u32::MAX`.
    pub fn bfs(&self, v: usize, limit: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        dist[v] = 0;
        let mut q = VecDeque::from([v]);
        while let Some(u) = q.pop_front() {
            let du = dist[u];
            if du >= limit {
                continue;
            }
            for &w in &self.adj[u] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = du + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Combinatorial distance `k_G(a, b)`; `None` if not connected.
    pub fn k(&self, a: usize, b: usize) -> Result<Option<u32>> {
        self.check(a)?;
        self.check(b)?;
        let d = self.bfs(a, u32::MAX)[b];
        Ok(if d == u32::MAX { None } else { Some(d) })
    }

    /// `B_G(v, s) = {u : k(u, v) < s}` as a sorted list.
    pub fn ball(&self, v: usize, s: f64) -> Result<Vec<usize>> {
        self.check(v)?;
        if !(s > 0.0) {
            return Ok(Vec::new());
        }
        let lim = hop_limit(s);
        let d = self.bfs(v, lim);
        Ok((0..self.len()).filter(|&u| d[u] <= lim && (d[u] as f64) < s).collect())
    }

    /// `N_s(A) = {u : k(u, A) < s}` as a sorted list.
    pub fn neighborhood(&self, set: &[usize], s: f64) -> Result<Vec<usize>> {
        for &v in set {
            self.check(v)?;
        }
        if !(s > 0.0) || set.is_empty() {
            return Ok(Vec::new());
        }
        let lim = hop_limit(s);
        let d = self.multi_bfs(set, lim);
        Ok((0..self.len()).filter(|&u| d[u] <= lim && (d[u] as f64) < s).collect())
    }

    /// Hop distance to the nearest vertex of `set`, truncated at `limit`.
    pub fn multi_bfs(&self, set: &[usize], limit: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut q = VecDeque::new();
        for &v in set {
            if dist[v] != 0 {
                dist[v] = 0;
                q.push_back(v);
            }
        }
        while let Some(u) = q.pop_front() {
            let du = dist[u];
            if du >= limit {
                continue;
            }
            for &w in &self.adj[u] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = du + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || component_of(&self.adj, 0, |_| true).len() == self.len()
    }

    /// Induced subgraph on `keep` (sorted), with the old ids of the kept vertices.
    pub fn induced(&self, keep: &[usize]) -> (ApproxGraph, Vec<usize>) {
        let mut map = vec![u32::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            map[v] = i as u32;
        }
        let adj = keep
            .iter()
            .map(|&v| self.adj[v].iter().filter_map(|&u| (map[u as usize] != u32::MAX).then(|| map[u as usize])).collect())
            .collect();
        (ApproxGraph { adj, triangles: None }, keep.to_vec())
    }
}

/// Largest hop count strictly below `s`.
fn hop_limit(s: f64) -> u32 {
    let c = libm::ceil(s) - 1.0;
    if c >= u32::MAX as f64 - 1.0 {
        u32::MAX - 1
    } else {
        c.max(0.0) as u32
    }
}

/// Connected component of `start` in the subgraph induced on `keep`, sorted.
pub fn component_of(adj: &[Vec<u32>], start: usize, keep: impl Fn(usize) -> bool) -> Vec<usize> {
    if !keep(start) {
        return Vec::new();
    }
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut stack = vec![start];
    let mut out = Vec::new();
    while let Some(u) = stack.pop() {
        out.push(u);
        for &w in &adj[u] {
            let w = w as usize;
            if !seen[w] && keep(w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(PartialEq)]
struct Item(f64, u32);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Lightest chain from any vertex of `sources` to any vertex flagged in
/// `is_target`, where a chain's length is the sum of `w` over all of its
/// vertices, endpoints included. Returns `(length, path)`.
pub fn lightest_chain(adj: &[Vec<u32>], w: &[f64], sources: &[usize], is_target: &[bool]) -> Option<(f64, Vec<usize>)> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if w[s] < dist[s] {
            dist[s] = w[s];
            heap.push(Item(w[s], s as u32));
        }
    }
    while let Some(Item(d, u)) = heap.pop() {
        let u = u as usize;
        if d > dist[u] {
            continue;
        }
        if is_target[u] {
            let mut path = vec![u];
            let mut x = u;
            while prev[x] != u32::MAX {
                x = prev[x] as usize;
                path.push(x);
            }
            path.reverse();
            return Some((d, path));
        }
        for &v in &adj[u] {
            let v = v as usize;
            let nd = d + w[v];
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = u as u32;
                heap.push(Item(nd, v as u32));
            }
        }
    }
    None
}

/// Vertex-weighted distance from `sources` to every vertex, endpoints included.
pub fn chain_distances(adj: &[Vec<u32>], w: &[f64], sources: &[usize]) -> Vec<f64> {
    chain_tree(adj, w, sources).0
}

/// As [`chain_distances`], with the predecessor of each vertex on a
/// lightest chain (`u32::MAX` at the sources and unreached vertices).
pub fn chain_tree(adj: &[Vec<u32>], w: &[f64], sources: &[usize]) -> (Vec<f64>, Vec<u32>) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if w[s] < dist[s] {
            dist[s] = w[s];
            heap.push(Item(w[s], s as u32));
        }
    }
    while let Some(Item(d, u)) = heap.pop() {
        let u = u as usize;
        if d > dist[u] {
            continue;
        }
        for &v in &adj[u] {
            let v = v as usize;
            let nd = d + w[v];
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = u as u32;
                heap.push(Item(nd, v as u32));
            }
        }
    }
    (dist, prev)
}

/// Edge-weighted single-source shortest paths; `len[u][i]` is the length
/// of the edge to `adj[u][i]`.
pub fn edge_dijkstra(adj: &[Vec<u32>], len: &[Vec<f64>], src: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Item(0.0, src as u32));
    while let Some(Item(d, u)) = heap.pop() {
        let u = u as usize;
        if d > dist[u] {
            continue;
        }
        for (i, &v) in adj[u].iter().enumerate() {
            let v = v as usize;
            let nd = d + len[u][i];
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Item(nd, v as u32));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> ApproxGraph {
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        ApproxGraph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn balls_and_neighborhoods() {
        let g = path(6);
        assert_eq!(g.ball(2, 1.0).unwrap(), vec![2]);
        assert_eq!(g.ball(2, 1.5).unwrap(), vec![1, 2, 3]);
        assert_eq!(g.ball(2, 2.0).unwrap(), vec![1, 2, 3]);
        assert_eq!(g.neighborhood(&[0, 5], 1.0).unwrap(), vec![0, 5]);
        assert_eq!(g.neighborhood(&[0, 5], 2.0).unwrap(), vec![0, 1, 4, 5]);
        assert_eq!(g.k(0, 5).unwrap(), Some(5));
        assert_eq!(g.ball(9, 1.0), Err(Error::UnknownVertex(9)));
    }

    #[test]
    fn lightest_chain_counts_endpoints() {
        let g = path(4);
        let (len, p) = lightest_chain(g.adjacency(), &[1.0, 2.0, 3.0, 4.0], &[0], &[false, false, false, true]).unwrap();
        assert_eq!(len, 10.0);
        assert_eq!(p, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(ApproxGraph::from_adjacency(vec![vec![1], vec![]]).is_err());
        assert!(ApproxGraph::from_edges(2, &[(0, 0)]).is_err());
    }
}
