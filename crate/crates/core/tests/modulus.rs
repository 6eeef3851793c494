mod common;

use common::oracle;
use proptest::prelude::*;
use qsunif::graph::ApproxGraph;
use qsunif::modulus::{is_admissible, mod_q, neighborhood_comparison, Status};

fn graph(n: usize, edges: &[(usize, usize)]) -> ApproxGraph {
    ApproxGraph::from_edges(n, edges).unwrap()
}

fn path(n: usize) -> ApproxGraph {
    let e: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    graph(n, &e)
}

#[test]
fn path_law() {
    for n in 2..=10 {
        for q in [1.0, 1.5, 2.0, 3.0] {
            let r = mod_q(&path(n), &[0], &[n - 1], q, 1e-9).unwrap();
            let want = (n as f64).powf(1.0 - q);
            assert!((r.value - want).abs() < 1e-6, "n={n} q={q}: {} vs {want}", r.value);
        }
    }
}

#[test]
fn oracle_on_known_values() {
    let p4 = oracle::adjacency(4, &[(0, 1), (1, 2), (2, 3)]);
    assert!((oracle::mod2_exact(&p4, &[0], &[3]) - 0.25).abs() < 1e-12);
    // two parallel routes of three vertices sharing the ends
    let c6 = oracle::adjacency(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
    let two = oracle::mod2_exact(&c6, &[0], &[3]);
    // w = 1/3 at the ends and 1/6 on the four interior vertices... checked by
    // Lagrange conditions: value 1/3
    assert!((two - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn exhaustive_five_vertices() {
    for n in 1..=5 {
        for e in oracle::connected_graphs(n) {
            let g = graph(n, &e);
            let adj = oracle::adjacency(n, &e);
            let subs = oracle::subsets(n);
            for a in &subs {
                for b in &subs {
                    let want = oracle::mod2_exact(&adj, a, b);
                    let got = mod_q(&g, a, b, 2.0, 1e-10).unwrap();
                    assert!((got.value - want).abs() < 1e-6, "{e:?} {a:?} {b:?}: {} vs {want}", got.value);
                }
            }
        }
    }
}

#[test]
fn graph_counts() {
    let counts: Vec<usize> = (1..=6).map(|n| oracle::connected_graphs(n).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
}

#[test]
fn no_chains_is_zero() {
    let g = graph(4, &[(0, 1), (2, 3)]);
    let r = mod_q(&g, &[0], &[3], 2.0, 1e-9).unwrap();
    assert_eq!(r.value, 0.0);
    assert_eq!(r.status, Status::NoChains);
}

#[test]
fn star_neighborhoods() {
    // K_{1,5}: center 0, leaves 1..=5
    let e: Vec<(usize, usize)> = (1..=5).map(|i| (0, i)).collect();
    let g = graph(6, &e);
    let c = neighborhood_comparison(&g, &[1], &[2], &[1, 0], &[2, 0], 2.0, 2.0, 1e-9).unwrap();
    let adj = oracle::adjacency(6, &e);
    assert!((c.mod_primed - oracle::mod2_exact(&adj, &[1, 0], &[2, 0])).abs() < 1e-6);
    assert!(c.mod_primed <= c.transported_mass + 1e-9);
}

fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..=8).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let m = pairs.len();
        (Just(n), proptest::collection::vec(any::<bool>(), m)).prop_map(move |(n, keep)| {
            // a spanning path keeps the graph connected
            let mut e: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            for (k, p) in keep.iter().zip(&pairs) {
                if *k && p.1 != p.0 + 1 {
                    e.push(*p);
                }
            }
            (n, e)
        })
    })
}

fn vertex_set(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::btree_set(0..n, 1..=n.min(3)).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_oracle_up_to_eight((n, e) in random_graph(), seed in any::<u64>()) {
        let g = graph(n, &e);
        let adj = oracle::adjacency(n, &e);
        let a = vec![(seed % n as u64) as usize];
        let b = vec![((seed / 7) % n as u64) as usize, ((seed / 131) % n as u64) as usize];
        let want = oracle::mod2_exact(&adj, &a, &b);
        let got = mod_q(&g, &a, &b, 2.0, 1e-10).unwrap();
        prop_assert!((got.value - want).abs() < 1e-6, "{} vs {}", got.value, want);
    }

    #[test]
    fn symmetric_in_a_b((n, e) in random_graph(), q in 1.0f64..3.0, s in 0u64..1000) {
        let g = graph(n, &e);
        let a = vec![(s % n as u64) as usize];
        let b = vec![((s / 13) % n as u64) as usize];
        let x = mod_q(&g, &a, &b, q, 1e-9).unwrap().value;
        let y = mod_q(&g, &b, &a, q, 1e-9).unwrap().value;
        prop_assert!((x - y).abs() <= 1e-6 * x.max(1.0));
    }

    #[test]
    fn adding_edges_never_decreases((n, e) in random_graph(), extra in (0usize..8, 0usize..8), s in 0u64..1000) {
        let a = vec![(s % n as u64) as usize];
        let b = vec![((s / 13) % n as u64) as usize];
        let before = mod_q(&graph(n, &e), &a, &b, 2.0, 1e-10).unwrap().value;
        let (u, v) = (extra.0 % n, extra.1 % n);
        let mut e2 = e.clone();
        if u != v {
            e2.push((u, v));
        }
        let after = mod_q(&graph(n, &e2), &a, &b, 2.0, 1e-10).unwrap().value;
        // every old chain survives and new ones may appear
        prop_assert!(after >= before * (1.0 - 1e-6) - 1e-9, "{after} < {before}");
    }

    #[test]
    fn intersecting_sets_at_least_one((n, e) in random_graph(), q in 1.0f64..4.0, a in vertex_set(8), b in vertex_set(8)) {
        let a: Vec<usize> = a.into_iter().map(|x| x % n).collect();
        let mut b: Vec<usize> = b.into_iter().map(|x| x % n).collect();
        b.push(a[0]);
        let r = mod_q(&graph(n, &e), &a, &b, q, 1e-9).unwrap();
        prop_assert!(r.value >= 1.0, "{}", r.value);
    }

    #[test]
    fn weights_are_admissible((n, e) in random_graph(), q in 1.0f64..3.0, a in vertex_set(8), b in vertex_set(8)) {
        let g = graph(n, &e);
        let a: Vec<usize> = a.into_iter().map(|x| x % n).collect();
        let b: Vec<usize> = b.into_iter().map(|x| x % n).collect();
        let r = mod_q(&g, &a, &b, q, 1e-9).unwrap();
        prop_assert!(is_admissible(&r.weights, &g, &a, &b, 1e-9).unwrap().0);
        let mass: f64 = r.weights.iter().map(|w| w.powf(q)).sum();
        prop_assert!((mass - r.value).abs() <= 1e-12 * r.value.max(1.0));
    }

    #[test]
    fn relabeling_and_isolated_vertices((n, e) in random_graph(), rot in 0usize..8, extra in 0usize..3) {
        let g = graph(n, &e);
        let (a, b) = (vec![0], vec![n - 1]);
        let x = mod_q(&g, &a, &b, 2.0, 1e-10).unwrap().value;
        let r = rot % n;
        let m = |v: usize| (v + r) % n;
        let e2: Vec<(usize, usize)> = e.iter().map(|&(u, v)| (m(u), m(v))).collect();
        let y = mod_q(&graph(n + extra, &e2), &[m(0)], &[m(n - 1)], 2.0, 1e-10).unwrap().value;
        prop_assert!((x - y).abs() < 1e-6);
    }
}
