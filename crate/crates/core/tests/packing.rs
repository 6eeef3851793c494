use proptest::prelude::*;
use qsunif::math;
use qsunif::mesh;
use qsunif::packing::{mobius_normalize, normalization_error, pack_removing, pack_triangulation, SphereTriangulation, SphericalPacking};

fn tri((v, t): (Vec<[f64; 3]>, Vec<[u32; 3]>)) -> SphereTriangulation {
    SphereTriangulation::new(v.len(), t).unwrap()
}

fn edges(t: &SphereTriangulation) -> Vec<(usize, usize)> {
    let adj = t.adjacency();
    let mut e = Vec::new();
    for (u, l) in adj.iter().enumerate() {
        for &v in l {
            if (v as usize) > u {
                e.push((u, v as usize));
            }
        }
    }
    e
}

/// Chordal cross-ratios of tangency points over a fixed list of 4-tuples.
fn tangency_cross_ratios(p: &SphericalPacking, e: &[(usize, usize)], tuples: &[[usize; 4]]) -> Vec<f64> {
    let pts: Vec<[f64; 3]> = e.iter().map(|&(u, v)| p.tangency_point(u, v)).collect();
    let d = |i: usize, j: usize| math::dist(pts[i], pts[j]);
    tuples.iter().map(|t| d(t[0], t[2]) * d(t[1], t[3]) / (d(t[0], t[3]) * d(t[1], t[2]))).collect()
}

#[test]
fn platonic_equal_radii() {
    for (t, r) in [
        (tri(mesh::tetrahedron()), 0.955317),
        (tri(mesh::octahedron()), 0.785398),
        (tri(mesh::icosahedron()), 0.553574),
    ] {
        let p = pack_triangulation(&t, 1e-14).unwrap();
        for &x in &p.radii {
            assert!((x - r).abs() < 1e-6);
        }
        let q = mobius_normalize(&p, [0, 1, 2]).unwrap();
        assert!(normalization_error(&q).unwrap() < 1e-9);
        assert!(q.radii.iter().all(|&x| x < std::f64::consts::FRAC_PI_2));
    }
}

#[test]
fn normalize_twice_is_identity() {
    let t = SphereTriangulation::random(60, 2).unwrap();
    let p = mobius_normalize(&pack_triangulation(&t, 1e-12).unwrap(), [1, 20, 40]).unwrap();
    let q = mobius_normalize(&p, [1, 20, 40]).unwrap();
    for i in 0..t.len() {
        assert!(math::angle_between(p.centers[i], q.centers[i]) < 1e-9);
        assert!((p.radii[i] - q.radii[i]).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_packings_are_valid(n in 4usize..500, seed in any::<u64>()) {
        let t = SphereTriangulation::random(n, seed).unwrap();
        let p = pack_triangulation(&t, 1e-14).unwrap();
        prop_assert!(p.tangency_residual(&t) < 1e-8);
        prop_assert!(p.overlap(&t) < 1e-8);
        prop_assert!(p.radii.iter().all(|&r| r > 0.0 && r < std::f64::consts::FRAC_PI_2));
    }

    #[test]
    fn normalizations_are_mobius_related(n in 12usize..150, seed in any::<u64>()) {
        let t = SphereTriangulation::random(n, seed).unwrap();
        let p = pack_triangulation(&t, 1e-14).unwrap();
        let a = mobius_normalize(&p, [0, n / 3, 2 * n / 3]).unwrap();
        let b = mobius_normalize(&p, [1, n / 2, n - 1]).unwrap();
        let e = edges(&t);
        let m = e.len();
        let tuples: Vec<[usize; 4]> = (0..200).map(|i| [i % m, (7 * i + 3) % m, (13 * i + 5) % m, (29 * i + 11) % m])
            .filter(|t| (0..4).all(|i| (0..i).all(|j| t[i] != t[j])))
            .collect();
        let (ca, cb) = (tangency_cross_ratios(&a, &e, &tuples), tangency_cross_ratios(&b, &e, &tuples));
        for (x, y) in ca.iter().zip(&cb) {
            prop_assert!((x - y).abs() <= 1e-6 * x.max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn independent_of_removed_vertex(n in 12usize..200, seed in any::<u64>(), k in any::<usize>()) {
        let t = SphereTriangulation::random(n, seed).unwrap();
        let triple = [0, n / 3, 2 * n / 3];
        let a = mobius_normalize(&pack_triangulation(&t, 1e-14).unwrap(), triple).unwrap();
        let b = mobius_normalize(&pack_removing(&t, k % n, 1e-14).unwrap(), triple).unwrap();
        for i in 0..n {
            prop_assert!(math::angle_between(a.centers[i], b.centers[i]) <= 1e-6);
        }
    }
}
