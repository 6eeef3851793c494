use proptest::prelude::*;
use qsunif::spaces::alpha::{d_alpha, AlphaPatch};
use qsunif::spaces::snowball::{similarity_dimension, snowball};
use qsunif::spaces::{alpha_patch_sphere, bilipschitz_warp, max_edge_ratio, round_sphere};
use qsunif::Error;

#[test]
fn snowball_levels() {
    let c = snowball(2).unwrap();
    let counts: Vec<usize> = (0..=2).map(|l| c.squares(l).len()).collect();
    assert_eq!(counts, [6, 174, 5046]);
    for l in 0..=2 {
        c.check_embedded(l).unwrap();
    }
    // 29 squares replace each square, side shrinks by 5
    assert!((similarity_dimension() - 29f64.ln() / 5f64.ln()).abs() < 1e-15);
    assert!((similarity_dimension() - 2.0922).abs() < 5e-5);
    let m = c.mesh();
    assert_eq!(m.count(0).unwrap(), 8);
    let z = m.space().unwrap();
    assert!(z.triangle_excess(2000, 2) <= 1e-12);
    assert_eq!(snowball(4), Err(Error::LevelTooDeep(4)));
}

#[test]
fn alpha_example() {
    assert!((d_alpha([0.0, 0.0], [0.0, 0.01], 0.5) - 0.1).abs() < 1e-15);
    assert_eq!(alpha_patch_sphere(0.0, 1, 0.5), Err(Error::BadAlpha(0.0)));
    let m = alpha_patch_sphere(0.3, 2, 0.8).unwrap();
    let z = m.space().unwrap();
    let c = round_sphere(2).space().unwrap();
    // the patch only lengthens distances
    for i in 0..z.len() {
        for j in 0..z.len() {
            assert!(z.dist(i, j) >= c.dist(i, j));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn alpha_distance_is_a_metric(alpha in 0.05f64..0.95, p in proptest::array::uniform6(-0.4f64..0.4)) {
        let patch = AlphaPatch::new(alpha, [0.3, -0.2, 1.0], 0.7).unwrap();
        let (a, b, c) = (patch.cap_point(p[0], p[1]), patch.cap_point(p[2], p[3]), patch.cap_point(p[4], p[5]));
        let d = |x, y| patch.dist(x, y);
        prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
        prop_assert!((d(a, b) - d(b, a)).abs() <= 1e-15);
        prop_assert_eq!(d(a, a), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn warps_respect_the_constant(l in 1.0f64..3.0, seed in any::<u64>()) {
        let m = round_sphere(2);
        let w = bilipschitz_warp(&m, l, seed).unwrap();
        prop_assert!(max_edge_ratio(&m, &w).unwrap() <= l);
        prop_assert_eq!(w.count(2).unwrap(), m.count(2).unwrap());
    }
}
