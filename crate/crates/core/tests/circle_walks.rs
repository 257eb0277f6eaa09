use png_det::circle::{
    cylinder_kernel, limit_kernel, one_time_matrix, torus_enumeration, torus_mixture_correlation, CircleWalkParams,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;

#[test]
fn finite_kernel_approaches_limit() {
    let p = CircleWalkParams::new(201, 101, 0.4, 2).unwrap();
    let rho = 101.0 / 201.0;
    let mut worst = 0.0f64;
    for (r, s) in [(0, 0), (0, 1), (0, 3), (1, 0), (3, 0), (2, 5)] {
        for d in -5i64..=5 {
            let finite = cylinder_kernel(&p, r, d.rem_euclid(201), s, 0);
            let limit = limit_kernel(rho, 0.4, r, d, s, 0).unwrap();
            worst = worst.max((finite - limit).norm());
        }
    }
    assert!(worst < 0.01, "max deviation {worst}");
}

#[test]
fn principal_minors_are_nonnegative() {
    let p = CircleWalkParams::new(13, 5, 0.35, 2).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut sites: Vec<i64> = (0..13).collect();
    for _ in 0..200 {
        sites.shuffle(&mut rng);
        let size = 1 + (sites[0] as usize % 7);
        let d = one_time_matrix(&p, 0, &sites[..size]).det();
        assert!(d.re >= -1e-12 && d.im.abs() < 1e-12, "{d}");
    }
}

#[test]
fn two_time_correlations_match_walk_enumeration() {
    let p = CircleWalkParams::new(4, 1, 0.3, 2).unwrap();
    for x in 0..4 {
        for y in 0..4 {
            let sites = [(-1, x), (0, y)];
            let e = torus_enumeration(&p, &sites).unwrap();
            let m = torus_mixture_correlation(&p, &sites).unwrap();
            assert!((e - m.re).abs() < 1e-10 && m.im.abs() < 1e-10, "{x},{y}: {e} vs {m}");
        }
    }
}
