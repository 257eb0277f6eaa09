use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use png_det::determinantal::*;
use png_det::lattice::GeomParams;
use png_det::linalg::Matrix;
use png_det::rng::substream;
use rand::Rng;

#[test]
fn associativity_of_convolution() {
    let mut rng = substream(3, 0);
    let g = GridMeasure::new((0..8).map(f64::from).collect(), (0..8).map(|_| rng.gen_range(0.5..2.0)).collect())
        .unwrap();
    let mk = |rng: &mut rand_chacha::ChaCha8Rng| Matrix::from_fn(8, 8, |_, _| rng.gen_range(-1.0..1.0));
    let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
    let left = convolve(&convolve(&a, &b, &g).unwrap(), &c, &g).unwrap();
    let right = convolve(&a, &convolve(&b, &c, &g).unwrap(), &g).unwrap();
    assert!(left.max_abs_diff(&right) < 1e-12);
}

#[test]
fn geometric_steps_convolve_to_double_sum() {
    let (a, b) = (0.4f64, 0.6f64);
    let g = GridMeasure::<f64>::integers(-30, 30);
    let up = Matrix::from_fn(61, 61, |x, y| if y >= x { (1.0 - a) * a.powi((y - x) as i32) } else { 0.0 });
    let down = Matrix::from_fn(61, 61, |x, y| if y <= x { (1.0 - b) * b.powi((x - y) as i32) } else { 0.0 });
    let c = convolve(&up, &down, &g).unwrap();
    // Direct: Σ_{z ≥ max(x,y)} (1−a)a^{z−x}(1−b)b^{z−y}, truncated at the grid top.
    for (x, y) in [(30usize, 30usize), (30, 25), (28, 33), (10, 12)] {
        let direct: f64 = (x.max(y)..61).map(|z| (1.0 - a) * a.powi((z - x) as i32) * (1.0 - b) * b.powi((z - y) as i32)).sum();
        assert!((c[(x, y)] - direct).abs() < 1e-15);
    }
}

#[test]
fn partition_function_matches_enumeration() {
    for seed in 0..10 {
        let sys = random_system(2, 1, 3, seed).unwrap();
        let z = sys.partition_function().unwrap();
        let e = Enumerator::new(&sys).unwrap().partition_function();
        assert!((z - e).abs() < 1e-12 * z.abs(), "{z} vs {e}");
    }
    let sys = random_system(1, 2, 4, 9).unwrap();
    assert_eq!(sys.gram_matrix().rows(), 1);
}

#[test]
fn thm01_block_determinants_match_enumeration() {
    for seed in 0..12 {
        let n = 1 + (seed as usize % 3);
        let m = 1 + (seed as usize / 3 % 2);
        let sys = random_system(n, m, 5, seed).unwrap();
        let k = correlation_kernel(&sys).unwrap();
        let times: Vec<i64> = sys.interior_times().collect();
        // One-time densities integrate to n.
        for &r in &times {
            let total: f64 = (0..5).map(|x| k.eval(r, x, r, x) * k.weights(r)[x]).sum();
            assert!((total - n as f64).abs() < 1e-10);
        }
        let site_sets: Vec<Vec<(i64, usize)>> = vec![
            vec![],
            vec![(times[0], 1)],
            vec![(times[0], 0), (*times.last().unwrap(), 3)],
            vec![(times[0], 2), (times[0], 4), (*times.last().unwrap(), 0)],
        ];
        for sites in site_sets {
            let brute = brute_force_correlation(&sys, &sites).unwrap();
            let det = k.correlation(&sites);
            assert!((brute - det).abs() < 1e-10, "seed {seed} sites {sites:?}: {brute} vs {det}");
        }
    }
}

#[test]
fn gap_probability_matches_enumeration() {
    let sys = random_system(2, 2, 5, 4).unwrap();
    let g = |r: i64, x: usize| if r == 0 && x >= 3 { -1.0 } else { 0.0 };
    let det = gap_probability(&sys, &g).unwrap();
    let brute = brute_force_expectation(&sys, &|r, s| s.iter().map(|&x| 1.0 + g(r, x)).product()).unwrap();
    assert!((det - brute).abs() < 1e-10);
    assert!((gap_probability(&sys, &|_, _| 0.0).unwrap() - 1.0).abs() < 1e-14);
    assert!(gap_probability(&sys, &|_, _| -1.0).unwrap().abs() < 1e-10);
}

#[test]
fn product_rule_and_nilpotence() {
    let mut rng = substream(5, 1);
    for seed in 0..10 {
        let sys = random_system(2, 2, 4, 100 + seed).unwrap();
        let gv: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = |r: i64, x: usize| Complex64::new(gv[((r + 1) * 4) as usize + x], 0.0);
        let z = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..6.28));
        let w = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..6.28));
        let (l, r) = product_rule_check(&sys, &g, z, w).unwrap();
        assert!((l - r).norm() < 1e-10, "{l} vs {r}");
        let (l, r) = product_rule_check(&sys, &g, Complex64::new(0.0, 0.0), w).unwrap();
        assert_eq!((l, r), (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)));
        let (l, r) = product_rule_check(&sys, &g, z, Complex64::new(0.0, 0.0)).unwrap();
        assert!((l - 1.0).norm() < 1e-14 && (r - 1.0).norm() < 1e-12);
        let k = correlation_kernel(&sys).unwrap();
        let psi = CausalKernel::new(&k, &g);
        assert!(psi.power(3).as_slice().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }
}

#[test]
fn fredholm_expansion_equals_determinant() {
    let mut rng = substream(8, 0);
    let k = Matrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
    let mu: Vec<f64> = (0..6).map(|_| rng.gen_range(0.5..1.5)).collect();
    let exp = fredholm_det_expansion(&k, &mu, 6).unwrap();
    let direct = Matrix::identity(6).add(&k.scale_cols(&mu)).det();
    assert!((exp - direct).abs() < 1e-12);
    assert_eq!(fredholm_det_expansion(&Matrix::zeros(6, 6), &mu, 6).unwrap(), 1.0);
    // Rank one: 1 + Σ u_i v_i μ_i.
    let u: Vec<f64> = (0..6).map(|i| 0.1 * i as f64).collect();
    let v: Vec<f64> = (0..6).map(|i| 1.0 - 0.2 * i as f64).collect();
    let r1 = Matrix::from_fn(6, 6, |i, j| u[i] * v[j]);
    let expect = 1.0 + (0..6).map(|i| u[i] * v[i] * mu[i]).sum::<f64>();
    assert!((fredholm_det_expansion(&r1, &mu, 6).unwrap() - expect).abs() < 1e-14);
}

#[test]
fn heine_and_cyclic_identities() {
    let mut rng = substream(9, 0);
    let mu: Vec<f64> = (0..8).map(|_| rng.gen_range(0.5..1.5)).collect();
    for n in 1..=4 {
        let phi = Matrix::from_fn(n, 8, |_, _| rng.gen_range(-1.0..1.0));
        let psi = Matrix::from_fn(n, 8, |_, _| rng.gen_range(-1.0..1.0));
        let (l, r) = heine_sides(&phi, &psi, &mu).unwrap();
        assert!((l - r).abs() < 1e-12, "n = {n}: {l} vs {r}");
    }
    let l = Matrix::from_fn(3, 7, |_, _| rng.gen_range(-1.0..1.0));
    let k = Matrix::from_fn(7, 3, |_, _| rng.gen_range(-1.0..1.0));
    let (mu3, mu7): (Vec<f64>, Vec<f64>) = ((0..3).map(|i| 1.0 + 0.1 * i as f64).collect(), mu[..7].to_vec());
    let a = Matrix::identity(3).add(&l.scale_cols(&mu7).matmul(&k.scale_cols(&mu3))).det();
    let b = Matrix::identity(7).add(&k.scale_cols(&mu3).matmul(&l.scale_cols(&mu7))).det();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn exact_rational_system() {
    let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let g = GridMeasure::<BigRational>::new(vec![0.0, 1.0, 2.0], vec![q(1, 1), q(1, 2), q(2, 1)]).unwrap();
    let step = |s: i64| Matrix::from_fn(3, 3, |x, y| q(1 + ((x * 3 + y) as i64 + s) % 5, 3));
    let sys = TransitionSystem::new(1, vec![g.clone(), g.clone(), g], vec![step(0), step(2)], vec![0, 1], vec![1, 2])
        .unwrap();
    assert_eq!(sys.partition_function().unwrap(), Enumerator::new(&sys).unwrap().partition_function());
    let k = correlation_kernel(&sys).unwrap();
    let sites = [(0i64, 0usize), (0, 2)];
    assert_eq!(k.correlation(&sites), brute_force_correlation(&sys, &sites).unwrap());
}

#[test]
fn png_partition_function_closed_form() {
    let hom = GeomParams::homogeneous(0.25).unwrap();
    let inh = GeomParams::inhomogeneous(vec![0.45, 0.5, 0.55, 0.5, 0.48], vec![0.52, 0.47, 0.5, 0.55, 0.45]).unwrap();
    for params in [&hom, &inh] {
        for big_n in [2usize, 3] {
            let sys = png_system(params, big_n, big_n, 70).unwrap();
            let z = sys.partition_function().unwrap();
            let closed = png_partition_closed_form(params, big_n, big_n);
            assert!(((z - closed) / closed).abs() < 1e-8, "N = {big_n}: {z} vs {closed}");
        }
    }
}

#[test]
fn png_kernel_independent_of_n() {
    let p = GeomParams::homogeneous(0.25).unwrap();
    let gap = |n: usize| {
        let sys = png_system(&p, 2, n, 40).unwrap();
        let bottom = 1 - n as i64;
        // P[h_0(0) ≤ 2, h_0(2) ≤ 3]
        gap_probability(&sys, &|r, x| {
            let h = x as i64 + bottom;
            if (r == 0 && h > 2) || (r == 2 && h > 3) { -1.0 } else { 0.0 }
        })
        .unwrap()
    };
    let (a, b) = (gap(2), gap(4));
    assert!((a - b).abs() < 1e-10, "{a} vs {b}");
}

#[test]
fn size_guard_trips() {
    let sys = random_system(3, 2, 40, 0).unwrap();
    assert!(matches!(Enumerator::new(&sys), Err(png_det::Error::SizeGuard { .. })));
}
