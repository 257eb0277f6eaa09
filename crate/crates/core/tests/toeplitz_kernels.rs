use num_complex::Complex64;
use png_det::determinantal::{correlation_kernel, png_system};
use png_det::lattice::GeomParams;
use png_det::toeplitz::*;

#[test]
fn contour_kernel_matches_floored_finite_system() {
    let alpha = 0.5;
    let params = GeomParams::homogeneous(alpha * alpha).unwrap();
    let p = PngKernelParams::new(alpha, 2).unwrap();
    let spec = ContourSpec::default_for(alpha);
    for n in [2usize, 3] {
        let k = correlation_kernel(&png_system(&params, 2, n, 60).unwrap()).unwrap();
        let idx = |x: i64| (x + n as i64 - 1) as usize;
        for (u, v) in [(0i64, 0i64), (1, 0), (0, 1), (-1, 1), (1, -1)] {
            for (x, y) in [(0i64, 0i64), (1, 2), (3, 0), (-1, 4), (5, 5)] {
                let finite = k.eval(2 * u, idx(x), 2 * v, idx(y));
                let contour = png_kernel(&p, u, x, v, y, &spec).unwrap();
                assert!((finite - contour).abs() < 1e-8, "n={n} ({u},{x};{v},{y}): {finite} vs {contour}");
            }
        }
    }
}

#[test]
fn particle_count_per_slice() {
    for big_n in [2usize, 3, 4] {
        let p = PngKernelParams::new(0.5, big_n).unwrap();
        let lo = 1 - big_n as i64;
        for u in [0i64, big_n as i64 - 1] {
            let k = SeriesKernel::new(&p, u, u, (lo, 200), (lo, 200)).unwrap();
            let total: f64 = (lo..=200).map(|x| k.get(x, x)).sum();
            assert!((total - big_n as f64).abs() < 1e-10, "N={big_n} u={u}: {total}");
        }
    }
}

#[test]
fn radius_independence() {
    let p = PngKernelParams::new(0.4, 3).unwrap();
    let base = ContourSpec::default_for(0.4);
    for (u, x, v, y) in [(0, 1, 0, 2), (1, 0, -1, 3), (-2, 2, 1, 1)] {
        let a = png_kernel(&p, u, x, v, y, &base).unwrap();
        let b = png_kernel(&p, u, x, v, y, &base.with_radii(0.55, 1.3)).unwrap();
        let c = png_kernel(&p, u, x, v, y, &base.with_radii(0.9, 2.2)).unwrap();
        assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10, "{a} {b} {c}");
    }
    assert!(base.with_radii(0.3, 1.2).validate(0.4).is_err());
}

#[test]
fn phi_is_stochastic() {
    let p = PngKernelParams::new(0.5, 4).unwrap();
    for (u, v) in [(-1i64, 0i64), (-2, 2), (0, 3)] {
        let s: f64 = (-150..=150).map(|y| phi_uv(&p, u, v, 0, y)).sum();
        assert!((s - 1.0).abs() < 1e-12, "{s}");
    }
}

#[test]
fn generic_g_reduces_to_closed_form() {
    let alpha = 0.5;
    let sys = SymbolSystem::png(&GeomParams::homogeneous(alpha * alpha).unwrap(), 3).unwrap();
    let p = PngKernelParams::new(alpha, 3).unwrap();
    let (z, w) = (Complex64::from_polar(1.3, 0.4), Complex64::from_polar(0.7, -2.0));
    for (u, v) in [(0i64, 0i64), (1, -2), (-2, 1), (2, 2)] {
        let generic = sys.limit_kernel_g(2 * u, 2 * v, z, w).unwrap();
        assert!((generic - p.g(u, v, z, w)).norm() < 1e-12 * generic.norm().max(1.0));
    }
}

#[test]
fn scaled_gap_approaches_tracy_widom() {
    assert!(scaled_gap(&PngKernelParams::new(0.5, 25).unwrap(), 0.0, 0.0, 14.0).unwrap().prob > 0.9);
    let f2_zero = 0.969_372_8;
    let mut prev = f64::INFINITY;
    for big_n in [25usize, 100] {
        let p = PngKernelParams::new(0.5, big_n).unwrap();
        let level = (p.scaling.a * big_n as f64).round() as i64;
        let width = (14.0 * p.scaling.d * (big_n as f64).cbrt()) as usize + 20;
        let err = (single_time_gap(&p, 0, level, width).unwrap() - f2_zero).abs();
        assert!(err < prev);
        prev = err;
    }
}

#[test]
fn scaled_kernel_approaches_airy() {
    let mut prev = f64::INFINITY;
    for big_n in [25usize, 100, 400] {
        let p = PngKernelParams::new(0.5, big_n).unwrap();
        let r = scaled_kernel_limit(&p, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(r.gap() < prev, "N={big_n}: {r:?}");
        prev = r.gap();
    }
    assert!(prev < 5e-3);
    // Rounding is reported back: the effective arguments reproduce the sites.
    let p = PngKernelParams::new(0.5, 100).unwrap();
    let r = scaled_kernel_limit(&p, 0.3, 0.7, -0.2, 0.1).unwrap();
    assert_eq!(scaled_site(&p, r.tau, r.xi).unwrap().1, r.x);
    assert_eq!(scaled_site(&p, r.tau2, r.xi2).unwrap().0, r.v);
    assert!(scaled_kernel_limit(&PngKernelParams::new(0.5, 4).unwrap(), 2.0, 0.0, 0.0, 0.0).is_err());
}

#[test]
fn equal_time_blocks_are_conjugation_free() {
    // det of a principal block at equal times ignores the e^{ξ′τ−ξτ} factors.
    let p = PngKernelParams::new(0.5, 100).unwrap();
    let pts = [(0.4, -0.5), (0.4, 0.5)];
    let v: Vec<Vec<ScaledKernelPoint>> =
        pts.iter().map(|a| pts.iter().map(|b| scaled_kernel_limit(&p, a.0, a.1, b.0, b.1).unwrap()).collect()).collect();
    let det = |f: &dyn Fn(&ScaledKernelPoint) -> f64| f(&v[0][0]) * f(&v[1][1]) - f(&v[0][1]) * f(&v[1][0]);
    let conj = |q: &ScaledKernelPoint| q.airy;
    let raw = |q: &ScaledKernelPoint| {
        png_det::airy::extended_airy_kernel(q.tau, q.xi, q.tau2, q.xi2, &Default::default()).unwrap()
    };
    assert!((det(&conj) - det(&raw)).abs() < 1e-12);
}
