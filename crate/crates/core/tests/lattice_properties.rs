use png_det::lattice::*;
use proptest::prelude::*;

fn field_strategy(max_n: usize, max_w: i64) -> impl Strategy<Value = (usize, WeightField)> {
    (1..=max_n).prop_flat_map(move |n| {
        let s = 2 * n - 1;
        proptest::collection::vec(0..=max_w, s * s).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(s).map(<[i64]>::to_vec).collect();
            (n, WeightField::from_rows(&rows).unwrap().triangle(n))
        })
    })
}

fn box_field(n: usize, v: &[i64]) -> WeightField {
    let rows: Vec<Vec<i64>> = v.chunks(n).map(<[i64]>::to_vec).collect();
    WeightField::from_rows(&rows).unwrap()
}

/// Max over all up/right paths from (1,1) to (i,j).
fn brute_lpp(f: &WeightField, i: i64, j: i64) -> i64 {
    if i == 1 && j == 1 {
        return f.get(1, 1);
    }
    let mut best = i64::MIN;
    if i > 1 {
        best = best.max(brute_lpp(f, i - 1, j));
    }
    if j > 1 {
        best = best.max(brute_lpp(f, i, j - 1));
    }
    best + f.get(i, j)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn height_equals_passage_time((n, f) in field_strategy(6, 4)) {
        let evo = evolve_png(&f, 2 * n - 1);
        let g = lpp_table(&f);
        let ni = n as i64;
        for k in (1 - ni)..ni {
            prop_assert_eq!(g.g((ni + k) as usize, (ni - k) as usize), evo.h(2 * k, 2 * n - 1));
        }
    }

    #[test]
    fn jumps_nonnegative_and_consistent((n, f) in field_strategy(5, 4)) {
        let evo = evolve_png(&f, 2 * n - 1);
        for t in 0..2 * n {
            let j = jumps(&evo, t);
            prop_assert!(j.plus.iter().chain(&j.minus).all(|&v| v >= 0));
            if t >= 1 {
                // One step of the jump evolution at every site of time t.
                let prev = jumps(&evo, t - 1);
                let ti = t as i64;
                let mut x = -ti + 1;
                while x <= ti - 1 {
                    let w = f.omega(x, ti);
                    let a = prev.eta_plus(x + 1);
                    let b = prev.eta_minus(x - 1);
                    prop_assert_eq!(j.eta_plus(x), (a - b).max(0) + w);
                    prop_assert_eq!(j.eta_minus(x), (b - a).max(0) + w);
                    x += 2;
                }
            }
        }
    }

    #[test]
    fn multilayer_round_trip((n, f) in field_strategy(6, 4)) {
        let cfg = multilayer(&f, n);
        prop_assert!(check_nonintersection(&cfg).is_ok());
        prop_assert_eq!(&cfg.ledger, &field_ledger(&f, n));
        let back = reconstruct_weights(&cfg).unwrap();
        prop_assert_eq!(back, f.triangle(n));
    }

    #[test]
    fn rsk_shape_matches_layers(n in 1usize..=5, v in proptest::collection::vec(0i64..=4, 25)) {
        let f = box_field(5, &v);
        let mut sub = WeightField::zeros(n, n);
        for i in 1..=n { for j in 1..=n { sub.set(i, j, f.get(i as i64, j as i64)); } }
        let cfg = multilayer(&sub, n);
        let ni = n as i64;
        for k in 0..ni {
            let shape = rsk_shape(&sub, (ni - k) as usize, n);
            let shape_t = rsk_shape(&sub, n, (ni - k) as usize);
            for j in 1..=n {
                prop_assert_eq!(shape.part(j), cfg.h(j - 1, -2 * k) + j as i64 - 1);
                prop_assert_eq!(shape_t.part(j), cfg.h(j - 1, 2 * k) + j as i64 - 1);
            }
        }
        prop_assert_eq!(rsk_shape(&sub, n, n).part(1), lpp_table(&sub).g(n, n));
    }

    #[test]
    fn lpp_matches_path_enumeration(v in proptest::collection::vec(0i64..=6, 25)) {
        let f = box_field(5, &v);
        let g = lpp_table(&f);
        for i in 1..=5 { for j in 1..=5 {
            prop_assert_eq!(g.g(i, j), brute_lpp(&f, i as i64, j as i64));
        }}
    }

    #[test]
    fn monotone_coupling(v in proptest::collection::vec(0i64..=3, 16), i in 1usize..=4, j in 1usize..=4) {
        let f = box_field(4, &v);
        let mut g2 = f.clone();
        g2.set(i, j, f.get(i as i64, j as i64) + 1);
        let (a, b) = (lpp_table(&f), lpp_table(&g2));
        for x in i..=4 { for y in j..=4 { prop_assert!(b.g(x, y) >= a.g(x, y)); } }
    }

    #[test]
    fn t_operator_support_shrinks((n, f) in field_strategy(5, 3)) {
        let mut w = f.clone();
        for k in 0..n {
            // T^k w vanishes for i ≤ k or j ≤ k.
            for i in 1..=w.width() { for j in 1..=w.height() {
                if i <= k || j <= k { prop_assert_eq!(w.get(i as i64, j as i64), 0); }
            }}
            w = t_operator(&w);
        }
        let t = w.triangle(n);
        prop_assert!(t.is_zero());
    }
}

#[test]
fn point_to_line_dominates_point() {
    let p = GeomParams::homogeneous(0.25).unwrap();
    for seed in 0..20 {
        let f = sample_weight_field(&p, 9, 9, seed).unwrap();
        let t = lpp_table(&f);
        assert!(point_to_line(&t, 5).unwrap() >= t.g(5, 5));
    }
}
