//! Periodic-time model: walks over interior times −M+1..=M−1 with
//! X^{M−1} = X^{−M+1}. Fourier-expanding the periodicity constraint splits
//! it into label components k, each a determinantal system with boundary
//! kernels z^{kx} and z^{−kx}.

use super::CircleWalkParams;
use crate::determinantal::{
    binomial_count, subsets, GridMeasure, TransitionSystem, ENUMERATION_LIMIT,
};
use crate::linalg::Matrix;
use crate::Error;
use num_complex::Complex64;

/// Z(k) = N^n ∏_j f(−k_j)^{2M−2}.
pub fn label_weight(params: &CircleWalkParams, k: &[usize]) -> Complex64 {
    let n = params.n_sites as f64;
    k.iter().fold(Complex64::new(n.powi(k.len() as i32), 0.0), |acc, &kj| {
        acc * params.multiplier(-(kj as i64)).powi(2 * params.m as i32 - 2)
    })
}

/// Kernel of label component k:
/// (1/N) Σ_i f(−k_i)^{s−r} z^{k_i(y−x)} − [r<s] φ_{r,s}(x, y).
pub fn component_kernel(params: &CircleWalkParams, k: &[usize], r: i64, x: i64, s: i64, y: i64) -> Complex64 {
    let tilde: Complex64 = k
        .iter()
        .map(|&ki| {
            let ki = ki as i64;
            params.multiplier(-ki).powi((s - r) as i32) * params.root(ki * (y - x))
        })
        .sum::<Complex64>()
        / params.n_sites as f64;
    if r < s {
        tilde - params.phi(r, x, s, y)
    } else {
        tilde
    }
}

/// Component k as a generic transition system (complex boundary kernels).
pub fn component_system(params: &CircleWalkParams, k: &[usize]) -> Result<TransitionSystem<Complex64>, Error> {
    params.validate()?;
    let (n, m) = (params.n_sites, params.m);
    let grid = GridMeasure::<Complex64>::integers(0, n as i64 - 1);
    let grids = vec![grid; 2 * m + 1];
    let mut steps = Vec::with_capacity(2 * m);
    steps.push(Matrix::from_fn(n, n, |a, x| params.root((a * x) as i64)));
    let step = Matrix::from_fn(n, n, |x, y| {
        if (x + 1) % n == y {
            Complex64::new(params.p_step, 0.0)
        } else if x == y {
            Complex64::new(params.q_step, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    for _ in 0..2 * m - 2 {
        steps.push(step.clone());
    }
    steps.push(Matrix::from_fn(n, n, |x, a| params.root(-((a * x) as i64))));
    TransitionSystem::new(m, grids, steps, k.to_vec(), k.to_vec())
}

fn check_sites(params: &CircleWalkParams, sites: &[(i64, i64)]) -> Result<(), Error> {
    let m = params.m as i64;
    for &(t, x) in sites {
        if t <= -m || t >= m || x < 0 || x >= params.n_sites as i64 {
            return Err(Error::OutOfRange(format!("site ({t}, {x}) outside the interior torus")));
        }
    }
    Ok(())
}

/// Correlation at the sites from the component decomposition:
/// Σ_k Z(k) det[K_k(sites)] / Σ_k Z(k).
pub fn torus_mixture_correlation(params: &CircleWalkParams, sites: &[(i64, i64)]) -> Result<Complex64, Error> {
    params.validate()?;
    check_sites(params, sites)?;
    let count = binomial_count(params.n_sites, params.n);
    if count > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard { count, limit: ENUMERATION_LIMIT });
    }
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for k in subsets(params.n_sites, params.n) {
        let z = label_weight(params, &k);
        let kmat = Matrix::from_fn(sites.len(), sites.len(), |i, j| {
            component_kernel(params, &k, sites[i].0, sites[i].1, sites[j].0, sites[j].1)
        });
        num += z * kmat.det();
        den += z;
    }
    Ok(num / den)
}

/// Exact probability that every site is occupied, summing over all labelled
/// walk families: each step moves every particle by 0 (weight q) or 1
/// (weight p) mod N, positions must stay distinct, and the configuration at
/// time M−1 must equal the one at −M+1.
///
/// With n odd, a cyclic relabelling is an even permutation, so these weights
/// are exactly the products of one-step determinants.
pub fn torus_enumeration(params: &CircleWalkParams, sites: &[(i64, i64)]) -> Result<f64, Error> {
    params.validate()?;
    check_sites(params, sites)?;
    let steps = 2 * params.m - 2;
    let count = binomial_count(params.n_sites, params.n) * 2f64.powi((params.n * steps) as i32);
    if count > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard { count, limit: ENUMERATION_LIMIT });
    }
    let lo = 1 - params.m as i64;
    let mut num = 0.0;
    let mut den = 0.0;
    for start in subsets(params.n_sites, params.n) {
        let mut path = vec![start.clone()];
        walk(params, &start, steps, 1.0, &mut path, &mut |path, w| {
            if sorted(path.last().unwrap()) != start {
                return;
            }
            den += w;
            let hit = sites.iter().all(|&(t, x)| path[(t - lo) as usize].contains(&(x as usize)));
            if hit {
                num += w;
            }
        });
    }
    Ok(num / den)
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

fn walk(
    params: &CircleWalkParams,
    cur: &[usize],
    left: usize,
    w: f64,
    path: &mut Vec<Vec<usize>>,
    visit: &mut dyn FnMut(&[Vec<usize>], f64),
) {
    if left == 0 {
        visit(path, w);
        return;
    }
    let n = cur.len();
    for mask in 0u32..(1 << n) {
        let next: Vec<usize> =
            (0..n).map(|i| (cur[i] + ((mask >> i) & 1) as usize) % params.n_sites).collect();
        if sorted(&next).windows(2).any(|p| p[0] == p[1]) {
            continue;
        }
        let ones = mask.count_ones() as i32;
        let wn = w * params.p_step.powi(ones) * params.q_step.powi(n as i32 - ones);
        path.push(next.clone());
        walk(params, &next, left - 1, wn, path, visit);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::cylinder_kernel;
    use crate::determinantal::{brute_force_correlation, correlation_kernel};

    #[test]
    fn component_closed_form_matches_generic_kernel() {
        let p = CircleWalkParams::new(5, 3, 0.3, 2).unwrap();
        for k in [p.alpha(), vec![0, 2, 3]] {
            let sys = component_system(&p, &k).unwrap();
            let kern = correlation_kernel(&sys).unwrap();
            assert!((sys.partition_function().unwrap() - label_weight(&p, &k)).norm() < 1e-9);
            for (r, s) in [(-1, -1), (-1, 1), (1, -1), (0, 1)] {
                for x in 0..5 {
                    for y in 0..5 {
                        let a = kern.eval(r, x, s, y);
                        let b = component_kernel(&p, &k, r, x as i64, s, y as i64);
                        assert!((a - b).norm() < 1e-10, "k={k:?} ({r},{x};{s},{y}) {a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_component_is_the_cylinder_kernel() {
        let p = CircleWalkParams::new(5, 3, 0.3, 3).unwrap();
        let a = p.alpha();
        let sys = component_system(&p, &a).unwrap();
        for &(r, x, s, y) in &[(0, 1, 0, 2), (-2, 0, 1, 4), (2, 3, -1, 0)] {
            assert!((component_kernel(&p, &a, r, x, s, y) - cylinder_kernel(&p, r, x, s, y)).norm() < 1e-13);
        }
        let sites = [(-1i64, 1usize), (1, 2)];
        let brute = brute_force_correlation(&sys, &sites).unwrap();
        let k = |i: usize, j: usize| {
            cylinder_kernel(&p, sites[i].0, sites[i].1 as i64, sites[j].0, sites[j].1 as i64)
        };
        let det = k(0, 0) * k(1, 1) - k(0, 1) * k(1, 0);
        assert!((brute - det).norm() < 1e-10, "{brute} {det}");
    }

    #[test]
    fn enumeration_matches_mixture() {
        for (n_sites, n, m) in [(4, 1, 2), (5, 3, 2), (5, 3, 3)] {
            let p = CircleWalkParams::new(n_sites, n, 0.3, m).unwrap();
            for sites in [vec![(0, 1)], vec![(0, 0), (1 - m as i64, 2)], vec![(0, 2), (m as i64 - 1, 3)]] {
                let e = torus_enumeration(&p, &sites).unwrap();
                let mix = torus_mixture_correlation(&p, &sites).unwrap();
                assert!((e - mix.re).abs() < 1e-12 && mix.im.abs() < 1e-12, "{sites:?}: {e} {mix}");
            }
        }
    }
}
