use super::{GridMeasure, TransitionSystem};
use crate::lattice::GeomParams;
use crate::linalg::Matrix;
use crate::Error;

/// The multilayer PNG at time 2N−1 as n ≥ N nonintersecting paths over
/// x = −M..=M, M = 2N−1; particle k at time r is h_{k}(r, 2N−1).
///
/// Odd steps r = 2j−1 are up-steps (1−a)a^{y−x} with a = a_{j+N}; even steps
/// r = 2j are down-steps (1−b)b^{x−y} with b = b_{N−j}. All paths start and
/// end at x_i = 1−i. Heights are kept on [−(n−1), top]: no path ever drops
/// below the bottom path's start, and without that floor the Toeplitz-type
/// sums pick up configurations the growth model never produces.
pub fn png_system(params: &GeomParams, big_n: usize, n: usize, top: i64) -> Result<TransitionSystem<f64>, Error> {
    if big_n == 0 || n < big_n {
        return Err(Error::InvalidParams(format!("need n >= N >= 1, got n = {n}, N = {big_n}")));
    }
    let m = 2 * big_n - 1;
    params.check_covers(m, m)?;
    let bottom = 1 - n as i64;
    if top < 0 {
        return Err(Error::InvalidParams("grid top must be nonnegative".into()));
    }
    let len = (top - bottom + 1) as usize;
    let grid = GridMeasure::integers(bottom, top);
    let ni = big_n as i64;
    let mut steps = Vec::with_capacity(2 * m);
    for r in -(m as i64)..(m as i64) {
        let step = if r.rem_euclid(2) == 1 {
            let a = params.a(((r + 1) / 2 + ni) as usize);
            Matrix::from_fn(len, len, |x, y| if y >= x { (1.0 - a) * a.powi((y - x) as i32) } else { 0.0 })
        } else {
            let b = params.b((ni - r / 2) as usize);
            Matrix::from_fn(len, len, |x, y| if y <= x { (1.0 - b) * b.powi((x - y) as i32) } else { 0.0 })
        };
        steps.push(step);
    }
    let boundary: Vec<usize> = (1..=n).map(|i| (1 - i as i64 - bottom) as usize).collect();
    TransitionSystem::new(m, vec![grid; 2 * m + 1], steps, boundary.clone(), boundary)
}

/// Z = ∏_{j≤M} (1−a_j)^n (1−b_j)^n / ∏_{i+j≤2N} (1−a_i b_j).
pub fn png_partition_closed_form(params: &GeomParams, big_n: usize, n: usize) -> f64 {
    let m = 2 * big_n - 1;
    let mut num = 1.0;
    for j in 1..=m {
        num *= ((1.0 - params.a(j)) * (1.0 - params.b(j))).powi(n as i32);
    }
    let mut den = 1.0;
    for i in 1..=m {
        for j in 1..=(2 * big_n - i) {
            den *= 1.0 - params.a(i) * params.b(j);
        }
    }
    num / den
}
