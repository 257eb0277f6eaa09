//! Measures given by products of determinants (Karlin–McGregor / LGV type):
//! transition systems, the space-time correlation kernel, Fredholm
//! determinants, and brute-force enumeration oracles.

mod enumerate;
mod fredholm;
mod kernel;
mod png;

pub use enumerate::{
    binomial_count, brute_force_correlation, brute_force_expectation, subsets, Enumerator, ENUMERATION_LIMIT,
};
pub use fredholm::{
    fredholm_det_expansion, gap_probability, heine_sides, product_rule_check, CausalKernel,
};
pub use kernel::{correlation_kernel, BlockKernel};
pub use png::{png_partition_closed_form, png_system};

use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::Error;

/// Largest condition number of the Gram matrix A accepted for inexact types.
pub const MAX_CONDITION: f64 = 1e12;

/// Finite support with strictly positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMeasure<T> {
    points: Vec<f64>,
    weights: Vec<T>,
}

impl<T: Scalar> GridMeasure<T> {
    pub fn new(points: Vec<f64>, weights: Vec<T>) -> Result<Self, Error> {
        if points.len() != weights.len() {
            return Err(Error::Shape("points and weights differ in length".into()));
        }
        let mut sorted = points.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams("grid points must be distinct".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidParams("measure weights must be positive".into()));
        }
        Ok(Self { points, weights })
    }

    /// Unit weights.
    pub fn counting(points: Vec<f64>) -> Result<Self, Error> {
        let n = points.len();
        Self::new(points, vec![T::one(); n])
    }

    /// Counting measure on the integers lo..=hi.
    pub fn integers(lo: i64, hi: i64) -> Self {
        Self::counting((lo..=hi).map(|x| x as f64).collect()).expect("distinct integers")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn points(&self) -> &[f64] {
        &self.points
    }
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.points.iter().position(|&p| p == x)
    }
}

/// (φ∗ψ)(x, y) = Σ_z φ(x, z) ψ(z, y) μ(z).
pub fn convolve<T: Scalar>(phi: &Matrix<T>, psi: &Matrix<T>, measure: &GridMeasure<T>) -> Result<Matrix<T>, Error> {
    if phi.cols() != measure.len() || psi.rows() != measure.len() {
        return Err(Error::Shape(format!(
            "convolution of {}x{} and {}x{} over a {}-point grid",
            phi.rows(),
            phi.cols(),
            psi.rows(),
            psi.cols(),
            measure.len()
        )));
    }
    Ok(phi.scale_cols(measure.weights()).matmul(psi))
}

/// n paths over times −M..=M: slice grids, one-step kernels φ_{r,r+1}, and
/// fixed start/end configurations (indices into the boundary slices).
///
/// The boundary slices may carry their own index sets (e.g. Fourier labels);
/// only interior slices contribute measure weights.
#[derive(Clone, Debug)]
pub struct TransitionSystem<T> {
    m: usize,
    grids: Vec<GridMeasure<T>>,
    steps: Vec<Matrix<T>>,
    start: Vec<usize>,
    end: Vec<usize>,
}

impl<T: Scalar> TransitionSystem<T> {
    /// `grids[r + M]` for r = −M..=M and `steps[r + M]` = φ_{r,r+1}.
    pub fn new(
        m: usize,
        grids: Vec<GridMeasure<T>>,
        steps: Vec<Matrix<T>>,
        start: Vec<usize>,
        end: Vec<usize>,
    ) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::InvalidParams("M must be at least 1".into()));
        }
        if grids.len() != 2 * m + 1 || steps.len() != 2 * m {
            return Err(Error::Shape(format!("need {} grids and {} steps", 2 * m + 1, 2 * m)));
        }
        for (k, s) in steps.iter().enumerate() {
            if s.rows() != grids[k].len() || s.cols() != grids[k + 1].len() {
                return Err(Error::Shape(format!("step {} has the wrong shape", k as i64 - m as i64)));
            }
        }
        let n = start.len();
        if n == 0 || end.len() != n {
            return Err(Error::InvalidParams("start and end need the same positive particle count".into()));
        }
        for (cfg, g) in [(&start, &grids[0]), (&end, &grids[2 * m])] {
            let mut c = cfg.clone();
            c.sort_unstable();
            c.dedup();
            if c.len() != n || c.iter().any(|&i| i >= g.len()) {
                return Err(Error::InvalidParams("boundary configuration must be n distinct grid indices".into()));
            }
        }
        let sys = Self { m, grids, steps, start, end };
        if sys.partition_function()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(sys)
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.start.len()
    }
    pub fn start(&self) -> &[usize] {
        &self.start
    }
    pub fn end(&self) -> &[usize] {
        &self.end
    }

    /// Grid of time r, −M ≤ r ≤ M.
    pub fn grid(&self, r: i64) -> &GridMeasure<T> {
        &self.grids[(r + self.m as i64) as usize]
    }

    /// φ_{r,r+1}.
    pub fn step(&self, r: i64) -> &Matrix<T> {
        &self.steps[(r + self.m as i64) as usize]
    }

    /// Interior times −M+1..=M−1.
    pub fn interior_times(&self) -> std::ops::RangeInclusive<i64> {
        (1 - self.m as i64)..=(self.m as i64 - 1)
    }

    /// φ_{r,s} = φ_{r,r+1} ∗ ⋯ ∗ φ_{s−1,s} for r < s.
    pub fn phi(&self, r: i64, s: i64) -> Matrix<T> {
        assert!(r < s, "φ_{{r,s}} needs r < s");
        let mut acc = self.step(r).clone();
        for t in r + 1..s {
            acc = convolve(&acc, self.step(t), self.grid(t)).expect("validated shapes");
        }
        acc
    }

    /// A_ij = φ_{−M,M}(x_i^{−M}, x_j^{M}).
    pub fn gram_matrix(&self) -> Matrix<T> {
        let m = self.m as i64;
        let full = self.phi(-m, m);
        Matrix::from_fn(self.n(), self.n(), |i, j| full[(self.start[i], self.end[j])].clone())
    }

    /// Z_{n,M} = det A.
    pub fn partition_function(&self) -> Result<T, Error> {
        let d = self.gram_matrix().det();
        if d.is_zero() {
            Err(Error::Singular)
        } else {
            Ok(d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolve_identity_and_shape_errors() {
        let g = GridMeasure::<f64>::integers(0, 2);
        let phi = Matrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        assert_eq!(convolve(&phi, &Matrix::identity(3), &g).unwrap(), phi);
        assert!(convolve(&phi, &Matrix::identity(2), &g).is_err());
    }

    #[test]
    fn measure_validation() {
        assert!(GridMeasure::<f64>::counting(vec![1.0, 1.0]).is_err());
        assert!(GridMeasure::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn identity_chain() {
        let g = GridMeasure::<f64>::integers(0, 3);
        let sys = TransitionSystem::new(
            1,
            vec![g.clone(), g.clone(), g],
            vec![Matrix::identity(4), Matrix::identity(4)],
            vec![0, 2],
            vec![0, 2],
        )
        .unwrap();
        assert_eq!(sys.gram_matrix(), Matrix::identity(2));
        assert_eq!(sys.partition_function().unwrap(), 1.0);
    }
}

/// Random system whose steps are positive bidiagonal (stay or move one site
/// right), so the measure is a genuine probability measure on
/// non-intersecting paths. Ends are reachable start shifts.
pub fn random_positive_system(n: usize, m: usize, len: usize, seed: u64) -> Result<TransitionSystem<f64>, Error> {
    use rand::Rng;
    if n + 2 * m > len {
        return Err(Error::InvalidParams("grid too short for the paths".into()));
    }
    let mut rng = crate::rng::substream(seed, 0x7051);
    let points: Vec<f64> = (0..len).map(|x| x as f64).collect();
    let mut grids = Vec::with_capacity(2 * m + 1);
    for _ in 0..=2 * m {
        let w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.5..1.5)).collect();
        grids.push(GridMeasure::new(points.clone(), w)?);
    }
    let steps = (0..2 * m)
        .map(|_| {
            let stay: Vec<f64> = (0..len).map(|_| rng.gen_range(0.2..1.0)).collect();
            let right: Vec<f64> = (0..len).map(|_| rng.gen_range(0.2..1.0)).collect();
            Matrix::from_fn(len, len, |x, y| if y == x { stay[x] } else if y == x + 1 { right[x] } else { 0.0 })
        })
        .collect();
    // Start at a random increasing n-tuple leaving room for 2M moves; each
    // particle then advances by a random amount, kept ordered.
    let mut start: Vec<usize> = Vec::with_capacity(n);
    let mut lo = 0;
    for i in 0..n {
        let x = rng.gen_range(lo..=len - 2 * m - (n - i));
        start.push(x);
        lo = x + 1;
    }
    let mut end = vec![0; n];
    for i in (0..n).rev() {
        let cap = if i + 1 < n { end[i + 1] - 1 } else { len - 1 };
        end[i] = (start[i] + rng.gen_range(0..=2 * m)).min(cap);
    }
    TransitionSystem::new(m, grids, steps, start, end)
}

/// Random system with positive one-step kernels and measure weights, for
/// oracle checks: n particles, half-width M, `len` grid points per slice.
pub fn random_system(n: usize, m: usize, len: usize, seed: u64) -> Result<TransitionSystem<f64>, Error> {
    use rand::Rng;
    if n > len {
        return Err(Error::InvalidParams("more particles than grid points".into()));
    }
    let mut rng = crate::rng::substream(seed, 0x5157);
    let points: Vec<f64> = (0..len).map(|x| x as f64).collect();
    let mut grids = Vec::with_capacity(2 * m + 1);
    for _ in 0..=2 * m {
        let w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.5..1.5)).collect();
        grids.push(GridMeasure::new(points.clone(), w)?);
    }
    let steps = (0..2 * m).map(|_| Matrix::from_fn(len, len, |_, _| rng.gen_range(0.05..1.0))).collect();
    let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut idx: Vec<usize> = (0..len).collect();
        for i in 0..n {
            let j = rng.gen_range(i..len);
            idx.swap(i, j);
        }
        let mut s = idx[..n].to_vec();
        s.sort_unstable();
        s
    };
    let start = pick(&mut rng);
    let end = pick(&mut rng);
    TransitionSystem::new(m, grids, steps, start, end)
}
