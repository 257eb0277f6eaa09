use super::enumerate::binomial;
use super::kernel::{correlation_kernel, BlockKernel};
use super::{TransitionSystem, ENUMERATION_LIMIT};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::Error;
use num_complex::Complex64;

fn for_each_subset(len: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..len {
            if len - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, len, k, cur, f);
            cur.pop();
        }
    }
    rec(0, len, k, &mut Vec::with_capacity(k), f);
}

/// Σ_{m ≤ max_order} (1/m!) Σ_{x_1..x_m} det(K(x_i, x_j)) μ(x_1)⋯μ(x_m),
/// summed as distinct subsets (the diagonal terms vanish).
pub fn fredholm_det_expansion<T: Scalar>(kernel: &Matrix<T>, weights: &[T], max_order: usize) -> Result<T, Error> {
    let len = weights.len();
    if !kernel.is_square() || kernel.rows() != len {
        return Err(Error::Shape("kernel and measure sizes differ".into()));
    }
    let top = max_order.min(len);
    let count: f64 = (0..=top).map(|m| binomial(len, m)).sum();
    if count > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard { count, limit: ENUMERATION_LIMIT });
    }
    let mut total = T::one();
    for m in 1..=top {
        for_each_subset(len, m, &mut |s| {
            let mu = s.iter().fold(T::one(), |acc, &i| acc * weights[i].clone());
            total = total.clone() + kernel.submatrix(s, s).det() * mu;
        });
    }
    Ok(total)
}

/// Flattened interior space Λ = ⋃_r {r} × grid_r.
fn flat_sites<T: Scalar>(k: &BlockKernel<T>) -> Vec<(i64, usize)> {
    let m = k.m() as i64;
    ((1 - m)..m).flat_map(|r| (0..k.grid_len(r)).map(move |x| (r, x))).collect()
}

impl<T: Scalar> BlockKernel<T> {
    /// det(I + g K) on L²(Λ, μ); only sites with g ≠ 0 matter.
    pub fn gap(&self, g: &dyn Fn(i64, usize) -> T) -> T {
        let sites: Vec<(i64, usize)> = flat_sites(self).into_iter().filter(|&(r, x)| !g(r, x).is_zero()).collect();
        let mat = Matrix::from_fn(sites.len(), sites.len(), |a, b| {
            let (r, x) = sites[a];
            let (s, y) = sites[b];
            let v = g(r, x) * self.eval(r, x, s, y) * self.weights(s)[y].clone();
            if a == b {
                T::one() + v
            } else {
                v
            }
        });
        mat.det()
    }
}

/// det(I + g K) = E[∏ (1 + g(r, x))] over particles at interior times.
pub fn gap_probability<T: Scalar>(sys: &TransitionSystem<T>, g: &dyn Fn(i64, usize) -> T) -> Result<T, Error> {
    Ok(correlation_kernel(sys)?.gap(g))
}

/// ψ(u,t; v,s) = g(u,t) φ_{u,v}(t,s) as a matrix on L²(Λ) with the measure
/// absorbed on the right, so operator composition is matrix product.
pub struct CausalKernel {
    pub matrix: Matrix<Complex64>,
    pub m: usize,
}

impl CausalKernel {
    pub fn new<T: Scalar>(k: &BlockKernel<T>, g: &dyn Fn(i64, usize) -> Complex64) -> Self {
        let sites = flat_sites(k);
        let matrix = Matrix::from_fn(sites.len(), sites.len(), |a, b| {
            let (r, x) = sites[a];
            let (s, y) = sites[b];
            g(r, x) * k.phi(r, x, s, y).to_complex() * k.weights(s)[y].to_complex()
        });
        Self { matrix, m: k.m() }
    }

    pub fn power(&self, l: usize) -> Matrix<Complex64> {
        let mut p = Matrix::identity(self.matrix.rows());
        for _ in 0..l {
            p = p.matmul(&self.matrix);
        }
        p
    }
}

/// Both sides of det(I + w Σ_{j=1}^{m} z^j ψ^{∗(j−1)} ∗ a) = det(I − zψ + zwa),
/// a = g K̃, m = 2M − 1.
pub fn product_rule_check<T: Scalar>(
    sys: &TransitionSystem<T>,
    g: &dyn Fn(i64, usize) -> Complex64,
    z: Complex64,
    w: Complex64,
) -> Result<(Complex64, Complex64), Error> {
    let k = correlation_kernel(sys)?;
    let sites = flat_sites(&k);
    let psi = CausalKernel::new(&k, g);
    let a = Matrix::from_fn(sites.len(), sites.len(), |p, q| {
        let (r, x) = sites[p];
        let (s, y) = sites[q];
        g(r, x) * k.tilde(r, x, s, y).to_complex() * k.weights(s)[y].to_complex()
    });
    let size = sites.len();
    let id = Matrix::<Complex64>::identity(size);
    let m = 2 * sys.m() - 1;
    let mut series = Matrix::zeros(size, size);
    let mut psi_pow = Matrix::identity(size);
    let mut zj = z;
    for _ in 1..=m {
        series = series.add(&psi_pow.matmul(&a).scale(&zj));
        psi_pow = psi_pow.matmul(&psi.matrix);
        zj *= z;
    }
    let lhs = id.add(&series.scale(&w)).det();
    let rhs = id.sub(&psi.matrix.scale(&z)).add(&a.scale(&(z * w))).det();
    Ok((lhs, rhs))
}

/// Heine identity: (1/n!) Σ_x det(φ_i(x_j)) det(ψ_i(x_j)) μ(x) versus
/// det(Σ_x φ_i(x) ψ_j(x) μ(x)). Rows of `phi`, `psi` are the functions.
pub fn heine_sides<T: Scalar>(phi: &Matrix<T>, psi: &Matrix<T>, weights: &[T]) -> Result<(T, T), Error> {
    let n = phi.rows();
    if psi.rows() != n || phi.cols() != weights.len() || psi.cols() != weights.len() {
        return Err(Error::Shape("Heine identity needs n functions on a common grid".into()));
    }
    let all_rows: Vec<usize> = (0..n).collect();
    let mut lhs = T::zero();
    for_each_subset(weights.len(), n, &mut |s| {
        let mu = s.iter().fold(T::one(), |acc, &i| acc * weights[i].clone());
        lhs = lhs.clone() + phi.submatrix(&all_rows, s).det() * psi.submatrix(&all_rows, s).det() * mu;
    });
    let rhs = phi.scale_cols(weights).matmul(&psi.transpose()).det();
    Ok((lhs, rhs))
}
