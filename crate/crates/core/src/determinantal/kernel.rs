use super::{TransitionSystem, MAX_CONDITION};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::Error;

/// K(r,x;s,y) = Σ_ij φ_{r,M}(x, x_i^M) (A⁻¹)_ij φ_{−M,s}(x_j^{−M}, y) − φ_{r,s}(x,y)
/// over interior times; φ_{r,s} ≡ 0 for r ≥ s.
#[derive(Clone, Debug)]
pub struct BlockKernel<T> {
    m: usize,
    // left[r] = φ_{r,M}(·, x^M) A⁻¹, |grid_r| × n.
    left: Vec<Matrix<T>>,
    // right[s] = φ_{−M,s}(x^{−M}, ·), n × |grid_s|.
    right: Vec<Matrix<T>>,
    // phis[r][s] = φ_{r,s} for r < s (interior indices).
    phis: Vec<Vec<Option<Matrix<T>>>>,
    weights: Vec<Vec<T>>,
    pub condition: f64,
}

pub fn correlation_kernel<T: Scalar>(sys: &TransitionSystem<T>) -> Result<BlockKernel<T>, Error> {
    let m = sys.m() as i64;
    let (a_inv, condition) = sys.gram_matrix().inverse_checked(MAX_CONDITION)?;
    let times: Vec<i64> = sys.interior_times().collect();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &r in &times {
        let to_end = sys.phi(r, m);
        let cols: Vec<usize> = sys.end().to_vec();
        let rows: Vec<usize> = (0..to_end.rows()).collect();
        left.push(to_end.submatrix(&rows, &cols).matmul(&a_inv));
        let from_start = sys.phi(-m, r);
        let cols: Vec<usize> = (0..from_start.cols()).collect();
        right.push(from_start.submatrix(sys.start(), &cols));
    }
    let k = times.len();
    let mut phis = vec![vec![None; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            phis[a][b] = Some(sys.phi(times[a], times[b]));
        }
    }
    let weights = times.iter().map(|&r| sys.grid(r).weights().to_vec()).collect();
    Ok(BlockKernel { m: sys.m(), left, right, phis, weights, condition })
}

impl<T: Scalar> BlockKernel<T> {
    fn slot(&self, r: i64) -> usize {
        let k = r + self.m as i64 - 1;
        assert!(k >= 0 && (k as usize) < self.left.len(), "time {r} is not interior");
        k as usize
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Grid size at interior time r.
    pub fn grid_len(&self, r: i64) -> usize {
        self.left[self.slot(r)].rows()
    }

    pub fn weights(&self, r: i64) -> &[T] {
        &self.weights[self.slot(r)]
    }

    /// The A⁻¹ part K̃ (grid indices x, y).
    pub fn tilde(&self, r: i64, x: usize, s: i64, y: usize) -> T {
        let (l, rt) = (&self.left[self.slot(r)], &self.right[self.slot(s)]);
        (0..l.cols()).fold(T::zero(), |acc, i| acc + l[(x, i)].clone() * rt[(i, y)].clone())
    }

    /// φ_{r,s}(x, y), zero unless r < s.
    pub fn phi(&self, r: i64, x: usize, s: i64, y: usize) -> T {
        match &self.phis[self.slot(r)][self.slot(s)] {
            Some(p) => p[(x, y)].clone(),
            None => T::zero(),
        }
    }

    pub fn eval(&self, r: i64, x: usize, s: i64, y: usize) -> T {
        self.tilde(r, x, s, y) - self.phi(r, x, s, y)
    }

    /// Full block K(r,·; s,·).
    pub fn block(&self, r: i64, s: i64) -> Matrix<T> {
        let mut k = self.left[self.slot(r)].matmul(&self.right[self.slot(s)]);
        if let Some(p) = &self.phis[self.slot(r)][self.slot(s)] {
            k = k.sub(p);
        }
        k
    }

    /// K̃ block only.
    pub fn tilde_block(&self, r: i64, s: i64) -> Matrix<T> {
        self.left[self.slot(r)].matmul(&self.right[self.slot(s)])
    }

    /// φ block (zero for r ≥ s).
    pub fn phi_block(&self, r: i64, s: i64) -> Matrix<T> {
        match &self.phis[self.slot(r)][self.slot(s)] {
            Some(p) => p.clone(),
            None => Matrix::zeros(self.grid_len(r), self.grid_len(s)),
        }
    }

    /// det(K(p_a; p_b)) for sites p = (time, grid index): the correlation
    /// density with respect to the product reference measure.
    pub fn correlation(&self, sites: &[(i64, usize)]) -> T {
        Matrix::from_fn(sites.len(), sites.len(), |a, b| {
            self.eval(sites[a].0, sites[a].1, sites[b].0, sites[b].1)
        })
        .det()
    }

    /// CSV rows "r,x,s,y,re,im" over all interior time pairs (grid indices).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,x,s,y,re,im\n");
        let lo = 1 - self.m as i64;
        let hi = self.m as i64 - 1;
        for r in lo..=hi {
            for s in lo..=hi {
                let b = self.block(r, s);
                for x in 0..b.rows() {
                    for y in 0..b.cols() {
                        let v = b[(x, y)].to_complex();
                        out.push_str(&format!("{r},{x},{s},{y},{},{}\n", v.re, v.im));
                    }
                }
            }
        }
        out
    }
}
