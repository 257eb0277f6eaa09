use super::TransitionSystem;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::Error;

/// Hard cap on the number of configurations an enumeration may visit.
pub const ENUMERATION_LIMIT: f64 = 1e7;

fn combinations(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=len.saturating_sub(k - cur.len()) {
            if i >= len {
                break;
            }
            cur.push(i);
            rec(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    rec(0, len, k, &mut cur, &mut out);
    out
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Literal summation of the product-of-determinants weight over every
/// interior configuration.
///
/// A configuration is one n-subset of the grid per interior time. Summing
/// over subsets equals the ordered sum of the definition divided by the
/// (n!)^{2M−1} symmetry factor, since the weight is symmetric in each time's
/// points and vanishes on coincident ones.
pub struct Enumerator<T> {
    subsets: Vec<Vec<Vec<usize>>>,
    first: Vec<T>,
    trans: Vec<Matrix<T>>,
    last: Vec<T>,
    mu: Vec<Vec<T>>,
    lo: i64,
}

impl<T: Scalar> Enumerator<T> {
    pub fn new(sys: &TransitionSystem<T>) -> Result<Self, Error> {
        let n = sys.n();
        let times: Vec<i64> = sys.interior_times().collect();
        let count: f64 = times.iter().map(|&t| binomial(sys.grid(t).len(), n)).product();
        if count > ENUMERATION_LIMIT {
            return Err(Error::SizeGuard { count, limit: ENUMERATION_LIMIT });
        }
        let subsets: Vec<Vec<Vec<usize>>> = times.iter().map(|&t| combinations(sys.grid(t).len(), n)).collect();
        let m = sys.m() as i64;
        let first_step = sys.step(-m);
        let first = subsets[0].iter().map(|b| first_step.submatrix(sys.start(), b).det()).collect();
        let last_step = sys.step(m - 1);
        let last = subsets[times.len() - 1].iter().map(|a| last_step.submatrix(a, sys.end()).det()).collect();
        let mut trans = Vec::new();
        for (k, &t) in times.iter().enumerate().take(times.len() - 1) {
            let step = sys.step(t);
            let (sa, sb) = (&subsets[k], &subsets[k + 1]);
            trans.push(Matrix::from_fn(sa.len(), sb.len(), |i, j| step.submatrix(&sa[i], &sb[j]).det()));
        }
        let mu = times
            .iter()
            .zip(&subsets)
            .map(|(&t, ss)| {
                let w = sys.grid(t).weights();
                ss.iter().map(|s| s.iter().fold(T::one(), |acc, &i| acc * w[i].clone())).collect()
            })
            .collect();
        Ok(Self { subsets, first, trans, last, mu, lo: times[0] })
    }

    /// Σ over configurations of weight × ∏_t f(t, X^t).
    pub fn weighted_sum(&self, f: &dyn Fn(i64, &[usize]) -> T) -> T {
        let factors: Vec<Vec<T>> = self
            .subsets
            .iter()
            .enumerate()
            .map(|(k, ss)| {
                ss.iter().zip(&self.mu[k]).map(|(s, mu)| f(self.lo + k as i64, s) * mu.clone()).collect()
            })
            .collect();
        let mut total = T::zero();
        for a in 0..self.subsets[0].len() {
            let w = self.first[a].clone() * factors[0][a].clone();
            if !w.is_zero() {
                total = total + self.descend(0, a, w, &factors);
            }
        }
        total
    }

    fn descend(&self, k: usize, a: usize, acc: T, factors: &[Vec<T>]) -> T {
        if k + 1 == self.subsets.len() {
            return acc * self.last[a].clone();
        }
        let mut total = T::zero();
        for b in 0..self.subsets[k + 1].len() {
            let w = acc.clone() * self.trans[k][(a, b)].clone() * factors[k + 1][b].clone();
            if !w.is_zero() {
                total = total + self.descend(k + 1, b, w, factors);
            }
        }
        total
    }

    /// Normalization Z_{n,M}.
    pub fn partition_function(&self) -> T {
        self.weighted_sum(&|_, _| T::one())
    }
}

/// E[∏_t f(t, X^t)] under the normalized measure.
pub fn brute_force_expectation<T: Scalar>(
    sys: &TransitionSystem<T>,
    f: &dyn Fn(i64, &[usize]) -> T,
) -> Result<T, Error> {
    let e = Enumerator::new(sys)?;
    Ok(e.weighted_sum(f) / e.partition_function())
}

/// Correlation density at the sites (time, grid index): the probability that
/// all sites are occupied, divided by their reference weights.
pub fn brute_force_correlation<T: Scalar>(sys: &TransitionSystem<T>, sites: &[(i64, usize)]) -> Result<T, Error> {
    for &(t, x) in sites {
        if !sys.interior_times().contains(&t) || x >= sys.grid(t).len() {
            return Err(Error::OutOfRange(format!("site ({t}, {x}) not in the interior grid")));
        }
    }
    let owned: Vec<(i64, usize)> = sites.to_vec();
    let f = move |t: i64, s: &[usize]| {
        if owned.iter().all(|&(u, x)| u != t || s.binary_search(&x).is_ok()) {
            T::one()
        } else {
            T::zero()
        }
    };
    let p = brute_force_expectation(sys, &f)?;
    let mu = sites.iter().fold(T::one(), |acc, &(t, x)| acc * sys.grid(t).weights()[x].clone());
    Ok(p / mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(binomial(8, 3), 56.0);
    }
}

/// All k-subsets of 0..len in lexicographic order.
pub fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    combinations(len, k)
}

/// C(n, k) as a float.
pub fn binomial_count(n: usize, k: usize) -> f64 {
    binomial(n, k)
}
