//! Dense row-major matrices and pivoted LU over any [`Scalar`].

use crate::scalar::Scalar;
use crate::Error;
use std::ops::{Index, IndexMut};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d = d.clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    /// Multiply column j by `w[j]` (right-multiplication by a diagonal).
    pub fn scale_cols(&self, w: &[T]) -> Self {
        assert_eq!(w.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * w[j].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Max absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].magnitude()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Result<Lu<T>, Error> {
        Lu::new(self.clone())
    }

    /// Determinant via pivoted elimination; a singular matrix gives zero.
    pub fn det(&self) -> T {
        match Lu::new(self.clone()) {
            Ok(lu) => lu.det(),
            Err(_) => T::zero(),
        }
    }

    /// Inverse, rejecting inexact systems with 1-norm condition number above `max_cond`.
    pub fn inverse_checked(&self, max_cond: f64) -> Result<(Self, f64), Error> {
        let lu = self.lu()?;
        let inv = lu.inverse();
        let cond = self.norm1() * inv.norm1();
        if !T::EXACT && !(cond <= max_cond) {
            return Err(Error::IllConditioned { cond, limit: max_cond });
        }
        Ok((inv, cond))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting by modulus: PA = LU, unit-diagonal L.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign_flip: bool,
}

impl<T: Scalar> Lu<T> {
    pub fn new(mut a: Matrix<T>) -> Result<Self, Error> {
        if !a.is_square() {
            return Err(Error::Shape(format!("LU of {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_flip = false;
        for k in 0..n {
            // Largest modulus pivot; for exact types any nonzero entry works,
            // but a tiny-magnitude rational may round to 0.0, hence the second test.
            let mut p = k;
            let mut best = -1.0;
            for i in k..n {
                let v = &a[(i, k)];
                if v.is_zero() {
                    continue;
                }
                let m = v.magnitude();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best < 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign_flip = !sign_flip;
            }
            let piv = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = a[(i, k)].clone() / piv.clone();
                for j in k + 1..n {
                    let t = f.clone() * a[(k, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - t;
                }
                a[(i, k)] = f;
            }
        }
        Ok(Self { lu: a, perm, sign_flip })
    }

    pub fn det(&self) -> T {
        let n = self.lu.rows;
        let mut d = T::one();
        for i in 0..n {
            d = d * self.lu[(i, i)].clone();
        }
        if self.sign_flip {
            -d
        } else {
            d
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[(i, j)].clone() * x[j].clone();
                x[i] = x[i].clone() - t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[(i, j)].clone() * x[j].clone();
                x[i] = x[i].clone() - t;
            }
            x[i] = x[i].clone() / self.lu[(i, i)].clone();
        }
        x
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.lu.rows;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i].clone();
            }
            e[j] = T::zero();
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_complex::Complex64;
    use num_rational::BigRational;

    #[test]
    fn det_small() {
        let m = Matrix::from_rows(vec![vec![2.0f64, 1.0], vec![7.0, 4.0]]);
        assert!((m.det() - 1.0).abs() < 1e-14);
        let s = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(s.det(), 0.0);
    }

    #[test]
    fn exact_inverse_roundtrip() {
        let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        let m = Matrix::from_rows(vec![
            vec![q(1, 3), q(2, 1), q(0, 1)],
            vec![q(1, 7), q(0, 1), q(5, 2)],
            vec![q(-1, 1), q(1, 5), q(1, 1)],
        ]);
        let (inv, _) = m.inverse_checked(1e12).unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(3));
    }

    #[test]
    fn complex_solve() {
        let m = Matrix::from_rows(vec![
            vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(3.0, 0.0), Complex64::new(1.0, -1.0)],
        ]);
        let inv = m.lu().unwrap().inverse();
        assert!(m.matmul(&inv).max_abs_diff(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn ill_conditioned_rejected() {
        let m = Matrix::from_rows(vec![vec![1.0f64, 1.0], vec![1.0, 1.0 + 1e-15]]);
        assert!(matches!(m.inverse_checked(1e12), Err(Error::IllConditioned { .. })));
    }
}
