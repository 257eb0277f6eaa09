use crate::Error;
use serde::{Deserialize, Serialize};

/// Parameters of the geometric weights: P[w(i,j) = m] = (1 − a_i b_j)(a_i b_j)^m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GeomParams {
    /// a_i = b_j = α = √q for all indices.
    Homogeneous { q: f64 },
    /// Finite sequences; `a[0]` is a_1.
    Inhomogeneous { a: Vec<f64>, b: Vec<f64> },
}

impl GeomParams {
    pub fn homogeneous(q: f64) -> Result<Self, Error> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::InvalidParams(format!("q = {q} must lie in [0, 1)")));
        }
        Ok(Self::Homogeneous { q })
    }

    pub fn inhomogeneous(a: Vec<f64>, b: Vec<f64>) -> Result<Self, Error> {
        for (name, v) in [("a", &a), ("b", &b)] {
            if let Some(x) = v.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                return Err(Error::InvalidParams(format!("{name} entry {x} outside (0, 1)")));
            }
        }
        Ok(Self::Inhomogeneous { a, b })
    }

    /// a_i, 1-based.
    pub fn a(&self, i: usize) -> f64 {
        match self {
            Self::Homogeneous { q } => q.sqrt(),
            Self::Inhomogeneous { a, .. } => a[i - 1],
        }
    }

    /// b_j, 1-based.
    pub fn b(&self, j: usize) -> f64 {
        match self {
            Self::Homogeneous { q } => q.sqrt(),
            Self::Inhomogeneous { b, .. } => b[j - 1],
        }
    }

    /// Checks that a_i and b_j exist for i ≤ rows, j ≤ cols and that a_i b_j < 1.
    pub fn check_covers(&self, rows: usize, cols: usize) -> Result<(), Error> {
        match self {
            Self::Homogeneous { q } if (0.0..1.0).contains(q) => Ok(()),
            Self::Homogeneous { q } => Err(Error::InvalidParams(format!("q = {q} outside [0, 1)"))),
            Self::Inhomogeneous { a, b } => {
                if a.len() < rows || b.len() < cols {
                    return Err(Error::InvalidParams(format!(
                        "need {rows} a-values and {cols} b-values, have {} and {}",
                        a.len(),
                        b.len()
                    )));
                }
                for i in 1..=rows {
                    for j in 1..=cols {
                        if !(self.a(i) * self.b(j) < 1.0) {
                            return Err(Error::InvalidParams(format!("a_{i} b_{j} >= 1")));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// Centering and scale constants of the homogeneous model, α = √q.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstants {
    pub q: f64,
    pub alpha: f64,
    /// Law-of-large-numbers slope: G(N,N) ≈ a N.
    pub a: f64,
    /// Fluctuation scale: G(N,N) ≈ aN + d N^{1/3} ξ.
    pub d: f64,
    pub d_prime: f64,
    /// Transversal scale: lattice offset u ↔ time u / (c N^{2/3}).
    pub c: f64,
}

impl ScalingConstants {
    pub fn new(q: f64) -> Result<Self, Error> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParams(format!("scaling needs 0 < q < 1, got {q}")));
        }
        let alpha = q.sqrt();
        let a = 2.0 * alpha / (1.0 - alpha);
        let d = (alpha * (1.0 + alpha)).cbrt() / (1.0 - alpha);
        let d_prime = (1.0 - alpha) / (1.0 + alpha) * d;
        let c = (1.0 + alpha) / ((1.0 - alpha) * d);
        Ok(Self { q, alpha, a, d, d_prime, c })
    }

    /// (G − aN)/(d N^{1/3}).
    pub fn rescale(&self, g: f64, n: usize) -> f64 {
        let nf = n as f64;
        (g - self.a * nf) / (self.d * nf.cbrt())
    }

    /// Inverse of [`Self::rescale`].
    pub fn unscale(&self, xi: f64, n: usize) -> f64 {
        let nf = n as f64;
        self.a * nf + self.d * nf.cbrt() * xi
    }

    /// c N^{2/3}: lattice offsets per unit of rescaled time.
    pub fn time_scale(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(2.0 / 3.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_constants() {
        let s = ScalingConstants::new(0.25).unwrap();
        assert!((s.a - 2.0).abs() < 1e-15);
        assert!((s.d - 0.75f64.cbrt() / 0.5).abs() < 1e-14);
        assert!(s.d_prime > 0.0 && s.c > 0.0);
    }

    #[test]
    fn rejects_bad_products() {
        assert!(GeomParams::homogeneous(1.0).is_err());
        assert!(GeomParams::inhomogeneous(vec![0.5, 1.0], vec![0.5]).is_err());
        let p = GeomParams::inhomogeneous(vec![0.5], vec![0.5]).unwrap();
        assert!(p.check_covers(2, 1).is_err());
        assert!(p.check_covers(1, 1).is_ok());
    }
}
