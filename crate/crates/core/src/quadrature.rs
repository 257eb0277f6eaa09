//! Gauss–Legendre rules and the periodic trapezoid rule on circles.

use crate::Error;
use num_complex::Complex64;
use num_traits::{Float, FromPrimitive};
use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre<T: Float + FromPrimitive>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let c = |x: f64| T::from_f64(x).unwrap();
    let nf = c(n as f64);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    for i in 0..(n + 1) / 2 {
        let mut x = c((PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos());
        let mut dp = T::one();
        for _ in 0..100 {
            // Legendre recurrence for P_n and P_{n-1}.
            let (mut p0, mut p1) = (T::one(), x);
            for k in 2..=n {
                let kf = c(k as f64);
                let p2 = ((c(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - T::one());
            let dx = p1 / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * c(4.0) {
                break;
            }
        }
        let w = c(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to [a, b].
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        let (x, w) = gauss_legendre::<f64>(n);
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        Self { nodes: x.iter().map(|t| m + h * t).collect(), weights: w.iter().map(|t| h * t).collect() }
    }

    /// Panels of width at most `panel` covering [a, b], `n` nodes each.
    pub fn composite(n: usize, a: f64, b: f64, panel: f64) -> Self {
        let k = (((b - a) / panel).ceil() as usize).max(1);
        let h = (b - a) / k as f64;
        let mut nodes = Vec::with_capacity(k * n);
        let mut weights = Vec::with_capacity(k * n);
        for p in 0..k {
            let r = Self::new(n, a + p as f64 * h, a + (p + 1) as f64 * h);
            nodes.extend(r.nodes);
            weights.extend(r.weights);
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Result of an adaptive trapezoid integration.
#[derive(Clone, Copy, Debug)]
pub struct Trapezoid {
    pub value: Complex64,
    pub nodes: usize,
    pub change: f64,
}

/// Mean of `f` over `L` equispaced angles θ_k = 2πk/L (the trapezoid rule for
/// (1/2π)∫f(θ)dθ), doubling L from `start` until successive values differ by
/// less than `rtol` relative (absolute below `atol`).
pub fn periodic_mean(
    f: impl Fn(f64) -> Complex64,
    start: usize,
    max_nodes: usize,
    rtol: f64,
    atol: f64,
) -> Result<Trapezoid, Error> {
    assert!(start >= 2);
    let mut l = start;
    let mut sum: Complex64 = (0..l).map(|k| f(2.0 * PI * k as f64 / l as f64)).sum();
    let mut prev = sum / l as f64;
    loop {
        if 2 * l > max_nodes {
            return Err(Error::Quadrature(format!("trapezoid rule not converged at {l} nodes")));
        }
        // Doubling reuses old nodes; only the odd-indexed new ones are evaluated.
        let odd: Complex64 = (0..l).map(|k| f(2.0 * PI * (2 * k + 1) as f64 / (2 * l) as f64)).sum();
        sum += odd;
        l *= 2;
        let cur = sum / l as f64;
        let change = (cur - prev).norm();
        if change <= rtol * cur.norm() || change <= atol {
            return Ok(Trapezoid { value: cur, nodes: l, change });
        }
        prev = cur;
    }
}
