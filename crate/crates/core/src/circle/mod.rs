//! Nonintersecting Bernoulli walks on the discrete circle Z_N: the finite-N
//! kernel of the infinite cylinder, its N → ∞ limit, and exact enumeration
//! of the periodic-time (torus) model.
//!
//! Step kernel: φ_{r,r+1}(x, y) = p if y − x ≡ 1, q if y ≡ x (mod N). With
//! z = e^{2πi/N} and f(ℓ) = q + p z^ℓ, the Fourier multiplier of one step is
//! f: φ_{r,s}(x, y) = (1/N) Σ_ℓ f(ℓ)^{s−r} z^{−ℓ(y−x)}.

mod torus;

pub use torus::{
    component_kernel, component_system, label_weight, torus_enumeration, torus_mixture_correlation,
};

use crate::linalg::Matrix;
use crate::quadrature::GaussRule;
use crate::Error;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleWalkParams {
    pub n_sites: usize,
    /// Particle count, 2ν + 1.
    pub n: usize,
    pub p_step: f64,
    pub q_step: f64,
    /// Time half-width of the periodic model.
    pub m: usize,
}

impl CircleWalkParams {
    pub fn new(n_sites: usize, n: usize, p_step: f64, m: usize) -> Result<Self, Error> {
        let p = Self { n_sites, n, p_step, q_step: 1.0 - p_step, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n % 2 == 0 || self.n >= self.n_sites {
            return Err(Error::InvalidParams(format!(
                "need an odd particle count below N, got n = {} with N = {}",
                self.n, self.n_sites
            )));
        }
        if !(self.p_step > 0.0 && self.p_step < 1.0) || (self.p_step + self.q_step - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams("step probabilities must be in (0,1) and sum to 1".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidParams("M must be at least 1".into()));
        }
        if self.is_degenerate() {
            return Err(Error::InvalidParams("p = q needs an odd number of sites".into()));
        }
        Ok(())
    }

    /// p = q with N even: f vanishes at ℓ = N/2.
    pub fn is_degenerate(&self) -> bool {
        self.p_step == self.q_step && self.n_sites % 2 == 0
    }

    pub fn nu(&self) -> i64 {
        (self.n as i64 - 1) / 2
    }

    /// z^k = e^{2πik/N}.
    pub fn root(&self, k: i64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * k.rem_euclid(self.n_sites as i64) as f64 / self.n_sites as f64)
    }

    /// f(ℓ) = q + p z^ℓ.
    pub fn multiplier(&self, l: i64) -> Complex64 {
        self.q_step + self.p_step * self.root(l)
    }

    /// Densely packed top labels α = {0, …, ν, N−ν, …, N−1}.
    pub fn alpha(&self) -> Vec<usize> {
        let (n, nu) = (self.n_sites, self.nu() as usize);
        let mut a: Vec<usize> = (0..=nu).chain(n - nu..n).collect();
        a.sort_unstable();
        a
    }

    /// φ_{r,s}(x, y) for r < s.
    pub fn phi(&self, r: i64, x: i64, s: i64, y: i64) -> Complex64 {
        assert!(r < s);
        let n = self.n_sites as i64;
        (0..n).map(|l| self.multiplier(l).powi((s - r) as i32) * self.root(-l * (y - x))).sum::<Complex64>()
            / n as f64
    }
}

/// Correlation kernel of the cylinder walks:
/// (1/N) Σ_{j=−ν}^{ν} f(j)^{s−r} z^{j(x−y)} − [r<s] (1/N) Σ_{j=−ν}^{N−ν−1} f(j)^{s−r} z^{j(x−y)}.
pub fn cylinder_kernel(params: &CircleWalkParams, r: i64, x: i64, s: i64, y: i64) -> Complex64 {
    let nu = params.nu();
    let n = params.n_sites as i64;
    let term = |j: i64| params.multiplier(j).powi((s - r) as i32) * params.root(j * (x - y));
    let first: Complex64 = (-nu..=nu).map(term).sum();
    let second: Complex64 = if r < s { (-nu..n - nu).map(term).sum() } else { Complex64::new(0.0, 0.0) };
    (first - second) / n as f64
}

/// One-time kernel matrix K(r, x_μ; r, x_ν).
pub fn one_time_matrix(params: &CircleWalkParams, r: i64, xs: &[i64]) -> Matrix<Complex64> {
    Matrix::from_fn(xs.len(), xs.len(), |i, j| cylinder_kernel(params, r, xs[i], r, xs[j]))
}

/// N → ∞ limit at density ρ:
/// ∫_{−ρ/2}^{ρ/2} g dθ for r ≥ s and −∫_{ρ/2}^{1−ρ/2} g dθ for r < s, with
/// g(θ) = (q + p e^{2πiθ})^{s−r} e^{2πiθ(x−y)}.
pub fn limit_kernel(rho: f64, p_step: f64, r: i64, x: i64, s: i64, y: i64) -> Result<Complex64, Error> {
    if !(rho > 0.0 && rho < 1.0) || !(p_step > 0.0 && p_step < 1.0) {
        return Err(Error::InvalidParams(format!("need 0 < ρ, p < 1, got ρ = {rho}, p = {p_step}")));
    }
    let q = 1.0 - p_step;
    let (k, d) = (s - r, x - y);
    let (a, b, sign) = if r >= s { (-rho / 2.0, rho / 2.0, 1.0) } else { (rho / 2.0, 1.0 - rho / 2.0, -1.0) };
    let value = if k >= 0 {
        // Binomial expansion: exact.
        let mut acc = Complex64::new(0.0, 0.0);
        let mut c = 1.0;
        for j in 0..=k {
            if j > 0 {
                c *= (k - j + 1) as f64 / j as f64;
            }
            let w = c * q.powi((k - j) as i32) * p_step.powi(j as i32);
            acc += w * exp_integral((j + d) as f64, a, b);
        }
        acc
    } else {
        let panels = 64 + 4 * (k.unsigned_abs() + d.unsigned_abs()) as usize;
        let rule = GaussRule::composite(16, a, b, (b - a) / panels as f64);
        let g = |t: f64| {
            let e = Complex64::from_polar(1.0, 2.0 * PI * t);
            (q + p_step * e).powi(k as i32) * Complex64::from_polar(1.0, 2.0 * PI * t * d as f64)
        };
        Complex64::new(rule.integrate(|t| g(t).re), rule.integrate(|t| g(t).im))
    };
    Ok(sign * value)
}

/// ∫_a^b e^{2πimθ} dθ.
fn exp_integral(m: f64, a: f64, b: f64) -> Complex64 {
    if m == 0.0 {
        return Complex64::new(b - a, 0.0);
    }
    let w = 2.0 * PI * m;
    (Complex64::from_polar(1.0, w * b) - Complex64::from_polar(1.0, w * a)) / Complex64::new(0.0, w)
}

/// Discrete sine kernel sin(πρd)/(πd), ρ on the diagonal.
pub fn sine_kernel(rho: f64, d: i64) -> f64 {
    if d == 0 {
        rho
    } else {
        (PI * rho * d as f64).sin() / (PI * d as f64)
    }
}

/// (1/N^n) ∏_{μ<ν} |z^{x_μ} − z^{x_ν}|².
pub fn cue_weight(params: &CircleWalkParams, xs: &[i64]) -> f64 {
    let mut w = (params.n_sites as f64).powi(-(xs.len() as i32));
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            w *= (params.root(xs[i]) - params.root(xs[j])).norm_sqr();
        }
    }
    w
}

#[derive(Clone, Debug, Serialize)]
pub struct CueCheck {
    pub n_sites: usize,
    pub n: usize,
    /// max over n-subsets of |det K − CUE weight|.
    pub residual: f64,
    /// Σ over n-subsets of det K (should be 1).
    pub total: f64,
    pub max_imag: f64,
}

/// Compares the one-time n-point determinant with the discrete-CUE weight over
/// every n-subset of Z_N.
pub fn cue_check(params: &CircleWalkParams) -> Result<CueCheck, Error> {
    params.validate()?;
    let count = crate::determinantal::binomial_count(params.n_sites, params.n);
    if count > crate::determinantal::ENUMERATION_LIMIT {
        return Err(Error::SizeGuard { count, limit: crate::determinantal::ENUMERATION_LIMIT });
    }
    let (mut residual, mut total, mut max_imag) = (0.0f64, 0.0, 0.0f64);
    for subset in crate::determinantal::subsets(params.n_sites, params.n) {
        let xs: Vec<i64> = subset.iter().map(|&x| x as i64).collect();
        let det = one_time_matrix(params, 0, &xs).det();
        residual = residual.max((det.re - cue_weight(params, &xs)).abs());
        max_imag = max_imag.max(det.im.abs());
        total += det.re;
    }
    Ok(CueCheck { n_sites: params.n_sites, n: params.n, residual, total, max_imag })
}

#[derive(Clone, Debug, Serialize)]
pub struct TopLabelReport {
    pub ms: Vec<usize>,
    /// |Z(α)| / Σ_k |Z(k)| for each M.
    pub alpha_ratio: Vec<f64>,
    /// max_{k≠α} |Z(k)| / Σ |Z| for each M.
    pub max_other: Vec<f64>,
    /// max_{k≠α} |Z(k)/Z(α)|: decreasing in M when α is the unique maximiser.
    pub max_relative: Vec<f64>,
    /// Signed Z(α)/Σ_k Z(k): tends to 1 but not monotonically, since the
    /// other components carry complex weights.
    pub alpha_signed: Vec<f64>,
    /// p = q with N even; nothing is evaluated.
    pub degenerate: bool,
}

impl TopLabelReport {
    pub fn passed(&self) -> bool {
        !self.degenerate
            && self.alpha_ratio.windows(2).all(|w| w[1] >= w[0] - 1e-15)
            && self.max_relative.windows(2).all(|w| w[1] < w[0])
            && self.max_relative.iter().all(|&r| r < 1.0)
            && self.alpha_ratio.iter().all(|&a| a <= 1.0 + 1e-12)
    }
}

/// Z(k)/Σ Z over ordered label sets k, using Z(k) = N^n ∏_j f(−k_j)^{2M−2},
/// at each M in `ms`.
pub fn top_label_selection_check(params: &CircleWalkParams, ms: &[usize]) -> Result<TopLabelReport, Error> {
    if params.is_degenerate() {
        return Ok(TopLabelReport {
            ms: ms.to_vec(),
            alpha_ratio: vec![],
            max_other: vec![],
            max_relative: vec![],
            alpha_signed: vec![],
            degenerate: true,
        });
    }
    params.validate()?;
    let alpha = params.alpha();
    let labels = crate::determinantal::subsets(params.n_sites, params.n);
    let mut alpha_ratio = Vec::new();
    let mut max_other = Vec::new();
    let mut alpha_signed = Vec::new();
    let mut max_relative = Vec::new();
    for &m in ms {
        let p = CircleWalkParams { m, ..params.clone() };
        // Relative to Z(α) to stay in range at large M.
        let za = label_weight(&p, &alpha);
        let rel: Vec<Complex64> = labels.iter().map(|k| label_weight(&p, k) / za).collect();
        let total: Complex64 = rel.iter().sum();
        let abs_total: f64 = rel.iter().map(|z| z.norm()).sum();
        alpha_signed.push((Complex64::new(1.0, 0.0) / total).re);
        alpha_ratio.push(1.0 / abs_total);
        let other = labels
            .iter()
            .zip(&rel)
            .filter(|(k, _)| **k != alpha)
            .map(|(_, z)| z.norm() / abs_total)
            .fold(0.0, f64::max);
        max_other.push(other);
        max_relative.push(other * abs_total);
    }
    Ok(TopLabelReport { ms: ms.to_vec(), alpha_ratio, max_other, max_relative, alpha_signed, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> CircleWalkParams {
        CircleWalkParams::new(7, 3, 0.3, 2).unwrap()
    }

    #[test]
    fn density_on_the_diagonal() {
        let p = params();
        for x in 0..7 {
            let k = cylinder_kernel(&p, 2, x, 2, x);
            assert!((k.re - 3.0 / 7.0).abs() < 1e-14 && k.im.abs() < 1e-14);
        }
    }

    #[test]
    fn hermitian_and_translation_invariant() {
        let p = params();
        for x in 0..7 {
            for y in 0..7 {
                let a = cylinder_kernel(&p, 1, x, 1, y);
                assert!((a - cylinder_kernel(&p, 1, y, 1, x).conj()).norm() < 1e-14);
                for (r, s) in [(0, 2), (3, 1), (0, 0)] {
                    let b = cylinder_kernel(&p, r, x, s, y);
                    let c = cylinder_kernel(&p, r, (x + 3) % 7, s, (y + 3) % 7);
                    assert!((b - c).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn sine_kernel_limit_at_equal_times() {
        for d in -4..=4 {
            let k = limit_kernel(0.4, 0.3, 1, d, 1, 0).unwrap();
            assert!((k.re - sine_kernel(0.4, d)).abs() < 1e-14 && k.im.abs() < 1e-14);
        }
    }

    #[test]
    fn limit_quadrature_branch_matches_series() {
        // For r > s the integrand has a negative power; check against the
        // geometric series (q + p e)^{-1} = Σ (−p/q)^m e^m / q for p < q.
        let (p, q, rho) = (0.3, 0.7, 0.45);
        let k = limit_kernel(rho, p, 1, 2, 0, 0).unwrap();
        let mut series = Complex64::new(0.0, 0.0);
        for m in 0..200 {
            series += (-p / q).powi(m) / q * exp_integral((m + 2) as f64, -rho / 2.0, rho / 2.0);
        }
        assert!((k - series).norm() < 1e-12);
    }

    #[test]
    fn cue_identity() {
        let c = cue_check(&CircleWalkParams::new(5, 3, 0.3, 2).unwrap()).unwrap();
        assert!(c.residual < 1e-12, "{c:?}");
        assert!((c.total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn top_label_dominates() {
        let r = top_label_selection_check(&params(), &[2, 4, 8, 32]).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.alpha_ratio[3] > 0.99 && r.max_other[3] < 1e-3, "{r:?}");
        assert!((r.alpha_signed[3] - 1.0).abs() < 1e-2, "{r:?}");
        let d = CircleWalkParams { n_sites: 6, n: 3, p_step: 0.5, q_step: 0.5, m: 2 };
        assert!(top_label_selection_check(&d, &[2]).unwrap().degenerate);
        assert!(CircleWalkParams::new(6, 3, 0.5, 2).is_err());
    }
}
