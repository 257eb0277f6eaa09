use super::function::airy_unchecked;
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Truncation and quadrature settings for the λ-integral form.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExtendedAiryKernelSpec {
    /// Smallest truncation Λ; it grows until the tail bound is met.
    pub lambda_min: f64,
    /// Largest Gauss–Legendre panel; panels shrink where Ai oscillates.
    pub panel: f64,
    pub nodes: usize,
    pub tail_tol: f64,
}

impl Default for ExtendedAiryKernelSpec {
    fn default() -> Self {
        Self { lambda_min: 30.0, panel: 0.5, nodes: 16, tail_tol: 1e-12 }
    }
}

impl ExtendedAiryKernelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min >= 30.0 && self.panel > 0.0 && self.nodes >= 4 && self.tail_tol > 0.0) {
            return Err(Error::InvalidParams(format!("bad extended Airy kernel spec {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub lambda: f64,
    pub tail_bound: f64,
}

/// Nodes and weights for ∫_a^b, with panel widths ~ 1/√|x| where the
/// arguments x = ξ + λ sit in the oscillatory region.
pub(crate) fn lambda_rule(a: f64, b: f64, xis: (f64, f64), spec: &ExtendedAiryKernelSpec) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre::<f64>(spec.nodes);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut lo = a;
    while lo < b {
        let reach = |l: f64| (xis.0 + l).abs().max((xis.1 + l).abs()).max(1.0);
        let width = spec.panel.min(1.5 / reach(lo).max(reach((lo + spec.panel).min(b))).sqrt());
        let hi = (lo + width).min(b);
        let (h, m) = (0.5 * (hi - lo), 0.5 * (hi + lo));
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(m + h * x);
            weights.push(h * w);
        }
        lo = hi;
    }
    (nodes, weights)
}

/// Envelope of |Ai(x)| used for truncation bounds.
fn ai_envelope(x: f64) -> f64 {
    if x > 1.0 {
        (-2.0 / 3.0 * x.powf(1.5)).exp() / (2.0 * PI.sqrt() * x.powf(0.25))
    } else {
        1.1 / (PI.sqrt() * x.abs().max(1.0).powf(0.25))
    }
}

/// Λ for ∫_0^Λ e^{−λΔ} Ai(ξ+λ) Ai(ξ′+λ) dλ and a bound on the discarded tail.
/// Past Λ the log of the integrand falls at rate ≥ 1, so the tail is below
/// its value at Λ.
pub(crate) fn positive_cutoff(delta: f64, xi_min: f64, spec: &ExtendedAiryKernelSpec) -> (f64, f64) {
    let mut lam = spec.lambda_min.max(2.0 - xi_min);
    loop {
        let x = xi_min + lam;
        let bound = (-lam * delta).exp() * ai_envelope(x).powi(2);
        if bound < spec.tail_tol && 2.0 * x.sqrt() - delta.abs() >= 1.0 {
            return (lam, bound);
        }
        lam += 2.0;
    }
}

/// Λ for ∫_{−Λ}^0 e^{λD} Ai(ξ+λ) Ai(ξ′+λ) dλ, D > 0, with tail bound
/// (1.21/π)(Λ−ξmax)^{−1/2} e^{−ΛD}/D.
fn negative_cutoff(d: f64, xi_max: f64, spec: &ExtendedAiryKernelSpec) -> Result<(f64, f64)> {
    let bound = |lam: f64| 1.21 / PI * (lam - xi_max).powf(-0.5) * (-lam * d).exp() / d;
    let mut lam = spec.lambda_min.max(xi_max + 1.0);
    while bound(lam) >= spec.tail_tol {
        lam *= 1.25;
        if lam > 1e5 {
            return Err(Error::Quadrature(format!("λ-integral tail not below {:e} for τ′−τ = {d}", spec.tail_tol)));
        }
    }
    Ok((lam, bound(lam)))
}

fn integrate(a: f64, b: f64, delta: f64, xi: f64, xi2: f64, spec: &ExtendedAiryKernelSpec) -> f64 {
    let (nodes, weights) = lambda_rule(a, b, (xi.min(xi2), xi.max(xi2)), spec);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&l, &w)| w * (-l * delta).exp() * airy_unchecked(xi + l).0 * airy_unchecked(xi2 + l).0)
        .sum()
}

/// A(τ,ξ;τ′,ξ′): ∫_0^∞ e^{−λ(τ−τ′)} Ai(ξ+λ)Ai(ξ′+λ) dλ for τ ≥ τ′ and
/// −∫_{−∞}^0 of the same integrand for τ < τ′.
pub fn extended_airy_kernel_detail(tau: f64, xi: f64, tau2: f64, xi2: f64, spec: &ExtendedAiryKernelSpec) -> Result<KernelValue> {
    spec.validate()?;
    let delta = tau - tau2;
    if delta >= 0.0 {
        let (lambda, tail_bound) = positive_cutoff(delta, xi.min(xi2), spec);
        Ok(KernelValue { value: integrate(0.0, lambda, delta, xi, xi2, spec), lambda, tail_bound })
    } else {
        let (lambda, tail_bound) = negative_cutoff(-delta, xi.max(xi2), spec)?;
        Ok(KernelValue { value: -integrate(-lambda, 0.0, delta, xi, xi2, spec), lambda, tail_bound })
    }
}

pub fn extended_airy_kernel(tau: f64, xi: f64, tau2: f64, xi2: f64, spec: &ExtendedAiryKernelSpec) -> Result<f64> {
    Ok(extended_airy_kernel_detail(tau, xi, tau2, xi2, spec)?.value)
}

/// Ã(τ,ξ;τ′,ξ′) = ∫_0^∞ e^{−λ(τ−τ′)} Ai(ξ+λ)Ai(ξ′+λ) dλ for all τ, τ′.
pub fn extended_airy_tilde(tau: f64, xi: f64, tau2: f64, xi2: f64, spec: &ExtendedAiryKernelSpec) -> Result<f64> {
    spec.validate()?;
    let delta = tau - tau2;
    let (lambda, _) = positive_cutoff(delta, xi.min(xi2), spec);
    Ok(integrate(0.0, lambda, delta, xi, xi2, spec))
}

/// φ_{τ,τ′}(ξ,ξ′) = (4πΔ)^{−1/2} exp(−(ξ−ξ′)²/4Δ − Δ(ξ+ξ′)/2 + Δ³/12), Δ = τ′−τ > 0; zero otherwise.
pub fn phi_gaussian(tau: f64, tau2: f64, xi: f64, xi2: f64) -> f64 {
    let d = tau2 - tau;
    if d <= 0.0 {
        return 0.0;
    }
    (4.0 * PI * d).powf(-0.5) * (-(xi - xi2).powi(2) / (4.0 * d) - d * (xi + xi2) / 2.0 + d.powi(3) / 12.0).exp()
}

/// (Ai(x)Ai′(y) − Ai′(x)Ai(y))/(x − y), with the diagonal limit Ai′(x)² − x Ai(x)².
pub fn classic_airy_kernel(x: f64, y: f64) -> f64 {
    let (ax, apx) = airy_unchecked(x);
    if (x - y).abs() < 1e-9 * (1.0 + x.abs()) {
        return apx * apx - x * ax * ax;
    }
    let (ay, apy) = airy_unchecked(y);
    (ax * apy - apx * ay) / (x - y)
}

/// Which kernel the horizontal contours Im z = η, Im w = η′ represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// η + η′ + τ − τ′ > 0.
    Tilde,
    /// η + η′ + τ − τ′ < 0 (requires τ < τ′).
    Kernel,
}

pub fn double_integral_branch(tau: f64, tau2: f64, eta: f64, eta2: f64) -> Result<Branch> {
    if !(eta > 0.0 && eta2 > 0.0) {
        return Err(Error::InvalidParams("contour offsets η, η′ must be positive".into()));
    }
    let c = eta + eta2 + tau - tau2;
    if c.abs() < 1e-9 {
        return Err(Error::InvalidParams("contours pass through the pole: η + η′ = τ′ − τ".into()));
    }
    Ok(if c > 0.0 { Branch::Tilde } else { Branch::Kernel })
}

/// −(1/4π²) ∬ e^{iξz + iξ′w + i(z³+w³)/3} / (τ′−τ + i(z+w)) dz dw over
/// Im z = η, Im w = η′ by the trapezoid rule. Returns the value and the branch
/// (Ã or A) the contour placement selects.
pub fn extended_airy_double_integral(
    tau: f64,
    xi: f64,
    tau2: f64,
    xi2: f64,
    eta: f64,
    eta2: f64,
) -> Result<(f64, Branch)> {
    let branch = double_integral_branch(tau, tau2, eta, eta2)?;
    // |e^{iξz+iz³/3}| = e^{−ξη + η³/3 − ηs²} on z = s + iη.
    let line = |xi: f64, eta: f64| -> (f64, f64) {
        let reach = ((45.0 - xi * eta + eta.powi(3) / 3.0).max(45.0) / eta).sqrt();
        let step = 0.02f64.min(eta / 12.0);
        (reach, step)
    };
    let (s1, h1) = line(xi, eta);
    let (s2, h2) = line(xi2, eta2);
    let h = h1.min(h2);
    let sample = |xi: f64, eta: f64, reach: f64| -> Vec<(Complex64, Complex64)> {
        let n = (reach / h).ceil() as i64;
        (-n..=n)
            .map(|k| {
                let z = Complex64::new(k as f64 * h, eta);
                let i = Complex64::i();
                (z, (i * xi * z + i * z * z * z / 3.0).exp())
            })
            .collect()
    };
    let zs = sample(xi, eta, s1);
    let ws = sample(xi2, eta2, s2);
    let d = tau2 - tau;
    let sum: Complex64 = zs
        .par_iter()
        .map(|&(z, fz)| fz * ws.iter().map(|&(w, fw)| fw / (d + Complex64::i() * (z + w))).sum::<Complex64>())
        .sum();
    Ok((-(sum * h * h).re / (4.0 * PI * PI), branch))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_time_is_classic() {
        let s = ExtendedAiryKernelSpec::default();
        let a0 = extended_airy_kernel(0.0, 0.0, 0.0, 0.0, &s).unwrap();
        assert!((a0 - 0.2588194037928068f64.powi(2)).abs() < 1e-12);
        for (x, y) in [(-2.0, 1.0), (0.5, 0.7), (-5.0, -3.0)] {
            let a = extended_airy_kernel(0.3, x, 0.3, y, &s).unwrap();
            assert!((a - classic_airy_kernel(x, y)).abs() < 1e-12, "{x} {y}");
        }
    }

    #[test]
    fn depends_on_time_difference() {
        let s = ExtendedAiryKernelSpec::default();
        for (t, t2) in [(0.0, 0.6), (0.6, 0.0)] {
            let a = extended_airy_kernel(t, -1.0, t2, 0.5, &s).unwrap();
            let b = extended_airy_kernel(t + 2.5, -1.0, t2 + 2.5, 0.5, &s).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn phi_closed_form() {
        assert!((phi_gaussian(0.0, 1.0, 0.0, 0.0) - (4.0 * PI).powf(-0.5) * (1.0f64 / 12.0).exp()).abs() < 1e-15);
        assert_eq!(phi_gaussian(1.0, 1.0, 0.0, 0.0), 0.0);
        let s = ExtendedAiryKernelSpec::default();
        for (t2, x, y) in [(1.0, 0.0, 0.0), (0.5, -1.0, 2.0), (2.0, 1.0, -0.5)] {
            let full = extended_airy_tilde(0.0, x, t2, y, &s).unwrap() - extended_airy_kernel(0.0, x, t2, y, &s).unwrap();
            assert!((full - phi_gaussian(0.0, t2, x, y)).abs() < 1e-10, "{t2} {x} {y}");
        }
    }

    #[test]
    fn double_integral_matches_lambda_form() {
        let s = ExtendedAiryKernelSpec::default();
        let (v, b) = extended_airy_double_integral(0.0, 0.5, 0.0, -0.5, 1.0, 1.0).unwrap();
        assert_eq!(b, Branch::Tilde);
        assert!((v - extended_airy_kernel(0.0, 0.5, 0.0, -0.5, &s).unwrap()).abs() < 1e-9);
        let (v, b) = extended_airy_double_integral(0.0, 0.5, 0.8, -0.5, 0.2, 0.2).unwrap();
        assert_eq!(b, Branch::Kernel);
        assert!((v - extended_airy_kernel(0.0, 0.5, 0.8, -0.5, &s).unwrap()).abs() < 1e-9, "{v}");
        assert!(double_integral_branch(0.0, 1.0, 0.5, 0.5).is_err());
    }
}
