use super::png_kernel::{single_time_gap, PngKernelParams, SeriesKernel};
use crate::airy::{extended_airy_kernel, ExtendedAiryKernelSpec};
use crate::{Error, Result};
use serde::Serialize;

/// One comparison point: the lattice sites actually used and the rescaled
/// arguments they correspond to after rounding.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScaledKernelPoint {
    pub u: i64,
    pub x: i64,
    pub v: i64,
    pub y: i64,
    pub tau: f64,
    pub xi: f64,
    pub tau2: f64,
    pub xi2: f64,
    /// d N^{1/3} K_N(2u,x;2v,y).
    pub discrete: f64,
    /// e^{(τ³−τ′³)/3 + ξ′τ′ − ξτ} A(τ,ξ;τ′,ξ′) at the rounded arguments.
    pub airy: f64,
}

impl ScaledKernelPoint {
    pub fn gap(&self) -> f64 {
        (self.discrete - self.airy).abs()
    }
}

/// u = round(cN^{2/3}τ), x = round(aN + (ξ − τ²) dN^{1/3}), and the
/// rescaled (τ, ξ) the integers stand for.
pub fn scaled_site(p: &PngKernelParams, tau: f64, xi: f64) -> Result<(i64, i64, f64, f64)> {
    let s = &p.scaling;
    let n = p.big_n;
    let ts = s.time_scale(n);
    let u = (ts * tau).round() as i64;
    if u.abs() >= n as i64 {
        return Err(Error::OutOfRange(format!("τ = {tau} needs |u| = {} < N = {n}; increase N", u.abs())));
    }
    let t = u as f64 / ts;
    let x = s.unscale(xi - t * t, n).round() as i64;
    Ok((u, x, t, s.rescale(x as f64, n) + t * t))
}

pub fn scaled_kernel_limit(p: &PngKernelParams, tau: f64, xi: f64, tau2: f64, xi2: f64) -> Result<ScaledKernelPoint> {
    let (u, x, t1, x1) = scaled_site(p, tau, xi)?;
    let (v, y, t2, x2) = scaled_site(p, tau2, xi2)?;
    let k = SeriesKernel::new(p, u, v, (x, x), (y, y))?.get(x, y);
    let dn = p.scaling.d * (p.big_n as f64).cbrt();
    let conj = ((t1.powi(3) - t2.powi(3)) / 3.0 + x2 * t2 - x1 * t1).exp();
    let a = extended_airy_kernel(t1, x1, t2, x2, &ExtendedAiryKernelSpec::default())?;
    Ok(ScaledKernelPoint { u, x, v, y, tau: t1, xi: x1, tau2: t2, xi2: x2, discrete: dn * k, airy: conj * a })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScaledGap {
    pub big_n: usize,
    pub u: i64,
    pub level: i64,
    pub width: usize,
    pub prob: f64,
}

/// det(I − K_N) over sites above aN + (ξ − τ²)dN^{1/3} at time 2u, u ≈ cN^{2/3}τ:
/// the finite-N counterpart of F₂(ξ). The window extends `sd` scale units up.
pub fn scaled_gap(p: &PngKernelParams, tau: f64, xi: f64, sd: f64) -> Result<ScaledGap> {
    let (u, level, _, _) = scaled_site(p, tau, xi)?;
    let width = (sd * p.scaling.d * (p.big_n as f64).cbrt()).ceil() as usize + 20;
    let prob = single_time_gap(p, u, level, width)?;
    Ok(ScaledGap { big_n: p.big_n, u, level, width, prob })
}
