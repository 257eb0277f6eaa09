use crate::lattice::ScalingConstants;
use crate::quadrature::periodic_mean;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// Homogeneous PNG at time 2N−1 with a_i = b_i = α.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PngKernelParams {
    pub big_n: usize,
    pub scaling: ScalingConstants,
}

impl PngKernelParams {
    pub fn new(alpha: f64, big_n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParams(format!("α = {alpha} outside (0, 1)")));
        }
        if big_n == 0 {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        Ok(Self { big_n, scaling: ScalingConstants::new(alpha * alpha)? })
    }

    pub fn alpha(&self) -> f64 {
        self.scaling.alpha
    }

    fn check_times(&self, u: i64, v: i64) -> Result<()> {
        let n = self.big_n as i64;
        if u.abs() >= n || v.abs() >= n {
            return Err(Error::OutOfRange(format!("need |u|, |v| < N = {n}, got u = {u}, v = {v}")));
        }
        Ok(())
    }

    /// log of (1−α/z)^{N+u} / (1−αz)^{N−u}; principal logs are continuous
    /// on α < |z| < 1/α since both bases have positive real part there.
    fn log_gz(&self, u: i64, z: Complex64) -> Complex64 {
        let (a, n) = (self.alpha(), self.big_n as f64);
        (n + u as f64) * (1.0 - a / z).ln() - (n - u as f64) * (1.0 - a * z).ln()
    }

    /// log of (1−αw)^{N−v} / (1−α/w)^{N+v}.
    fn log_gw(&self, v: i64, w: Complex64) -> Complex64 {
        let (a, n) = (self.alpha(), self.big_n as f64);
        (n - v as f64) * (1.0 - a * w).ln() - (n + v as f64) * (1.0 - a / w).ln()
    }

    fn log_prefactor(&self, u: i64, v: i64) -> f64 {
        2.0 * (v - u) as f64 * (1.0 - self.alpha()).ln()
    }

    /// G(z,w) in closed form for the homogeneous symbols.
    pub fn g(&self, u: i64, v: i64, z: Complex64, w: Complex64) -> Complex64 {
        (self.log_prefactor(u, v) + self.log_gz(u, z) + self.log_gw(v, w)).exp()
    }
}

/// Circles |w| = r1 < |z| = r2 for the double contour integral.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ContourSpec {
    pub r1: f64,
    pub r2: f64,
    pub start_nodes: usize,
    pub max_nodes: usize,
    pub rtol: f64,
}

impl ContourSpec {
    /// r1 = (1+α)/2, r2 = 1/r1.
    pub fn default_for(alpha: f64) -> Self {
        let r1 = 0.5 * (1.0 + alpha);
        Self { r1, r2: 1.0 / r1, start_nodes: 128, max_nodes: 4096, rtol: 1e-12 }
    }

    pub fn with_radii(self, r1: f64, r2: f64) -> Self {
        Self { r1, r2, ..self }
    }

    pub fn validate(&self, alpha: f64) -> Result<()> {
        if !(alpha < self.r1 && self.r1 < 1.0 && 1.0 < self.r2 && self.r2 < 1.0 / alpha) {
            return Err(Error::InvalidParams(format!(
                "radii must satisfy α < r1 < 1 < r2 < 1/α; got α = {alpha}, r1 = {}, r2 = {}",
                self.r1, self.r2
            )));
        }
        if self.start_nodes < 64 || !self.start_nodes.is_power_of_two() || self.max_nodes < self.start_nodes {
            return Err(Error::InvalidParams("node counts must be powers of two, at least 64".into()));
        }
        Ok(())
    }
}

/// Mean over the torus |z| = rz, |w| = rw of w^y z^{−x} z/(z−w) G(z,w).
fn double_contour(p: &PngKernelParams, u: i64, x: i64, v: i64, y: i64, rz: f64, rw: f64, spec: &ContourSpec) -> Result<f64> {
    let pre = p.log_prefactor(u, v);
    let eval = |l: usize| -> f64 {
        let ang = |j: usize| 2.0 * PI * j as f64 / l as f64;
        let zs: Vec<(Complex64, Complex64)> = (0..l)
            .map(|j| {
                let z = Complex64::from_polar(rz, ang(j));
                (z, (p.log_gz(u, z) - x as f64 * z.ln() + pre).exp())
            })
            .collect();
        let ws: Vec<(Complex64, Complex64)> = (0..l)
            .map(|k| {
                let w = Complex64::from_polar(rw, ang(k));
                (w, (p.log_gw(v, w) + y as f64 * w.ln()).exp())
            })
            .collect();
        let sum: Complex64 = zs
            .par_iter()
            .map(|&(z, fz)| fz * z * ws.iter().map(|&(w, fw)| fw / (z - w)).sum::<Complex64>())
            .sum();
        sum.re / (l * l) as f64
    };
    let mut l = spec.start_nodes;
    let mut prev = eval(l);
    while 2 * l <= spec.max_nodes {
        l *= 2;
        let cur = eval(l);
        if (cur - prev).abs() <= spec.rtol * cur.abs().max(1e-3) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!("double contour integral not converged at {} nodes", spec.max_nodes)))
}

/// K̃_N(2u,x;2v,y): z on the outer circle, w on the inner one.
pub fn png_kernel_tilde(p: &PngKernelParams, u: i64, x: i64, v: i64, y: i64, spec: &ContourSpec) -> Result<f64> {
    p.check_times(u, v)?;
    spec.validate(p.alpha())?;
    double_contour(p, u, x, v, y, spec.r2, spec.r1, spec)
}

/// The same integrand with the circles exchanged (z inside, w outside).
pub fn png_kernel_swapped(p: &PngKernelParams, u: i64, x: i64, v: i64, y: i64, spec: &ContourSpec) -> Result<f64> {
    p.check_times(u, v)?;
    spec.validate(p.alpha())?;
    double_contour(p, u, x, v, y, spec.r1, spec.r2, spec)
}

/// K_N(2u,x;2v,y) = K̃_N − φ_{2u,2v}. For u < v the swapped arrangement already
/// omits the residue at z = w, which is exactly φ.
pub fn png_kernel(p: &PngKernelParams, u: i64, x: i64, v: i64, y: i64, spec: &ContourSpec) -> Result<f64> {
    if u >= v {
        png_kernel_tilde(p, u, x, v, y, spec)
    } else {
        png_kernel_swapped(p, u, x, v, y, spec)
    }
}

/// φ_{2u,2v}(x,y) = (1/2π)∫ e^{i(y−x)θ} ((1−α)²/(1+α²−2α cos θ))^{v−u} dθ, zero for u ≥ v.
pub fn phi_uv(p: &PngKernelParams, u: i64, v: i64, x: i64, y: i64) -> f64 {
    if u >= v {
        return 0.0;
    }
    let a = p.alpha();
    let k = (v - u) as f64;
    let d = (y - x) as f64;
    let t = periodic_mean(
        |th| Complex64::new((d * th).cos() * ((1.0 - a).powi(2) / (1.0 + a * a - 2.0 * a * th.cos())).powf(k), 0.0),
        // Start above the oscillation frequency so aliasing cannot fake convergence.
        (4 * (y - x).unsigned_abs() as usize + 64).next_power_of_two(),
        1 << 22,
        1e-14,
        1e-17,
    );
    // The integrand is entire in θ; the rule cannot fail to converge before 2^20.
    t.expect("φ quadrature").value.re
}

/// Laurent coefficients c(m), lo ≤ m ≤ hi, stored as
/// c(m) = exp(offset + sign·m·s_ref) · scaled[m − lo].
struct Coefficients {
    lo: i64,
    offset: f64,
    scaled: Vec<f64>,
}

/// `sign = −1`: c(m) = mean f(z) z^{−m} (coefficient of z^m);
/// `sign = +1`: c(m) = mean f(w) w^{m}.
///
/// Each c(m) is read off the FFT on whichever circle of the ladder minimises
/// its sampling-error bound max|f|·ρ^{sign·m}, then re-expressed relative to
/// the reference circle s_ref so products of z- and w-coefficients stay finite.
fn laurent(
    log_f: &(dyn Fn(Complex64) -> Complex64 + Sync),
    s_ref: f64,
    edge: f64,
    sign: f64,
    l: usize,
    lo: i64,
    hi: i64,
) -> Coefficients {
    let mut ladder: Vec<f64> = (0..=32).map(|i| edge * (-0.98 + 1.96 * i as f64 / 32.0)).collect();
    ladder.push(s_ref);
    let sampled: Vec<(f64, f64, Vec<Complex64>)> = ladder
        .par_iter()
        .map(|&s| {
            let rho = s.exp();
            let logs: Vec<Complex64> =
                (0..l).map(|j| log_f(Complex64::from_polar(rho, 2.0 * PI * j as f64 / l as f64))).collect();
            let peak = logs.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
            let mut buf: Vec<Complex64> = logs.iter().map(|c| (c - peak).exp()).collect();
            let mut planner = FftPlanner::new();
            if sign < 0.0 {
                planner.plan_fft_forward(l).process(&mut buf);
            } else {
                planner.plan_fft_inverse(l).process(&mut buf);
            }
            (s, peak, buf)
        })
        .collect();
    let offset = sampled.last().unwrap().1;
    let scaled = (lo..=hi)
        .map(|m| {
            let bound = |(s, peak, _): &(f64, f64, Vec<Complex64>)| peak + sign * m as f64 * s;
            let best = sampled.iter().min_by(|a, b| bound(a).total_cmp(&bound(b))).unwrap();
            let raw = best.2[m.rem_euclid(l as i64) as usize].re / l as f64;
            raw * (best.1 - offset + sign * m as f64 * (best.0 - s_ref)).exp()
        })
        .collect();
    Coefficients { lo, offset, scaled }
}

/// Common log-radius s minimising max|g_z| · max|g_w| · e^{shift·s} on |z| = |w| = e^s.
/// Sampling errors of the Laurent sum at (x, y) scale like that product with
/// shift = y − x, so this is the circle with the least cancellation.
fn balanced_log_radius(
    fz: &(dyn Fn(Complex64) -> Complex64 + Sync),
    fw: &(dyn Fn(Complex64) -> Complex64 + Sync),
    alpha: f64,
    shift: i64,
) -> f64 {
    let peak = |f: &(dyn Fn(Complex64) -> Complex64 + Sync), rho: f64| {
        (0..256).map(|j| f(Complex64::from_polar(rho, 2.0 * PI * j as f64 / 256.0)).re).fold(f64::NEG_INFINITY, f64::max)
    };
    let h = |s: f64| peak(fz, s.exp()) + peak(fw, s.exp()) + shift as f64 * s;
    let edge = -alpha.ln();
    let (mut a, mut b) = (-0.98 * edge, 0.98 * edge);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut hc, mut hd) = (h(c), h(d));
    for _ in 0..60 {
        if hc < hd {
            b = d;
            d = c;
            hd = hc;
            c = b - g * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + g * (b - a);
            hd = h(d);
        }
    }
    0.5 * (a + b)
}

/// K_N(2u,·;2v,·) on a rectangle of lattice sites, via
/// K̃(x,y) = Σ_{k≥0} c_z(x+k) c_w(y+k) with FFT-computed Laurent coefficients.
/// Scales to N in the hundreds, where the double trapezoid rule would need
/// thousands of nodes per circle.
#[derive(Clone, Debug)]
pub struct SeriesKernel {
    pub u: i64,
    pub v: i64,
    x_lo: i64,
    y_lo: i64,
    values: Vec<Vec<f64>>,
}

impl SeriesKernel {
    pub fn new(p: &PngKernelParams, u: i64, v: i64, xs: (i64, i64), ys: (i64, i64)) -> Result<Self> {
        p.check_times(u, v)?;
        if xs.0 > xs.1 || ys.0 > ys.1 {
            return Err(Error::InvalidParams("empty kernel window".into()));
        }
        let n = p.big_n as i64;
        let reach = xs.0.abs().max(xs.1.abs()).max(ys.0.abs()).max(ys.1.abs());
        let l = ((8 * (n + reach) + 4096) as usize).next_power_of_two();
        let tail = (l / 4) as i64;
        let alpha = p.alpha();
        let fz = move |z: Complex64| p.log_gz(u, z);
        let fw = move |w: Complex64| p.log_gw(v, w);
        let s = balanced_log_radius(&fz, &fw, alpha, (ys.0 + ys.1 - xs.0 - xs.1) / 2);
        let edge = -alpha.ln();
        let cz = laurent(&fz, s, edge, -1.0, l, xs.0, xs.1 + tail);
        let cw = laurent(&fw, s, edge, 1.0, l, ys.0, ys.1 + tail);
        let base = cz.offset + cw.offset + p.log_prefactor(u, v);
        let values = (xs.0..=xs.1)
            .into_par_iter()
            .map(|x| {
                (ys.0..=ys.1)
                    .map(|y| {
                        let scale = (base + (y - x) as f64 * s).exp();
                        let (iz, iw) = ((x - cz.lo) as usize, (y - cw.lo) as usize);
                        let mut sum = 0.0;
                        let mut biggest = 0.0f64;
                        let mut quiet = 0;
                        for k in 0..tail as usize {
                            let t = cz.scaled[iz + k] * cw.scaled[iw + k];
                            sum += t;
                            biggest = biggest.max(t.abs());
                            quiet = if t.abs() <= 1e-18 * biggest { quiet + 1 } else { 0 };
                            if quiet > 32 {
                                break;
                            }
                        }
                        scale * sum - phi_uv(p, u, v, x, y)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { u, v, x_lo: xs.0, y_lo: ys.0, values })
    }

    pub fn get(&self, x: i64, y: i64) -> f64 {
        self.values[(x - self.x_lo) as usize][(y - self.y_lo) as usize]
    }

    pub fn x_range(&self) -> (i64, i64) {
        (self.x_lo, self.x_lo + self.values.len() as i64 - 1)
    }

    pub fn y_range(&self) -> (i64, i64) {
        (self.y_lo, self.y_lo + self.values.first().map_or(0, |r| r.len()) as i64 - 1)
    }

    /// Rows "u,x,v,y,value".
    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,x,v,y,value\n");
        for (i, row) in self.values.iter().enumerate() {
            for (j, val) in row.iter().enumerate() {
                s.push_str(&format!("{},{},{},{},{:.17e}\n", self.u, self.x_lo + i as i64, self.v, self.y_lo + j as i64, val));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> PngKernelParams {
        PngKernelParams::new(0.5, 2).unwrap()
    }

    #[test]
    fn reference_values() {
        let s = ContourSpec::default_for(0.5);
        let p = p2();
        for (u, x, v, y, want) in [(0, 0, 0, 0, 0.375), (0, 1, 0, 2, 0.2578125), (0, 0, 1, 0, -0.09375), (1, 0, 0, 0, 0.84375)]
        {
            let got = png_kernel(&p, u, x, v, y, &s).unwrap();
            assert!((got - want).abs() < 1e-11, "K({u},{x};{v},{y}) = {got}, want {want}");
        }
    }

    #[test]
    fn one_step_phi() {
        let p = p2();
        for d in -4..=4i64 {
            let want = 1.0 / 3.0 * 0.5f64.powi(d.abs() as i32);
            assert!((phi_uv(&p, 0, 1, 3, 3 + d) - want).abs() < 1e-14);
        }
        assert_eq!(phi_uv(&p, 1, 1, 0, 0), 0.0);
    }

    #[test]
    fn residue_difference_is_phi() {
        let p = PngKernelParams::new(0.4, 3).unwrap();
        let s = ContourSpec::default_for(0.4);
        for (x, y) in [(0, 0), (2, -1), (-1, 3)] {
            let diff = png_kernel_tilde(&p, -1, x, 1, y, &s).unwrap() - png_kernel_swapped(&p, -1, x, 1, y, &s).unwrap();
            assert!((diff - phi_uv(&p, -1, 1, x, y)).abs() < 1e-11);
        }
    }

    #[test]
    fn series_matches_contour() {
        let s = ContourSpec::default_for(0.5);
        for big_n in [2usize, 5] {
            let p = PngKernelParams::new(0.5, big_n).unwrap();
            for (u, v) in [(0i64, 0i64), (1, -1), (-1, 1)] {
                let ser = SeriesKernel::new(&p, u, v, (-3, 6), (-2, 5)).unwrap();
                for (x, y) in [(-3, -2), (0, 0), (4, 1), (6, 5)] {
                    let direct = png_kernel(&p, u, x, v, y, &s).unwrap();
                    assert!((ser.get(x, y) - direct).abs() < 1e-10, "N={big_n} u={u} v={v} x={x} y={y} {} {direct}", ser.get(x, y));
                }
            }
        }
    }
}

/// P[h_0(2u) ≤ level] = det(I − K_N(2u,·;2u,·)) on {level+1, …, level+width}.
pub fn single_time_gap(p: &PngKernelParams, u: i64, level: i64, width: usize) -> Result<f64> {
    let (lo, hi) = (level + 1, level + width as i64);
    let k = SeriesKernel::new(p, u, u, (lo, hi), (lo, hi))?;
    let m = crate::linalg::Matrix::from_fn(width, width, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - k.get(lo + i as i64, lo + j as i64)
    });
    Ok(m.det())
}

/// P[h_0(2u_i) ≤ level_i for all i] as a block Fredholm determinant over
/// {level_i+1, …, level_i+width} at each time.
pub fn multi_time_gap(p: &PngKernelParams, sites: &[(i64, i64)], width: usize) -> Result<f64> {
    let k = sites.len();
    let mut blocks = Vec::with_capacity(k * k);
    for &(u, lu) in sites {
        for &(v, lv) in sites {
            blocks.push(SeriesKernel::new(p, u, v, (lu + 1, lu + width as i64), (lv + 1, lv + width as i64))?);
        }
    }
    let m = crate::linalg::Matrix::from_fn(k * width, k * width, |i, j| {
        let (bi, xi) = (i / width, i % width);
        let (bj, yj) = (j / width, j % width);
        let x = sites[bi].1 + 1 + xi as i64;
        let y = sites[bj].1 + 1 + yj as i64;
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - blocks[bi * k + bj].get(x, y)
    });
    Ok(m.det())
}
