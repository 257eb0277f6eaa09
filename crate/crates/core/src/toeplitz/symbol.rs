use crate::lattice::GeomParams;
use crate::linalg::Matrix;
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;

const MAX_FFT: usize = 1 << 16;

/// Rational symbol c·∏(1−γz)^p · ∏(1−γ/z)^p with real |γ| < 1.
///
/// The first product is analytic and zero-free in |z| < 1/γ (the "+" factor,
/// which also carries the constant), the second in |z| > γ (the "−" factor).
/// Both have winding number zero on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSymbol {
    constant: f64,
    plus: Vec<(f64, i32)>,
    minus: Vec<(f64, i32)>,
}

impl ScalarSymbol {
    pub fn new(constant: f64, plus: Vec<(f64, i32)>, minus: Vec<(f64, i32)>) -> Result<Self> {
        if constant == 0.0 || !constant.is_finite() {
            return Err(Error::InvalidParams(format!("symbol constant {constant}")));
        }
        if let Some((g, _)) = plus.iter().chain(&minus).find(|(g, _)| !(g.abs() < 1.0)) {
            return Err(Error::InvalidParams(format!("factor root |γ| = {} must be < 1", g.abs())));
        }
        Ok(Self { constant, plus, minus })
    }

    pub fn one() -> Self {
        Self { constant: 1.0, plus: vec![], minus: vec![] }
    }

    /// Half-width ε of the annulus 1−ε < |z| < 1+ε free of zeros and poles.
    pub fn epsilon(&self) -> f64 {
        let g = self.plus.iter().chain(&self.minus).map(|(g, _)| g.abs()).fold(0.0, f64::max);
        (1.0 - g).min(1.0 / g.max(1e-300) - 1.0)
    }

    pub fn plus_part(&self) -> Self {
        Self { constant: self.constant, plus: self.plus.clone(), minus: vec![] }
    }

    pub fn minus_part(&self) -> Self {
        Self { constant: 1.0, plus: vec![], minus: self.minus.clone() }
    }

    pub fn inverse(&self) -> Self {
        let flip = |v: &[(f64, i32)]| v.iter().map(|&(g, p)| (g, -p)).collect();
        Self { constant: 1.0 / self.constant, plus: flip(&self.plus), minus: flip(&self.minus) }
    }

    pub fn product(&self, other: &Self) -> Self {
        let cat = |a: &[(f64, i32)], b: &[(f64, i32)]| a.iter().chain(b).copied().collect();
        Self {
            constant: self.constant * other.constant,
            plus: cat(&self.plus, &other.plus),
            minus: cat(&self.minus, &other.minus),
        }
    }

    pub fn eval_plus(&self, z: Complex64) -> Complex64 {
        self.plus.iter().fold(Complex64::new(self.constant, 0.0), |acc, &(g, p)| acc * (1.0 - g * z).powi(p))
    }

    pub fn eval_minus(&self, z: Complex64) -> Complex64 {
        self.minus.iter().fold(Complex64::new(1.0, 0.0), |acc, &(g, p)| acc * (1.0 - g / z).powi(p))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_plus(z) * self.eval_minus(z)
    }

    /// Fourier coefficients f̂(k) for |k| ≤ kmax, returned at index k + kmax.
    /// FFT on the unit circle, doubling the sample count until the requested
    /// coefficients are stable to 1e−15 (relative to the largest).
    pub fn fourier_coefficients(&self, kmax: usize) -> Result<Vec<Complex64>> {
        let mut l = (4 * kmax + 64).next_power_of_two();
        let mut prev = self.fft_coefficients(l, kmax);
        loop {
            l *= 2;
            if l > MAX_FFT {
                return Err(Error::Quadrature(format!("Fourier coefficients not converged at {MAX_FFT} nodes")));
            }
            let cur = self.fft_coefficients(l, kmax);
            let scale = cur.iter().map(|c| c.norm()).fold(1e-300, f64::max);
            let diff = cur.iter().zip(&prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if diff <= 1e-15 * scale {
                return Ok(cur);
            }
            prev = cur;
        }
    }

    pub fn fourier(&self, k: i64) -> Result<Complex64> {
        let kmax = k.unsigned_abs() as usize;
        Ok(self.fourier_coefficients(kmax)?[(k + kmax as i64) as usize])
    }

    fn fft_coefficients(&self, l: usize, kmax: usize) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = (0..l)
            .map(|j| self.eval(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / l as f64)))
            .collect();
        FftPlanner::new().plan_fft_forward(l).process(&mut buf);
        let k = kmax as i64;
        (-k..=k).map(|m| buf[m.rem_euclid(l as i64) as usize] / l as f64).collect()
    }
}

/// (T_n)_{jk} = â_{j−k}, 1 ≤ j,k ≤ n.
pub fn toeplitz_matrix(symbol: &ScalarSymbol, n: usize) -> Result<Matrix<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidParams("Toeplitz order must be at least 1".into()));
    }
    let c = symbol.fourier_coefficients(n - 1)?;
    Ok(Matrix::from_fn(n, n, |j, k| c[j + n - 1 - k]))
}

/// A family f_r, −M ≤ r < M, each already split as f_r = f_r⁺ f_r⁻.
#[derive(Clone, Debug)]
pub struct SymbolSystem {
    m: usize,
    symbols: Vec<ScalarSymbol>,
}

impl SymbolSystem {
    pub fn new(m: usize, symbols: Vec<ScalarSymbol>) -> Result<Self> {
        if symbols.len() != 2 * m {
            return Err(Error::Shape(format!("need 2M = {} symbols, got {}", 2 * m, symbols.len())));
        }
        Ok(Self { m, symbols })
    }

    /// The PNG family at time 2N−1: odd r = 2j−1 carries (1−a)/(1−az) with
    /// a = a_{j+N}, even r = 2j carries (1−b)/(1−b/z) with b = b_{N−j}.
    pub fn png(params: &GeomParams, big_n: usize) -> Result<Self> {
        let m = 2 * big_n - 1;
        params.check_covers(m, m)?;
        let ni = big_n as i64;
        let symbols = (-(m as i64)..m as i64)
            .map(|r| {
                if r.rem_euclid(2) == 1 {
                    let a = params.a(((r + 1) / 2 + ni) as usize);
                    ScalarSymbol::new(1.0 - a, vec![(a, -1)], vec![])
                } else {
                    let b = params.b((ni - r / 2) as usize);
                    ScalarSymbol::new(1.0 - b, vec![], vec![(b, -1)])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, symbols)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn symbol(&self, r: i64) -> &ScalarSymbol {
        &self.symbols[(r + self.m as i64) as usize]
    }

    fn range(&self, r: i64, s: i64) -> impl Iterator<Item = &ScalarSymbol> {
        (r..s).map(move |t| self.symbol(t))
    }

    /// f_{r,s}(z) = ∏_{r ≤ ℓ < s} f_ℓ(z).
    pub fn f_range(&self, r: i64, s: i64, z: Complex64) -> Complex64 {
        self.range(r, s).map(|f| f.eval(z)).product()
    }

    /// a = f_{−M,M}.
    pub fn total(&self) -> ScalarSymbol {
        self.symbols.iter().fold(ScalarSymbol::one(), |acc, f| acc.product(f))
    }

    pub fn a_plus(&self) -> ScalarSymbol {
        self.total().plus_part()
    }

    pub fn a_minus(&self) -> ScalarSymbol {
        self.total().minus_part()
    }

    fn check_time(&self, r: i64) -> Result<()> {
        let m = self.m as i64;
        if r < -m || r >= m {
            return Err(Error::OutOfRange(format!("time {r} outside [−{m}, {m})")));
        }
        Ok(())
    }

    /// G_{r,s}(z,w) = ∏_{t≥r} f_t⁻(1/z) ∏_{t<s} f_t⁺(1/w) / (∏_{t<r} f_t⁺(1/z) ∏_{t≥s} f_t⁻(1/w)).
    pub fn limit_kernel_g(&self, r: i64, s: i64, z: Complex64, w: Complex64) -> Result<Complex64> {
        self.check_time(r)?;
        self.check_time(s)?;
        let m = self.m as i64;
        let (zi, wi) = (1.0 / z, 1.0 / w);
        let num: Complex64 = self.range(r, m).map(|f| f.eval_minus(zi)).product::<Complex64>()
            * self.range(-m, s).map(|f| f.eval_plus(wi)).product::<Complex64>();
        let den: Complex64 = self.range(-m, r).map(|f| f.eval_plus(zi)).product::<Complex64>()
            * self.range(s, m).map(|f| f.eval_minus(wi)).product::<Complex64>();
        Ok(num / den)
    }

    /// K̃^M generating function z/(z−w)·G(z,w).
    pub fn limit_kernel_tilde(&self, r: i64, s: i64, z: Complex64, w: Complex64) -> Result<Complex64> {
        if (z - w).norm() < 1e-14 {
            return Err(Error::InvalidParams("limit kernel has a pole at z = w".into()));
        }
        Ok(z / (z - w) * self.limit_kernel_g(r, s, z, w)?)
    }

    /// (z/w) f_{r,M}(1/z) f_{−M,s}(1/w) Σ_{i,j≤n} z^{−i} [T_n(a)⁻¹]_{ij} w^j.
    pub fn finite_n_generating(&self, r: i64, s: i64, z: Complex64, w: Complex64, n: usize) -> Result<Complex64> {
        let inv = toeplitz_matrix(&self.total(), n)?.inverse_checked(1e14)?.0;
        Ok(self.finite_n_with_inverse(r, s, z, w, &inv))
    }

    fn finite_n_with_inverse(&self, r: i64, s: i64, z: Complex64, w: Complex64, inv: &Matrix<Complex64>) -> Complex64 {
        let n = inv.rows();
        let zp: Vec<Complex64> = (1..=n).map(|i| z.powi(-(i as i32))).collect();
        let wp: Vec<Complex64> = (1..=n).map(|j| w.powi(j as i32)).collect();
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let row: Complex64 = inv.row(i).iter().zip(&wp).map(|(a, b)| a * b).sum();
            sum += zp[i] * row;
        }
        let m = self.m as i64;
        z / w * self.f_range(r, m, 1.0 / z) * self.f_range(-m, s, 1.0 / w) * sum
    }
}

/// One sample of the finite-n vs limit comparison.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BoundSample {
    pub n: usize,
    pub r: i64,
    pub s: i64,
    pub z: (f64, f64),
    pub w: (f64, f64),
    pub deviation: f64,
    pub bound: f64,
}

/// |K̃^{n,M} − K̃^M| against
/// |f_{r,M}(1/z)||f_{−M,s}(1/w)| / ((|z|−1)(1−|w|)) · (1/n + |w|^{n/2} + |z|^{−n/2}).
pub fn limit_bound_check(
    sys: &SymbolSystem,
    r: i64,
    s: i64,
    points: &[(Complex64, Complex64)],
    ns: &[usize],
) -> Result<Vec<BoundSample>> {
    let m = sys.m as i64;
    let total = sys.total();
    let mut out = Vec::new();
    for &n in ns {
        let inv = toeplitz_matrix(&total, n)?.inverse_checked(1e14)?.0;
        for &(z, w) in points {
            if !(z.norm() > 1.0 && w.norm() < 1.0) {
                return Err(Error::InvalidParams("need |w| < 1 < |z|".into()));
            }
            let finite = sys.finite_n_with_inverse(r, s, z, w, &inv);
            let limit = sys.limit_kernel_tilde(r, s, z, w)?;
            let nf = n as f64;
            let bound = sys.f_range(r, m, 1.0 / z).norm() * sys.f_range(-m, s, 1.0 / w).norm()
                / ((z.norm() - 1.0) * (1.0 - w.norm()))
                * (1.0 / nf + w.norm().powf(nf / 2.0) + z.norm().powf(-nf / 2.0));
            out.push(BoundSample {
                n,
                r,
                s,
                z: (z.re, z.im),
                w: (w.re, w.im),
                deviation: (finite - limit).norm(),
                bound,
            });
        }
    }
    Ok(out)
}

/// Entrywise distance between T_n(a)⁻¹ and T(a₊⁻¹)T(a₋⁻¹), maximised over
/// entries with min(n+1−j, n+1−k) = m, for m = 1..=n.
#[derive(Clone, Debug, serde::Serialize)]
pub struct InverseDeviation {
    pub n: usize,
    pub by_distance: Vec<f64>,
    /// Least-squares fit dev(m) ≈ C ρ^m over the entries above the noise floor.
    pub constant: f64,
    pub rate: f64,
}

pub fn inverse_deviation(symbol: &ScalarSymbol, n: usize) -> Result<InverseDeviation> {
    let inv = toeplitz_matrix(symbol, n)?.inverse_checked(1e14)?.0;
    let bp = symbol.plus_part().inverse().fourier_coefficients(n)?;
    let bm = symbol.minus_part().inverse().fourier_coefficients(n)?;
    let c = |v: &[Complex64], k: i64| v[(k + n as i64) as usize];
    let mut by_distance = vec![0.0f64; n];
    for j in 1..=n {
        for k in 1..=n {
            let mut prod = Complex64::new(0.0, 0.0);
            for l in 1..=j.min(k) {
                prod += c(&bp, (j - l) as i64) * c(&bm, l as i64 - k as i64);
            }
            let d = (inv[(j - 1, k - 1)] - prod).norm();
            let m = (n + 1 - j).min(n + 1 - k);
            by_distance[m - 1] = by_distance[m - 1].max(d);
        }
    }
    let (constant, rate) = fit_geometric(&by_distance);
    Ok(InverseDeviation { n, by_distance, constant, rate })
}

fn fit_geometric(dev: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> =
        dev.iter().enumerate().filter(|(_, &d)| d > 1e-13).map(|(i, &d)| ((i + 1) as f64, d.ln())).collect();
    if pts.len() < 2 {
        return (dev.iter().copied().fold(0.0, f64::max), 0.0);
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    // Shift the intercept so the fit bounds every point.
    let c = pts.iter().map(|p| p.1 - slope * p.0).fold(f64::NEG_INFINITY, f64::max);
    (c.exp(), slope.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_toeplitz() {
        let t = toeplitz_matrix(&ScalarSymbol::one(), 4).unwrap();
        assert!(t.max_abs_diff(&Matrix::identity(4)) < 1e-15);
        let s = ScalarSymbol::new(1.0, vec![(0.3, 1)], vec![]).unwrap();
        let t = toeplitz_matrix(&s, 4).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let want = if j == k { 1.0 } else if j == k + 1 { -0.3 } else { 0.0 };
                assert!((t[(j, k)] - c(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn png_symbol_coefficients_match_convolution() {
        // N=1: a(z) = (1−α)²/((1−αz)(1−α/z)), â_k = (1−α)/(1+α)·α^|k|.
        let al = 0.5;
        let sys = SymbolSystem::png(&GeomParams::homogeneous(al * al).unwrap(), 1).unwrap();
        let t = toeplitz_matrix(&sys.total(), 4).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let want = (1.0 - al) / (1.0 + al) * al.powi((j as i32 - k as i32).abs());
                assert!((t[(j, k)].re - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn trivial_generating_function() {
        let sys = SymbolSystem::new(1, vec![ScalarSymbol::one(), ScalarSymbol::one()]).unwrap();
        let (z, w) = (c(1.2, 0.3), c(0.4, -0.5));
        let got = sys.finite_n_generating(0, 0, z, w, 6).unwrap();
        let want: Complex64 = z / w * (1..=6).map(|i| (w / z).powi(i)).sum::<Complex64>();
        assert!((got - want).norm() < 1e-13);
        assert!((sys.limit_kernel_g(-1, 0, z, w).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn generating_function_converges_within_bound() {
        let sys = SymbolSystem::png(&GeomParams::homogeneous(0.25).unwrap(), 2).unwrap();
        let pts = [(c(1.1, 0.4), c(0.3, 0.7)), (c(-1.3, 0.1), c(0.85, 0.0))];
        let rows = limit_bound_check(&sys, 0, 1, &pts, &[8, 16, 32, 64]).unwrap();
        for r in &rows {
            assert!(r.deviation < r.bound, "{r:?}");
        }
        assert!(rows[6].deviation < rows[0].deviation);
    }

    #[test]
    fn inverse_approaches_wiener_hopf_product() {
        let sys = SymbolSystem::png(&GeomParams::homogeneous(0.25).unwrap(), 2).unwrap();
        let d = inverse_deviation(&sys.total(), 32).unwrap();
        assert!(d.by_distance[20] < 1e-6 * d.by_distance[0].max(1e-3), "{:?}", d.by_distance);
        assert!(d.rate < 1.0);
    }
}
