use super::{Ensemble, EmpiricalStats, Histogram, Manifest, Observable};
use crate::airy::{airy_fdd, tw1, tw2, FddSpec, TwTables};
use crate::lattice::ScalingConstants;
use crate::toeplitz::{multi_time_gap, single_time_gap, PngKernelParams};
use crate::Error;
use serde::Serialize;

/// Point-to-line limit: F_GOE(2^{2/3} ξ) in the standard GOE normalization.
pub fn f1_line(xi: f64) -> Result<f64, Error> {
    TwTables::standard().f1(2f64.powf(2.0 / 3.0) * xi)
}

fn f2_table(xi: f64) -> Result<f64, Error> {
    TwTables::standard().f2(xi)
}

/// KS distance against a fallible reference.
fn ks_checked(stats: &EmpiricalStats, f: impl Fn(f64) -> Result<f64, Error>) -> Result<f64, Error> {
    let mut err = None;
    let d = stats.ks(|x| match f(x) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(d),
    }
}

fn ks_checked_support(stats: &EmpiricalStats, f: &impl Fn(f64) -> Result<f64, Error>) -> Result<f64, Error> {
    let mut err = None;
    let d = stats.ks_support(|x| match f(x) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(d),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CdfReport {
    pub manifest: Manifest,
    pub observable: String,
    pub n_samples: usize,
    pub grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub ci: Vec<(f64, f64)>,
    pub reference: Vec<f64>,
    /// KS distance against the reference law.
    pub ks: f64,
    /// KS distance against the other Tracy–Widom law (F₂ for G_pl, F₁ for G).
    pub ks_other: f64,
    /// Reference compared only at attained lattice values (diagnostic).
    pub ks_support: f64,
}

impl CdfReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("xi,empirical,ci_lo,ci_hi,reference\n");
        for i in 0..self.grid.len() {
            s += &format!(
                "{},{},{},{},{}\n",
                self.grid[i], self.empirical[i], self.ci[i].0, self.ci[i].1, self.reference[i]
            );
        }
        s
    }
}

fn cdf_report(
    ens: &Ensemble,
    stats: &EmpiricalStats,
    name: &str,
    reference: impl Fn(f64) -> Result<f64, Error>,
    table: impl Fn(f64) -> Result<f64, Error>,
    other: impl Fn(f64) -> Result<f64, Error>,
) -> Result<CdfReport, Error> {
    let grid = ens.config.grid.clone();
    Ok(CdfReport {
        manifest: ens.manifest(),
        observable: name.into(),
        n_samples: stats.len(),
        empirical: grid.iter().map(|&x| stats.cdf(x)).collect(),
        ci: grid.iter().map(|&x| stats.cdf_ci(x)).collect(),
        reference: grid.iter().map(|&x| reference(x)).collect::<Result<_, _>>()?,
        ks_support: ks_checked_support(stats, &table)?,
        ks: ks_checked(stats, table)?,
        ks_other: ks_checked(stats, other)?,
        grid,
    })
}

/// Rescaled G(N, N) against F₂.
pub fn g_point_vs_tw2(ens: &Ensemble) -> Result<CdfReport, Error> {
    let stats = ens.point_stats()?;
    cdf_report(ens, &stats, "point", tw2, f2_table, f1_line)
}

/// Rescaled G_pl(N) against F₁(2^{2/3}·).
pub fn gpl_vs_tw1(ens: &Ensemble) -> Result<CdfReport, Error> {
    let stats = ens.line_stats()?;
    let reference = |x: f64| tw1(2f64.powf(2.0 / 3.0) * x);
    cdf_report(ens, &stats, "point_to_line", reference, f1_line, f2_table)
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoTimeReport {
    pub manifest: Manifest,
    pub n_samples: usize,
    pub tau: f64,
    /// Rescaled time of the lattice offset actually used.
    pub tau_lattice: f64,
    pub u: i64,
    pub xi1: f64,
    pub xi2: f64,
    pub empirical: f64,
    pub ci: (f64, f64),
    pub reference: f64,
    /// σ = √(p(1−p)/n) at the reference p.
    pub sigma: f64,
    /// (empirical − reference)/σ.
    pub gap_sigma: f64,
    /// Product of the empirical marginals (informational).
    pub product_of_marginals: f64,
}

/// Empirical P[H_N(0) ≤ ξ1, H_N(τ) ≤ ξ2] against the Airy-process
/// probability P[A(0) ≤ ξ1, A(τ′) ≤ ξ2 + τ′²] at the lattice time τ′.
pub fn two_time_vs_airy(ens: &Ensemble) -> Result<TwoTimeReport, Error> {
    let (tau, xi1, xi2) = match ens.config.observable {
        Observable::TwoTime { tau, xi1, xi2 } => (tau, xi1, xi2),
        _ => return Err(Error::InvalidParams("ensemble was not run for the two-time observable".into())),
    };
    let n = ens.config.n;
    let s = ScalingConstants::new(ens.config.q)?;
    let u = ens.config.second_offset()?;
    let t = u as f64 / s.time_scale(n);
    let (l1, l2) = (s.unscale(xi1, n), s.unscale(xi2, n));
    let count = ens.replicas.len() as f64;
    let joint = ens.replicas.iter().filter(|r| r.point as f64 <= l1 && r.second as f64 <= l2).count() as f64 / count;
    let m1 = ens.replicas.iter().filter(|r| r.point as f64 <= l1).count() as f64 / count;
    let m2 = ens.replicas.iter().filter(|r| r.second as f64 <= l2).count() as f64 / count;
    let reference = if u == 0 {
        tw2(xi1.min(xi2))?
    } else {
        airy_fdd(&[0.0, t], &[xi1, xi2 + t * t], &FddSpec::default())?.prob
    };
    let sigma = (reference * (1.0 - reference) / count).sqrt();
    Ok(TwoTimeReport {
        manifest: ens.manifest(),
        n_samples: ens.replicas.len(),
        tau,
        tau_lattice: t,
        u,
        xi1,
        xi2,
        empirical: joint,
        ci: super::wilson(joint, ens.replicas.len()),
        reference,
        sigma,
        gap_sigma: (joint - reference) / sigma,
        product_of_marginals: m1 * m2,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactCheck {
    pub big_n: usize,
    pub sites: Vec<(i64, i64)>,
    pub exact: f64,
    pub empirical: f64,
    pub sigma: f64,
    pub gap_sigma: f64,
}

/// Kernel window above each level: 14 fluctuation scales plus a margin.
fn window(s: &ScalingConstants, n: usize) -> usize {
    (14.0 * s.d * (n as f64).cbrt()).ceil() as usize + 20
}

/// Exact finite-N P[G(N,N) ≤ aN + dN^{1/3}ξ1, G(N+u,N−u) ≤ aN + dN^{1/3}ξ2]
/// as a two-time Fredholm determinant of the PNG kernel, u = round(cN^{2/3}τ).
pub fn two_time_exact(n: usize, q: f64, tau: f64, xi1: f64, xi2: f64) -> Result<f64, Error> {
    let s = ScalingConstants::new(q)?;
    let p = PngKernelParams::new(s.alpha, n)?;
    let u = (s.time_scale(n) * tau).round() as i64;
    let l1 = s.unscale(xi1, n).floor() as i64;
    let l2 = s.unscale(xi2, n).floor() as i64;
    if u == 0 {
        return single_time_gap(&p, 0, l1.min(l2), window(&s, n));
    }
    multi_time_gap(&p, &[(0, l1), (u, l2)], window(&s, n))
}

/// Empirical two-time probability against the exact finite-N determinant.
pub fn single_time_vs_exact(ens: &Ensemble) -> Result<ExactCheck, Error> {
    let (tau, xi1, xi2) = match ens.config.observable {
        Observable::TwoTime { tau, xi1, xi2 } => (tau, xi1, xi2),
        _ => (0.0, 0.0, 0.0),
    };
    let (n, q) = (ens.config.n, ens.config.q);
    let s = ScalingConstants::new(q)?;
    let exact = two_time_exact(n, q, tau, xi1, xi2)?;
    let u = ens.config.second_offset()?;
    let (l1, l2) = (s.unscale(xi1, n), s.unscale(xi2, n));
    let count = ens.replicas.len() as f64;
    let empirical = ens.replicas.iter().filter(|r| r.point as f64 <= l1 && r.second as f64 <= l2).count() as f64 / count;
    let sigma = (exact * (1.0 - exact) / count).sqrt();
    Ok(ExactCheck {
        big_n: n,
        sites: vec![(0, l1.floor() as i64), (u, l2.floor() as i64)],
        exact,
        empirical,
        sigma,
        gap_sigma: (empirical - exact) / sigma,
    })
}

pub const TAIL_THRESHOLDS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

#[derive(Clone, Debug, Serialize)]
pub struct TransversalReport {
    pub manifest: Manifest,
    pub big_n: usize,
    pub n_samples: usize,
    /// Mean of K_N (leftmost maximiser); biased left by ties at finite N.
    pub mean: f64,
    pub mean_stderr: f64,
    /// Mean of the leftmost/rightmost midpoint, symmetric in law.
    pub mid_mean: f64,
    pub mid_mean_stderr: f64,
    pub thresholds: Vec<f64>,
    /// P[|K_N| > T].
    pub tails: Vec<f64>,
    pub tail_stderr: Vec<f64>,
    /// Fraction of replicas whose maximum is attained more than once.
    pub duplicate_argmax: f64,
    pub histogram: Histogram,
}

impl TransversalReport {
    pub fn tails_monotone(&self) -> bool {
        self.tails.windows(2).all(|w| w[1] <= w[0])
    }
    pub fn mean_symmetric(&self) -> bool {
        self.mid_mean.abs() < 3.0 * self.mid_mean_stderr
    }
}

pub fn transversal_histogram(ens: &Ensemble) -> Result<TransversalReport, Error> {
    let k = ens.argmax_stats()?;
    let mid = ens.argmax_mid_stats()?;
    let count = k.len() as f64;
    let tails: Vec<f64> =
        TAIL_THRESHOLDS.iter().map(|&t| k.samples().iter().filter(|x| x.abs() > t).count() as f64 / count).collect();
    Ok(TransversalReport {
        manifest: ens.manifest(),
        big_n: ens.config.n,
        n_samples: k.len(),
        mean: k.mean(),
        mean_stderr: k.mean_stderr(),
        mid_mean: mid.mean(),
        mid_mean_stderr: mid.mean_stderr(),
        thresholds: TAIL_THRESHOLDS.to_vec(),
        tail_stderr: tails.iter().map(|p| (p * (1.0 - p) / count).sqrt()).collect(),
        tails,
        duplicate_argmax: ens.replicas.iter().filter(|r| r.maximisers > 1).count() as f64 / count,
        histogram: k.histogram(-3.0, 3.0, 24),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TailComparison {
    pub thresholds: Vec<f64>,
    /// (p_a − p_b)/√(σ_a² + σ_b²) per threshold.
    pub z: Vec<f64>,
}

impl TailComparison {
    pub fn within(&self, k: f64) -> bool {
        self.z.iter().all(|z| z.abs() <= k)
    }
}

pub fn tail_stability(a: &TransversalReport, b: &TransversalReport) -> TailComparison {
    let z = (0..a.tails.len())
        .map(|i| {
            let s = (a.tail_stderr[i].powi(2) + b.tail_stderr[i].powi(2)).sqrt();
            if s == 0.0 {
                0.0
            } else {
                (a.tails[i] - b.tails[i]) / s
            }
        })
        .collect();
    TailComparison { thresholds: a.thresholds.clone(), z }
}
