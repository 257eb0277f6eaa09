use super::function::airy_unchecked;
use super::kernel::{classic_airy_kernel, lambda_rule, phi_gaussian, positive_cutoff, ExtendedAiryKernelSpec};
use crate::linalg::Matrix;
use crate::quadrature::GaussRule;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FddSpec {
    /// Gauss–Legendre nodes per time slice.
    pub mq: usize,
    /// Each slice is truncated to [ξ_k, ξ_k + L].
    pub l: f64,
    /// Recompute with 2·m_q and fail if the result moves by more than 1e−6.
    pub check_stability: bool,
}

impl Default for FddSpec {
    fn default() -> Self {
        Self { mq: 48, l: 12.0, check_stability: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FddResult {
    pub taus: Vec<f64>,
    pub xis: Vec<f64>,
    pub prob: f64,
    pub mq: usize,
    #[serde(rename = "L")]
    pub l: f64,
    /// Σ_k ∫_{ξ_k+L}^∞ K_Ai(x,x) dx: trace mass of the discarded region.
    pub tail_bound: f64,
    /// |P(m_q) − P(2m_q)| when the stability check ran.
    pub stability: Option<f64>,
}

/// ∫_s^∞ K_Ai(x,x) dx = (2s²Ai² − 2sAi′² − AiAi′)/3.
pub fn airy_trace_tail(s: f64) -> f64 {
    let (a, ap) = airy_unchecked(s);
    (2.0 * s * s * a * a - 2.0 * s * ap * ap - a * ap) / 3.0
}

/// P[A(τ_1) ≤ ξ_1, …, A(τ_m) ≤ ξ_m] = det(I − χ A χ) on ⊕_k L²(ξ_k, ∞).
/// Pairs are sorted by time; equal times are rejected.
pub fn airy_fdd(taus: &[f64], xis: &[f64], spec: &FddSpec) -> Result<FddResult> {
    if taus.len() != xis.len() || taus.is_empty() {
        return Err(Error::Shape(format!("{} times vs {} levels", taus.len(), xis.len())));
    }
    if spec.mq < 30 || spec.l < 8.0 {
        return Err(Error::InvalidParams(format!("need m_q ≥ 30 and L ≥ 8, got {} and {}", spec.mq, spec.l)));
    }
    let mut pairs: Vec<(f64, f64)> = taus.iter().copied().zip(xis.iter().copied()).collect();
    if pairs.iter().any(|(t, x)| !t.is_finite() || !x.is_finite()) {
        return Err(Error::InvalidParams("non-finite time or level".into()));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidParams("times must be distinct".into()));
    }
    if pairs.iter().any(|p| p.1 < -30.0) {
        return Err(Error::OutOfRange("levels below −30 are outside the supported window".into()));
    }
    let (ts, xs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let prob = determinant(&ts, &xs, spec.mq, spec.l);
    let stability = if spec.check_stability {
        let diff = (determinant(&ts, &xs, 2 * spec.mq, spec.l) - prob).abs();
        if diff > 1e-6 {
            return Err(Error::Disagreement(format!("Nyström determinant moved by {diff:e} under m_q → 2m_q")));
        }
        Some(diff)
    } else {
        None
    };
    let tail_bound = xs.iter().map(|&x| airy_trace_tail(x + spec.l)).sum();
    Ok(FddResult { taus: ts, xis: xs, prob, mq: spec.mq, l: spec.l, tail_bound, stability })
}

fn determinant(ts: &[f64], xs: &[f64], mq: usize, l: f64) -> f64 {
    let m = ts.len();
    let rules: Vec<GaussRule> = xs.iter().map(|&x| GaussRule::new(mq, x, x + l)).collect();
    let kspec = ExtendedAiryKernelSpec::default();
    // One λ rule for all off-diagonal blocks, long enough for the fastest growth e^{λ|Δ|}.
    let xi_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let xi_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + l;
    let dmax = ts.last().unwrap() - ts[0];
    let lam = positive_cutoff(-dmax, xi_min, &kspec).0;
    let (lnodes, lweights) = lambda_rule(0.0, lam, (xi_min, xi_max), &kspec);
    // ai[k][i][p] = Ai(x_{k,i} + λ_p)
    let ai: Vec<Vec<Vec<f64>>> = if m > 1 {
        rules
            .par_iter()
            .map(|r| r.nodes.iter().map(|&x| lnodes.iter().map(|&lp| airy_unchecked(x + lp).0).collect()).collect())
            .collect()
    } else {
        Vec::new()
    };
    let n = m * mq;
    let blocks: Vec<((usize, usize), Vec<f64>)> = (0..m * m)
        .into_par_iter()
        .map(|b| {
            let (k, j) = (b / m, b % m);
            let (rk, rj) = (&rules[k], &rules[j]);
            let mut out = vec![0.0; mq * mq];
            for a in 0..mq {
                for c in 0..mq {
                    let (x, y) = (rk.nodes[a], rj.nodes[c]);
                    let kern = if k == j {
                        classic_airy_kernel(x, y)
                    } else {
                        let delta = ts[k] - ts[j];
                        let tilde: f64 = (0..lnodes.len())
                            .map(|p| lweights[p] * (-lnodes[p] * delta).exp() * ai[k][a][p] * ai[j][c][p])
                            .sum();
                        tilde - phi_gaussian(ts[k], ts[j], x, y)
                    };
                    out[a * mq + c] = rk.weights[a].sqrt() * kern * rj.weights[c].sqrt();
                }
            }
            ((k, j), out)
        })
        .collect();
    let mut mat = Matrix::<f64>::identity(n);
    for ((k, j), out) in blocks {
        for a in 0..mq {
            for c in 0..mq {
                mat[(k * mq + a, j * mq + c)] -= out[a * mq + c];
            }
        }
    }
    mat.det()
}

/// F₂(ξ) as the one-time Nyström determinant.
pub fn tw2_nystrom(xi: f64) -> Result<f64> {
    Ok(airy_fdd(&[0.0], &[xi], &FddSpec::default())?.prob)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_second_level() {
        let one = tw2_nystrom(-1.0).unwrap();
        let two = airy_fdd(&[0.0, 1.0], &[-1.0, 12.0], &FddSpec::default()).unwrap().prob;
        assert!((one - two).abs() < 1e-6);
    }

    #[test]
    fn stationarity_and_ordering() {
        let s = FddSpec::default();
        let a = airy_fdd(&[0.0, 1.0], &[0.0, 1.0], &s).unwrap().prob;
        let b = airy_fdd(&[3.0, 4.0], &[0.0, 1.0], &s).unwrap().prob;
        let c = airy_fdd(&[4.0, 3.0], &[1.0, 0.0], &s).unwrap().prob;
        assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-15);
        assert!((a - 0.96756163).abs() < 1e-7, "{a}");
        assert!(airy_fdd(&[1.0, 1.0], &[0.0, 0.0], &s).is_err());
    }

    #[test]
    fn self_convergence() {
        let r = airy_fdd(&[0.0, 0.5], &[-1.0, 0.0], &FddSpec { check_stability: true, ..FddSpec::default() }).unwrap();
        assert!(r.stability.unwrap() < 1e-6 && r.tail_bound < 1e-12);
    }
}
