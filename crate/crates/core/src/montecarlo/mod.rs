//! Seeded ensembles of the homogeneous geometric model and their comparison
//! with the Fredholm / Painlevé predictions.
//!
//! Replica k of an N-ensemble draws from `substream(seed, N·2^40 + k)`, so
//! results do not depend on the worker count or scheduling, and ensembles
//! at different N sharing a seed are independent.

mod reports;
mod stats;

pub use reports::{
    g_point_vs_tw2, gpl_vs_tw1, single_time_vs_exact, tail_stability, transversal_histogram, two_time_exact,
    two_time_vs_airy, CdfReport, ExactCheck, TailComparison, TransversalReport, TwoTimeReport,
};
pub use stats::{wilson, EmpiricalStats, Histogram, Z95};

use crate::lattice::{evolve_png, lpp_table, point_to_line, rsk_shape, ScalingConstants, WeightField};
use crate::rng::{substream, Geometric, RngSeed};
use crate::Error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// G(N, N).
    Point,
    /// max_{|u|<N} G(N+u, N−u).
    PointToLine,
    /// (H_N(0), H_N(τ)) thresholded at (ξ1, ξ2).
    TwoTime { tau: f64, xi1: f64, xi2: f64 },
    /// Leftmost maximiser K_N of the anti-diagonal profile.
    Transversal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: f64,
    pub samples: usize,
    pub seed: RngSeed,
    pub observable: Observable,
    /// ξ values at which CDFs are tabulated.
    pub grid: Vec<f64>,
    /// 0 = rayon default.
    #[serde(default)]
    pub workers: usize,
    /// Cross-check every hundredth replica against the PNG evolution,
    /// the full last-passage table and (N ≤ 32) the RSK shape.
    #[serde(default = "yes")]
    pub canary: bool,
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(n: usize, q: f64, samples: usize, seed: RngSeed, observable: Observable) -> Self {
        let grid = (-8..=8).map(|k| k as f64 * 0.5).collect();
        Self { n, q, samples, seed, observable, grid, workers: 0, canary: true }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.samples < 100 {
            return Err(Error::InvalidParams(format!("need at least 100 samples, got {}", self.samples)));
        }
        if self.n < 4 {
            return Err(Error::InvalidParams(format!("need N ≥ 4, got {}", self.n)));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidParams("evaluation grid is empty".into()));
        }
        if !(0.0..1.0).contains(&self.q) {
            return Err(Error::InvalidParams(format!("q = {} outside [0, 1)", self.q)));
        }
        if let Observable::TwoTime { .. } = self.observable {
            self.second_offset()?;
        }
        Ok(())
    }

    /// u = round(cN^{2/3}τ) for the two-time observable, else 0.
    pub fn second_offset(&self) -> Result<i64, Error> {
        match self.observable {
            Observable::TwoTime { tau, .. } => {
                let u = (ScalingConstants::new(self.q)?.time_scale(self.n) * tau).round() as i64;
                if u.abs() >= self.n as i64 {
                    return Err(Error::OutOfRange(format!("τ = {tau} needs |u| = {} < N = {}", u.abs(), self.n)));
                }
                Ok(u)
            }
            _ => Ok(0),
        }
    }

    /// SHA-256 of the JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Integer summary of one replica.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replica {
    pub point: i64,
    pub line: i64,
    /// G(N+u, N−u) at the two-time offset.
    pub second: i64,
    /// Offset u of the leftmost maximiser.
    pub argmax: i64,
    /// Offset of the rightmost maximiser.
    pub argmax_right: i64,
    /// Number of maximisers (exact integer ties).
    pub maximisers: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub seed: RngSeed,
    pub code_version: String,
    pub config_hash: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ensemble {
    pub config: ExperimentConfig,
    pub replicas: Vec<Replica>,
    pub canaries_checked: usize,
}

impl Ensemble {
    pub fn manifest(&self) -> Manifest {
        Manifest {
            seed: self.config.seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: self.config.hash(),
        }
    }

    fn scaling(&self) -> Result<ScalingConstants, Error> {
        ScalingConstants::new(self.config.q)
    }

    /// Rescaled G(N, N).
    pub fn point_stats(&self) -> Result<EmpiricalStats, Error> {
        let s = self.scaling()?;
        Ok(EmpiricalStats::new(self.replicas.iter().map(|r| s.rescale(r.point as f64, self.config.n)).collect()))
    }

    /// Rescaled G_pl.
    pub fn line_stats(&self) -> Result<EmpiricalStats, Error> {
        let s = self.scaling()?;
        Ok(EmpiricalStats::new(self.replicas.iter().map(|r| s.rescale(r.line as f64, self.config.n)).collect()))
    }

    /// K_N = u*/(cN^{2/3}).
    pub fn argmax_stats(&self) -> Result<EmpiricalStats, Error> {
        let ts = self.scaling()?.time_scale(self.config.n);
        Ok(EmpiricalStats::new(self.replicas.iter().map(|r| r.argmax as f64 / ts).collect()))
    }

    /// Midpoint of the leftmost and rightmost maximisers; symmetric in law
    /// under the reflection u ↦ −u, unlike K_N itself.
    pub fn argmax_mid_stats(&self) -> Result<EmpiricalStats, Error> {
        let ts = self.scaling()?.time_scale(self.config.n);
        Ok(EmpiricalStats::new(
            self.replicas.iter().map(|r| 0.5 * (r.argmax + r.argmax_right) as f64 / ts).collect(),
        ))
    }
}

/// Runs `cfg.samples` replicas on `cfg.workers` threads.
pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<Ensemble, Error> {
    cfg.validate()?;
    let u2 = cfg.second_offset()?;
    let work = || -> Result<Vec<Replica>, Error> {
        (0..cfg.samples as u64).into_par_iter().map(|k| replica(cfg, u2, k)).collect()
    };
    let replicas = if cfg.workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?
            .install(work)?
    };
    let canaries_checked = if cfg.canary { cfg.samples.div_ceil(100) } else { 0 };
    Ok(Ensemble { config: cfg.clone(), replicas, canaries_checked })
}

/// Draws w(i, j) for i + j ≤ 2N in row order (i outer) and feeds each cell
/// to `cell`. Both the sweep and the canary use this order.
fn draw_triangle(n: usize, q: f64, seed: RngSeed, index: u64, mut cell: impl FnMut(usize, usize, i64)) {
    let mut rng = substream(seed, ((n as u64) << 40) | index);
    let g = Geometric::new(q);
    for i in 1..2 * n {
        for j in 1..=2 * n - i {
            cell(i, j, g.sample(&mut rng));
        }
    }
}

/// Anti-diagonal G(N+u, N−u), u = 1−N..N−1, by a single O(N)-memory sweep.
pub fn antidiagonal(n: usize, q: f64, seed: RngSeed, index: u64) -> Vec<i64> {
    let mut g = vec![0i64; 2 * n];
    let mut out = vec![0i64; 2 * n - 1];
    let mut row = 0;
    draw_triangle(n, q, seed, index, |i, j, w| {
        g[j] = g[j].max(g[j - 1]) + w;
        row = i;
        if j == 2 * n - i {
            out[i - 1] = g[j];
        }
    });
    debug_assert_eq!(row, 2 * n - 1);
    out
}

fn replica(cfg: &ExperimentConfig, u2: i64, k: u64) -> Result<Replica, Error> {
    let n = cfg.n;
    let diag = antidiagonal(n, cfg.q, cfg.seed, k);
    if cfg.canary && k % 100 == 0 {
        canary(cfg, k, &diag)?;
    }
    let best = *diag.iter().max().unwrap();
    let first = diag.iter().position(|&h| h == best).unwrap();
    let last = diag.iter().rposition(|&h| h == best).unwrap();
    Ok(Replica {
        point: diag[n - 1],
        line: best,
        second: diag[(u2 + n as i64 - 1) as usize],
        argmax: first as i64 - (n as i64 - 1),
        argmax_right: last as i64 - (n as i64 - 1),
        maximisers: diag.iter().filter(|&&h| h == best).count() as u32,
    })
}

fn canary(cfg: &ExperimentConfig, k: u64, diag: &[i64]) -> Result<(), Error> {
    let n = cfg.n;
    let s = 2 * n - 1;
    let mut field = WeightField::zeros(s, s);
    draw_triangle(n, cfg.q, cfg.seed, k, |i, j, w| field.set(i, j, w));
    let evo = evolve_png(&field, s);
    let table = lpp_table(&field);
    let ni = n as i64;
    for u in (1 - ni)..ni {
        let expect = diag[(u + ni - 1) as usize];
        if evo.h(2 * u, s) != expect || table.g((ni + u) as usize, (ni - u) as usize) != expect {
            return Err(Error::Invariant(format!("replica {k}: height mismatch at u = {u}")));
        }
    }
    if point_to_line(&table, n)? != *diag.iter().max().unwrap() {
        return Err(Error::Invariant(format!("replica {k}: point-to-line mismatch")));
    }
    if n <= 32 && rsk_shape(&field, n, n).part(1) != diag[n - 1] {
        return Err(Error::Invariant(format!("replica {k}: RSK first row differs from G(N,N)")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_count_does_not_matter() {
        let mut cfg = ExperimentConfig::new(6, 0.25, 300, 5, Observable::Point);
        cfg.workers = 1;
        let a = run_ensemble(&cfg).unwrap();
        cfg.workers = 4;
        let b = run_ensemble(&cfg).unwrap();
        assert_eq!(a.replicas, b.replicas);
    }

    #[test]
    fn zero_q_is_deterministic() {
        let cfg = ExperimentConfig::new(5, 0.0, 100, 1, Observable::PointToLine);
        let e = run_ensemble(&cfg).unwrap();
        assert!(e.replicas.iter().all(|r| r.point == 0 && r.line == 0 && r.maximisers == 9));
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::new(3, 0.25, 100, 1, Observable::Point).validate().is_err());
        assert!(ExperimentConfig::new(8, 0.25, 99, 1, Observable::Point).validate().is_err());
        let far = Observable::TwoTime { tau: 50.0, xi1: 0.0, xi2: 0.0 };
        assert!(ExperimentConfig::new(8, 0.25, 100, 1, far).validate().is_err());
    }
}
