use serde::Serialize;

/// Sorted samples with the empirical CDF and comparison helpers.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalStats {
    sorted: Vec<f64>,
}

/// z for a two-sided 95% interval.
pub const Z95: f64 = 1.959963984540054;

impl EmpiricalStats {
    pub fn new(mut samples: Vec<f64>) -> Self {
        assert!(samples.iter().all(|x| !x.is_nan()), "NaN sample");
        samples.sort_by(f64::total_cmp);
        Self { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }
    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// F_n(x) = #{X_i ≤ x}/n.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    /// √(F_n(1−F_n)/n).
    pub fn cdf_stderr(&self, x: f64) -> f64 {
        let p = self.cdf(x);
        (p * (1.0 - p) / self.len() as f64).sqrt()
    }

    /// 95% Wilson score interval for F(x).
    pub fn cdf_ci(&self, x: f64) -> (f64, f64) {
        wilson(self.cdf(x), self.len())
    }

    /// sup_x |F_n(x) − F(x)| for a continuous reference F, checking both
    /// sides of every jump (ties allowed).
    pub fn ks(&self, mut reference: impl FnMut(f64) -> f64) -> f64 {
        let n = self.len() as f64;
        let mut d = 0.0f64;
        let mut i = 0;
        while i < self.sorted.len() {
            let v = self.sorted[i];
            let mut j = i;
            while j < self.sorted.len() && self.sorted[j] == v {
                j += 1;
            }
            let f = reference(v);
            d = d.max((i as f64 / n - f).abs()).max((j as f64 / n - f).abs());
            i = j;
        }
        d
    }

    /// max over attained values v of |F_n(v) − F(v)|: the lattice-support
    /// distance, blind to the jumps of a discrete law.
    pub fn ks_support(&self, mut reference: impl FnMut(f64) -> f64) -> f64 {
        let n = self.len() as f64;
        let mut d = 0.0f64;
        let mut i = 0;
        while i < self.sorted.len() {
            let v = self.sorted[i];
            let j = self.sorted.partition_point(|&s| s <= v);
            d = d.max((j as f64 / n - reference(v)).abs());
            i = j;
        }
        d
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.len() as f64
    }

    /// Standard error of the mean.
    pub fn mean_stderr(&self) -> f64 {
        let m = self.mean();
        let n = self.len() as f64;
        let var = self.sorted.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }

    /// Counts over `bins` equal cells on [lo, hi); outside values are
    /// counted separately as (below, above).
    pub fn histogram(&self, lo: f64, hi: f64, bins: usize) -> Histogram {
        let mut counts = vec![0usize; bins];
        let (mut below, mut above) = (0, 0);
        let w = (hi - lo) / bins as f64;
        for &x in &self.sorted {
            if x < lo {
                below += 1;
            } else if x >= hi {
                above += 1;
            } else {
                counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
            }
        }
        Histogram { lo, hi, counts, below, above }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
    pub below: usize,
    pub above: usize,
}

/// 95% Wilson interval for a binomial proportion.
pub fn wilson(p: f64, n: usize) -> (f64, f64) {
    let n = n as f64;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_quantiles() {
        // Samples at the midpoints of n equal cells: KS vs uniform is 1/(2n).
        let s = EmpiricalStats::new((0..10).map(|i| (i as f64 + 0.5) / 10.0).collect());
        assert!((s.ks(|x| x.clamp(0.0, 1.0)) - 0.05).abs() < 1e-15);
        // All mass on one point: the jump dominates.
        let t = EmpiricalStats::new(vec![0.5; 4]);
        assert!((t.ks(|x| x) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cdf_is_a_cdf() {
        let s = EmpiricalStats::new(vec![3.0, 1.0, 2.0, 2.0]);
        assert_eq!(s.cdf(0.0), 0.0);
        assert_eq!(s.cdf(2.0), 0.75);
        assert_eq!(s.cdf(3.0), 1.0);
        let (lo, hi) = s.cdf_ci(2.0);
        assert!(lo < 0.75 && 0.75 < hi);
        let h = s.histogram(1.0, 3.0, 2);
        assert_eq!((h.counts.clone(), h.below, h.above), (vec![1, 2], 0, 1));
    }
}
