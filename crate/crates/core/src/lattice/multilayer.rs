use super::field::WeightField;
use super::growth::{evolve_png, HeightEvolution};
use super::{cell_of, point_of};
use crate::Error;

/// Tω(x, t) = min(η⁺(x+1, t−1), η⁻(x−1, t−1)): the overflow when two
/// plateaus of the PNG driven by ω collide.
pub fn t_operator(field: &WeightField) -> WeightField {
    let evo = evolve_png(field, field.max_time().max(0) as usize);
    t_from_evolution(field, &evo, field.max_time())
}

/// Tω at the cells with t ≤ `t_max`; needs `evo` up to time `t_max − 1`.
fn t_from_evolution(field: &WeightField, evo: &HeightEvolution, t_max: i64) -> WeightField {
    let mut out = WeightField::zeros(field.width(), field.height());
    for i in 1..=field.width() {
        for j in 1..=field.height() {
            let (x, t) = point_of(i as i64, j as i64);
            if t < 1 || t > t_max {
                continue;
            }
            let s = (t - 1) as usize;
            let up = evo.h(x + 1, s) - evo.h(x, s);
            let down = evo.h(x - 1, s) - evo.h(x, s);
            let v = up.min(down);
            if v > 0 {
                out.set(i, j, v);
            }
        }
    }
    out
}

/// Exponents of a_1..a_{2N} and b_1..b_{2N}; index 0 unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelLedger {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl LabelLedger {
    fn new(n: usize) -> Self {
        Self { a: vec![0; 2 * n + 1], b: vec![0; 2 * n + 1] }
    }
}

/// Exponent vector of ∏_{i+j≤2N} (a_i b_j)^{w(i,j)}.
pub fn field_ledger(field: &WeightField, n: usize) -> LabelLedger {
    let mut l = LabelLedger::new(n);
    for i in 1..2 * n {
        for j in 1..=(2 * n - i) {
            let w = field.get(i as i64, j as i64);
            l.a[i] += w;
            l.b[j] += w;
        }
    }
    l
}

/// Nonintersecting curves h_k(x, 2N−1), 0 ≤ k < N, x ∈ [−(2N−1), 2N−1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiLayerConfig {
    n: usize,
    curves: Vec<Vec<i64>>,
    pub ledger: LabelLedger,
}

impl MultiLayerConfig {
    /// Builds a configuration from raw curves (`curves[k][x + 2N − 1]`),
    /// recomputing the ledger from the jumps.
    pub fn from_curves(n: usize, curves: Vec<Vec<i64>>) -> Result<Self, Error> {
        if n == 0 || curves.len() != n || curves.iter().any(|c| c.len() != 4 * n - 1) {
            return Err(Error::Shape(format!("expected {n} curves of length {}", 4 * n - 1)));
        }
        let mut cfg = Self { n, curves, ledger: LabelLedger::new(n) };
        cfg.ledger = cfg.jump_ledger();
        Ok(cfg)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// h_k(x, 2N−1); layers k ≥ N are flat at −k, and h_k = −k off the window.
    pub fn h(&self, k: usize, x: i64) -> i64 {
        let m = 2 * self.n as i64 - 1;
        if k >= self.n || x.abs() > m {
            -(k as i64)
        } else {
            self.curves[k][(x + m) as usize]
        }
    }

    pub fn curves(&self) -> &[Vec<i64>] {
        &self.curves
    }

    /// η⁺_k(2m, 2N−1) carries a_{m+N}; η⁻_k(2m, 2N−1) carries b_{N−m}.
    fn jump_ledger(&self) -> LabelLedger {
        let n = self.n as i64;
        let mut l = LabelLedger::new(self.n);
        for k in 0..self.n {
            for m in (1 - n)..n {
                let x = 2 * m;
                l.a[(m + n) as usize] += self.h(k, x) - self.h(k, x - 1);
                l.b[(n - m) as usize] += self.h(k, x) - self.h(k, x + 1);
            }
        }
        l
    }
}

/// Layer k is the PNG driven by T^k ω, started from the flat level −k.
pub fn multilayer(field: &WeightField, n: usize) -> MultiLayerConfig {
    assert!(n >= 1);
    let t_final = 2 * n - 1;
    let m = t_final as i64;
    let mut omega = field.triangle(n);
    let mut curves = Vec::with_capacity(n);
    for k in 0..n {
        let evo = evolve_png(&omega, t_final);
        curves.push((-m..=m).map(|x| evo.h(x, t_final) - k as i64).collect());
        omega = t_from_evolution(&omega, &evo, t_final as i64);
    }
    // T^N ω vanishes on i + j ≤ 2N, so no deeper layer ever moves.
    assert!(omega.is_zero(), "T^N w nonzero on the triangle");
    let mut cfg = MultiLayerConfig { n, curves, ledger: LabelLedger::new(n) };
    cfg.ledger = cfg.jump_ledger();
    cfg
}

/// Boundary values and the strict interlacing of adjacent layers:
/// h_{k+1}(x) < h_k(x−1) at even x and h_{k+1}(x−1) < h_k(x) at odd x.
pub fn check_nonintersection(cfg: &MultiLayerConfig) -> Result<(), Error> {
    let m = 2 * cfg.n as i64 - 1;
    for k in 0..cfg.n {
        for x in [-m, m] {
            if cfg.h(k, x) != -(k as i64) {
                return Err(Error::Invariant(format!("h_{k}({x}) != -{k}")));
            }
        }
        for x in -m..=m {
            let (lo, hi) = if x.rem_euclid(2) == 0 {
                (cfg.h(k + 1, x), cfg.h(k, x - 1))
            } else {
                (cfg.h(k + 1, x - 1), cfg.h(k, x))
            };
            if lo >= hi {
                return Err(Error::Invariant(format!("layers {k} and {} touch at x = {x}", k + 1)));
            }
        }
    }
    Ok(())
}

/// Inverts [`multilayer`]: walks time backwards from 2N−1, peeling off at each
/// site the weight ω_k = min(η⁺_k, η⁻_k) and restoring the earlier jumps
/// η⁺_k(x+1, t−1) = η⁺_k(x, t) − ω_k(x, t) + ω_{k+1}(x, t) and the mirror
/// formula for η⁻_k(x−1, t−1), where ω_{k+1} = Tω_k.
pub fn reconstruct_weights(cfg: &MultiLayerConfig) -> Result<WeightField, Error> {
    check_nonintersection(cfg)?;
    let n = cfg.n;
    let t_final = 2 * n - 1;
    let span = 2 * t_final + 5;
    let off = t_final as i64 + 2;
    let idx = |x: i64| (x + off) as usize;
    // plus[k][idx(x)] = η⁺_k(x, t) at the current t (entries with t − x odd).
    let mut plus = vec![vec![0i64; span]; n];
    let mut minus = vec![vec![0i64; span]; n];
    let tf = t_final as i64;
    for k in 0..n {
        let mut x = -tf - 1;
        while x <= tf + 1 {
            plus[k][idx(x)] = cfg.h(k, x) - cfg.h(k, x - 1);
            minus[k][idx(x)] = cfg.h(k, x) - cfg.h(k, x + 1);
            x += 2;
        }
    }
    let mut out = WeightField::zeros(t_final, t_final);
    let mut omega = vec![vec![0i64; span]; n + 1];
    for t in (1..=tf).rev() {
        for k in 0..n {
            for edge in [-t - 1, t + 1] {
                if plus[k][idx(edge)] != 0 || minus[k][idx(edge)] != 0 {
                    return Err(Error::Invariant(format!("layer {k} has a jump outside the light cone at t = {t}")));
                }
            }
        }
        for row in omega.iter_mut() {
            row.iter_mut().for_each(|v| *v = 0);
        }
        let sites: Vec<i64> = (0..t).map(|k| -t + 1 + 2 * k).collect();
        for k in 0..n {
            for &x in &sites {
                omega[k][idx(x)] = plus[k][idx(x)].min(minus[k][idx(x)]);
            }
        }
        let mut new_plus = vec![vec![0i64; span]; n];
        let mut new_minus = vec![vec![0i64; span]; n];
        for k in 0..n {
            for &x in &sites {
                let (wk, wk1) = (omega[k][idx(x)], omega[k + 1][idx(x)]);
                let p = plus[k][idx(x)] - wk + wk1;
                let q = minus[k][idx(x)] - wk + wk1;
                if p < 0 || q < 0 {
                    return Err(Error::Invariant(format!(
                        "inverse recursion produced a negative jump in layer {k} at ({x}, {t})"
                    )));
                }
                new_plus[k][idx(x + 1)] = p;
                new_minus[k][idx(x - 1)] = q;
            }
        }
        for &x in &sites {
            let w = omega[0][idx(x)];
            if w > 0 {
                let (i, j) = cell_of(x, t).expect("odd site");
                out.set(i as usize, j as usize, w);
            }
        }
        plus = new_plus;
        minus = new_minus;
    }
    if plus.iter().chain(&minus).flatten().any(|&v| v != 0) {
        return Err(Error::Invariant("configuration does not unwind to a flat initial state".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_of_single_weight_vanishes() {
        let f = WeightField::from_rows(&[vec![5, 0], vec![0, 0]]).unwrap();
        assert!(t_operator(&f).is_zero());
    }

    #[test]
    fn t_of_ones() {
        let f = WeightField::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        let t = t_operator(&f);
        assert_eq!(t.rows(), vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn flat_config_for_zero_field() {
        let cfg = multilayer(&WeightField::zeros(3, 3), 2);
        for k in 0..2 {
            assert!(cfg.curves()[k].iter().all(|&h| h == -(k as i64)));
        }
        assert!(reconstruct_weights(&cfg).unwrap().is_zero());
    }

    #[test]
    fn single_weight_layers() {
        let f = WeightField::from_rows(&[vec![3]]).unwrap();
        let cfg = multilayer(&f, 2);
        assert_eq!(cfg.h(0, 0), 3);
        assert!(cfg.curves()[1].iter().all(|&h| h == -1));
    }

    #[test]
    fn corrupted_config_rejected() {
        let f = WeightField::from_rows(&[vec![1, 2], vec![2, 1]]).unwrap();
        let cfg = multilayer(&f, 2);
        let mut curves = cfg.curves().to_vec();
        curves[1][3] = curves[0][2]; // h_1(0) pushed onto h_0(−1)
        let bad = MultiLayerConfig::from_curves(2, curves).unwrap();
        assert!(check_nonintersection(&bad).is_err());
        assert!(reconstruct_weights(&bad).is_err());
    }
}
