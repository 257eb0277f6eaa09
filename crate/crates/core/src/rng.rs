//! Seeded, order-independent random streams and the geometric sampler.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type RngSeed = u64;

/// Independent stream for `(seed, index)`: the ChaCha key is SHA-256 of both,
/// so replica `k` draws the same numbers whatever order replicas run in.
pub fn substream(seed: RngSeed, index: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"png-det/substream/v1");
    h.update(seed.to_le_bytes());
    h.update(index.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Uniform draw in (0, 1] with 53 random bits.
#[inline]
pub fn open_unit(rng: &mut impl RngCore) -> f64 {
    1.0 - (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

const TABLE: usize = 8;

/// Inverse-CDF sampler for P[w = m] = (1-p) p^m.
///
/// w = floor(ln U / ln p) is the number of m ≥ 1 with U ≤ p^m; the first few
/// thresholds are compared directly, which skips the logarithm for most draws.
#[derive(Clone, Copy, Debug)]
pub struct Geometric {
    p: f64,
    ln_p: f64,
    powers: [f64; TABLE],
}

impl Geometric {
    pub fn new(p: f64) -> Self {
        assert!((0.0..1.0).contains(&p), "geometric parameter {p} outside [0,1)");
        let mut powers = [0.0; TABLE];
        let mut x = p;
        for slot in powers.iter_mut() {
            *slot = x;
            x *= p;
        }
        Self { p, ln_p: p.ln(), powers }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn sample_with(&self, u: f64) -> i64 {
        for (m, &t) in self.powers.iter().enumerate() {
            if u > t {
                return m as i64;
            }
        }
        ((u.ln() / self.ln_p).floor() as i64).max(TABLE as i64)
    }

    #[inline]
    pub fn sample(&self, rng: &mut impl RngCore) -> i64 {
        if self.p == 0.0 {
            return 0;
        }
        self.sample_with(open_unit(rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_agrees_with_log_formula() {
        let g = Geometric::new(0.25);
        let mut rng = substream(1, 2);
        for _ in 0..100_000 {
            let u = open_unit(&mut rng);
            let direct = (u.ln() / 0.25f64.ln()).floor() as i64;
            assert_eq!(g.sample_with(u), direct, "u = {u}");
        }
    }

    #[test]
    fn streams_differ_and_repeat() {
        let a: Vec<u64> = (0..4).map(|_| substream(7, 0).next_u64()).collect();
        assert!(a.iter().all(|&x| x == a[0]));
        assert_ne!(substream(7, 0).next_u64(), substream(7, 1).next_u64());
        assert_ne!(substream(7, 0).next_u64(), substream(8, 0).next_u64());
    }
}
