use crate::{Error, Result};
use std::f64::consts::PI;

/// Maclaurin series (in double-double) up to here, asymptotic expansions beyond.
pub const SERIES_LIMIT: f64 = 8.5;

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let u = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(u.hi, u.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = q1 * d;
        let e = q1.mul_add(d, -p);
        let r = (self.hi - p - e + self.lo) / d;
        quick_two_sum(q1, r)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

const AI0: Dd = Dd { hi: 0.355_028_053_887_817_2, lo: 2.052_336_324_362_12e-17 };
// −Ai′(0)
const AIP0: Dd = Dd { hi: 0.258_819_403_792_806_8, lo: -2.522_243_111_610_832e-17 };

fn series(x: f64) -> (f64, f64) {
    let x2 = Dd::new(x).mul(Dd::new(x));
    let x3 = x2.mul(Dd::new(x));
    let (mut f, mut g, mut fp, mut gp) = (Dd::new(1.0), Dd::new(x), x2.div_f64(2.0), Dd::new(1.0));
    let (mut t, mut s, mut u, mut v) = (Dd::new(1.0), Dd::new(x), x2.div_f64(2.0), Dd::new(1.0));
    for k in 0..200usize {
        let kf = k as f64;
        t = t.mul(x3).div_f64((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        s = s.mul(x3).div_f64((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        v = v.mul(x3).div_f64((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        if k >= 1 {
            u = u.mul(x3).div_f64(3.0 * kf * (3.0 * kf + 2.0));
            fp = fp.add(u);
        }
        f = f.add(t);
        g = g.add(s);
        gp = gp.add(v);
        let small = |term: Dd, sum: Dd| term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300);
        if k > 4 && small(t, f) && small(s, g) && small(u, fp) && small(v, gp) {
            break;
        }
    }
    let ai = AI0.mul(f).add(AIP0.mul(g).neg());
    let aip = AI0.mul(fp).add(AIP0.mul(gp).neg());
    (ai.to_f64(), aip.to_f64())
}

/// Coefficients u_k, v_k of the large-argument expansions.
fn uv(k: usize) -> (f64, f64) {
    let mut u = 1.0;
    for j in 1..=k {
        let jf = j as f64;
        u *= (6.0 * jf - 5.0) * (6.0 * jf - 3.0) * (6.0 * jf - 1.0) / ((2.0 * jf - 1.0) * 216.0 * jf);
    }
    let kf = k as f64;
    (u, -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u)
}

/// Σ_k (−1)^k c_k / ζ^k summed to the smallest term.
fn asymptotic_sum(zeta: f64, pick: impl Fn(usize) -> f64, step: usize, offset: usize) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for j in 0..60 {
        let k = step * j + offset;
        let term = pick(k) / zeta.powi(k as i32) * if j % 2 == 0 { 1.0 } else { -1.0 };
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn asymptotic(x: f64) -> (f64, f64) {
    let sqpi = PI.sqrt();
    if x > 0.0 {
        let zeta = 2.0 / 3.0 * x.powf(1.5);
        if zeta > 700.0 {
            return (0.0, 0.0);
        }
        let e = (-zeta).exp();
        let su = asymptotic_sum(zeta, |k| uv(k).0, 1, 0);
        let sv = asymptotic_sum(zeta, |k| uv(k).1, 1, 0);
        let q = x.powf(0.25);
        (e / (2.0 * sqpi * q) * su, -q * e / (2.0 * sqpi) * sv)
    } else {
        let t = -x;
        let zeta = 2.0 / 3.0 * t.powf(1.5);
        let (s, c) = (zeta - PI / 4.0).sin_cos();
        let u_even = asymptotic_sum(zeta, |k| uv(k).0, 2, 0);
        let u_odd = asymptotic_sum(zeta, |k| uv(k).0, 2, 1);
        let v_even = asymptotic_sum(zeta, |k| uv(k).1, 2, 0);
        let v_odd = asymptotic_sum(zeta, |k| uv(k).1, 2, 1);
        let q = t.powf(0.25);
        ((c * u_even + s * u_odd) / (sqpi * q), q / sqpi * (s * v_even - c * v_odd))
    }
}

/// (Ai(x), Ai′(x)) for |x| ≤ 200.
pub fn airy_fn(x: f64) -> Result<(f64, f64)> {
    if !(x.abs() <= 200.0) {
        return Err(Error::OutOfRange(format!("Airy argument {x} outside [−200, 200]")));
    }
    Ok(airy_unchecked(x))
}

/// Ai and Ai′ without the range check; x > 200 returns (0, 0).
pub fn airy_unchecked(x: f64) -> (f64, f64) {
    if x.abs() <= SERIES_LIMIT {
        series(x)
    } else {
        asymptotic(x)
    }
}

pub fn ai(x: f64) -> f64 {
    airy_unchecked(x).0
}

/// ∫_s^∞ Ai(x)² dx = Ai′(s)² − s Ai(s)².
pub fn airy_square_tail(s: f64) -> f64 {
    let (a, ap) = airy_unchecked(s);
    ap * ap - s * a * a
}

/// ∫_s^∞ x Ai(x)² dx.
pub fn airy_moment_tail(s: f64) -> f64 {
    let (a, ap) = airy_unchecked(s);
    -(s * s * a * a - s * ap * ap + a * ap) / 3.0
}
