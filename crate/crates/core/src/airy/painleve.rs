use super::fdd::tw2_nystrom;
use super::function::{airy_moment_tail, airy_square_tail, airy_unchecked};
use crate::quadrature::GaussRule;
use crate::{Error, Result};
use std::sync::OnceLock;

/// (q, q′, ∫_x^∞ q², ∫_x^∞ t q², ∫_x^∞ q)
pub type State = [f64; 5];

const RTOL: f64 = 1e-13;
const ATOL: f64 = 1e-30;

fn rhs(x: f64, y: &State) -> State {
    let q = y[0];
    [y[1], x * q + 2.0 * q * q * q, -q * q, -x * q * q, -q]
}

fn axpy(y: &State, h: f64, ks: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in ks {
        for i in 0..5 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince 5(4) step: (5th-order solution, error estimate).
fn dp_step(x: f64, y: &State, h: f64) -> (State, f64) {
    let k1 = rhs(x, y);
    let k2 = rhs(x + h / 5.0, &axpy(y, h, &[(1.0 / 5.0, &k1)]));
    let k3 = rhs(x + 0.3 * h, &axpy(y, h, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]));
    let k4 = rhs(x + 0.8 * h, &axpy(y, h, &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]));
    let k5 = rhs(
        x + 8.0 / 9.0 * h,
        &axpy(y, h, &[(19372.0 / 6561.0, &k1), (-25360.0 / 2187.0, &k2), (64448.0 / 6561.0, &k3), (-212.0 / 729.0, &k4)]),
    );
    let k6 = rhs(
        x + h,
        &axpy(
            y,
            h,
            &[(9017.0 / 3168.0, &k1), (-355.0 / 33.0, &k2), (46732.0 / 5247.0, &k3), (49.0 / 176.0, &k4), (-5103.0 / 18656.0, &k5)],
        ),
    );
    let y5 = axpy(
        y,
        h,
        &[(35.0 / 384.0, &k1), (500.0 / 1113.0, &k3), (125.0 / 192.0, &k4), (-2187.0 / 6784.0, &k5), (11.0 / 84.0, &k6)],
    );
    let k7 = rhs(x + h, &y5);
    let y4 = axpy(
        y,
        h,
        &[
            (5179.0 / 57600.0, &k1),
            (7571.0 / 16695.0, &k3),
            (393.0 / 640.0, &k4),
            (-92097.0 / 339200.0, &k5),
            (187.0 / 2100.0, &k6),
            (1.0 / 40.0, &k7),
        ],
    );
    let err = (0..5)
        .map(|i| (y5[i] - y4[i]).abs() / (ATOL + RTOL * y[i].abs().max(y5[i].abs())))
        .fold(0.0, f64::max);
    (y5, err)
}

/// Adaptive integration from x0 to x1 (either direction); every accepted
/// point is passed to `visit`.
fn integrate(x0: f64, y0: State, x1: f64, h0: f64, mut visit: impl FnMut(f64, &State)) -> Result<State> {
    let dir = (x1 - x0).signum();
    let (mut x, mut y) = (x0, y0);
    let mut h = h0.abs().min((x1 - x0).abs()) * dir;
    if h == 0.0 {
        return Ok(y);
    }
    let mut steps = 0usize;
    while (x1 - x) * dir > 0.0 {
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        let (yn, err) = dp_step(x, &y, h);
        if err <= 1.0 {
            x += h;
            y = yn;
            if !(0.0..=10.0).contains(&y[0]) || !y[0].is_finite() {
                return Err(Error::Invariant(format!("Painlevé solution left [0, 10]: q({x:.6}) = {:e}", y[0])));
            }
            visit(x, &y);
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        steps += 1;
        if steps > 1_000_000 || h.abs() < 1e-14 {
            return Err(Error::Quadrature(format!("Painlevé integration stalled near x = {x}")));
        }
    }
    Ok(y)
}

/// State at x ≥ 8, where q = Ai to within O(Ai³).
fn airy_state(x: f64) -> State {
    let (a, ap) = airy_unchecked(x);
    let j = GaussRule::composite(16, x, x + 30.0, 1.0).integrate(|t| airy_unchecked(t).0);
    [a, ap, airy_square_tail(x), airy_moment_tail(x), j]
}

/// Hastings–McLeod solution of q″ = xq + 2q³, q ~ Ai at +∞, tabulated on
/// [x_min, x_max] together with the integrals behind F₂ and F₁.
#[derive(Clone, Debug)]
pub struct TwTables {
    pub x_min: f64,
    pub x_max: f64,
    xs: Vec<f64>,
    states: Vec<State>,
}

pub fn painleve_hastings_mcleod(x_min: f64, x_max: f64) -> Result<TwTables> {
    if x_max < 8.0 || x_min >= x_max {
        return Err(Error::InvalidParams(format!("need x_max ≥ 8 and x_min < x_max, got [{x_min}, {x_max}]")));
    }
    let mut xs = vec![x_max];
    let mut states = vec![airy_state(x_max)];
    integrate(x_max, states[0], x_min, 0.01, |x, y| {
        xs.push(x);
        states.push(*y);
    })?;
    Ok(TwTables { x_min, x_max, xs, states })
}

impl TwTables {
    /// The shared table on [−8, 8]. Integrating from +∞ towards −∞ amplifies
    /// rounding along the unstable direction; below −8 the solution drifts off
    /// the Hastings–McLeod branch in double precision.
    pub fn standard() -> &'static TwTables {
        static TABLE: OnceLock<TwTables> = OnceLock::new();
        TABLE.get_or_init(|| painleve_hastings_mcleod(-8.0, 8.0).expect("Hastings–McLeod table"))
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Accepted grid points and q values, for export.
    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().zip(&self.states).map(|(&x, s)| (x, s[0]))
    }

    /// State at x, re-integrating from the nearest tabulated point above.
    pub fn state(&self, x: f64) -> Result<State> {
        if x < self.x_min {
            return Err(Error::OutOfRange(format!("{x} below the Painlevé table start {}", self.x_min)));
        }
        if x >= self.x_max {
            return Ok(airy_state(x));
        }
        // xs is decreasing; take the last point with xs[i] ≥ x.
        let i = self.xs.partition_point(|&t| t >= x) - 1;
        if self.xs[i] == x {
            return Ok(self.states[i]);
        }
        integrate(self.xs[i], self.states[i], x, 0.01, |_, _| {})
    }

    pub fn q(&self, x: f64) -> Result<f64> {
        Ok(self.state(x)?[0])
    }

    fn ln_f2(&self, xi: f64) -> Result<f64> {
        if xi < self.x_min {
            // ln F₂ ≈ −|ξ|³/12 − ln|ξ|/8 + const, matched at the table edge.
            let tail = |x: f64| -x.abs().powi(3) / 12.0 - x.abs().ln() / 8.0;
            return Ok(self.ln_f2(self.x_min)? + tail(xi) - tail(self.x_min));
        }
        let s = self.state(xi)?;
        Ok(-(s[3] - xi * s[2]))
    }

    fn ln_f1(&self, xi: f64) -> Result<f64> {
        if xi < self.x_min {
            // ln F₁ ≈ −|ξ|³/24 − |ξ|^{3/2}/(3√2) − ln|ξ|/16 + const.
            let tail = |x: f64| {
                let a = x.abs();
                -a.powi(3) / 24.0 - a.powf(1.5) / (3.0 * 2f64.sqrt()) - a.ln() / 16.0
            };
            return Ok(self.ln_f1(self.x_min)? + tail(xi) - tail(self.x_min));
        }
        let s = self.state(xi)?;
        Ok(-0.5 * (s[3] - xi * s[2]) - 0.5 * s[4])
    }

    /// F₂(ξ) = exp(−∫_ξ^∞ (x−ξ) q² dx); left-tail asymptotics below the table.
    pub fn f2(&self, xi: f64) -> Result<f64> {
        Ok(self.ln_f2(xi)?.exp())
    }

    /// F₁(ξ) = F₂(ξ)^{1/2} exp(−½ ∫_ξ^∞ q dx); left-tail asymptotics below the table.
    pub fn f1(&self, xi: f64) -> Result<f64> {
        Ok(self.ln_f1(xi)?.exp())
    }
}

fn check_range(xi: f64) -> Result<()> {
    if !(-10.0..=10.0).contains(&xi) {
        return Err(Error::OutOfRange(format!("ξ = {xi} outside [−10, 10]")));
    }
    Ok(())
}

/// F₂(ξ) from the Painlevé table, cross-checked against the Nyström determinant.
pub fn tw2(xi: f64) -> Result<f64> {
    check_range(xi)?;
    let p = TwTables::standard().f2(xi)?;
    let n = tw2_nystrom(xi)?;
    if (p - n).abs() > 1e-6 {
        return Err(Error::Disagreement(format!("F₂({xi}): Painlevé {p} vs Nyström {n}")));
    }
    Ok(p)
}

pub fn tw1(xi: f64) -> Result<f64> {
    check_range(xi)?;
    TwTables::standard().f1(xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_behaviour_and_positivity() {
        let t = TwTables::standard();
        assert!((t.q(6.0).unwrap() - airy_unchecked(6.0).0).abs() < 1e-8);
        assert!(t.grid().all(|(_, q)| q > 0.0));
    }

    #[test]
    fn step_halving_stability() {
        let coarse = TwTables::standard().q(0.0).unwrap();
        let fine = {
            let mut y = airy_state(8.0);
            let mut x = 8.0;
            while x > 0.0 {
                y = integrate(x, y, x - 0.25, 0.001, |_, _| {}).unwrap();
                x -= 0.25;
            }
            y[0]
        };
        assert!((coarse - fine).abs() < 1e-9, "{coarse} {fine}");
    }

    #[test]
    fn distribution_shape() {
        let t = TwTables::standard();
        assert!(t.f2(8.0).unwrap() > 1.0 - 1e-8);
        assert!(t.f1(8.0).unwrap() > 1.0 - 1e-6);
        let mut prev = 0.0;
        for i in -100..=100 {
            let xi = i as f64 * 0.1;
            let (f1, f2) = (t.f1(xi).unwrap(), t.f2(xi).unwrap());
            assert!(f2 >= prev && f1 * f1 <= f2 * (1.0 + 1e-15));
            prev = f2;
        }
        assert!((t.f2(0.0).unwrap() - 0.969_372_828_355_26).abs() < 1e-10);
        assert!((t.f1(0.0).unwrap() - 0.831_908_066_202_95).abs() < 1e-10);
        assert!(t.f2(-9.0).unwrap() < t.f2(-8.0).unwrap() && t.f2(-10.0).unwrap() > 0.0);
    }

    #[test]
    fn painleve_agrees_with_nystrom() {
        for xi in [-4.0, -2.0, 0.0, 2.0] {
            tw2(xi).unwrap();
        }
        assert!(tw1(11.0).is_err());
    }
}
