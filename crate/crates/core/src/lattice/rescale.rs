use super::growth::HeightEvolution;
use super::params::ScalingConstants;
use crate::Error;

/// H_N on the lattice times t_u = u / (c N^{2/3}), |u| < N, with
/// G(N+u, N−u) = a N + d N^{1/3} H_N(t_u); linear in between.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledPath {
    pub n: usize,
    pub constants: ScalingConstants,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Unrescaled heights, kept for exact tie detection.
    pub heights: Vec<i64>,
}

impl RescaledPath {
    /// `heights[u + N − 1] = G(N+u, N−u)`.
    pub fn from_heights(heights: Vec<i64>, q: f64, n: usize) -> Result<Self, Error> {
        if heights.len() != 2 * n - 1 {
            return Err(Error::Shape(format!("need {} heights, got {}", 2 * n - 1, heights.len())));
        }
        let constants = ScalingConstants::new(q)?;
        let ts = constants.time_scale(n);
        let times = (0..heights.len()).map(|k| (k as f64 - (n as f64 - 1.0)) / ts).collect();
        let values = heights.iter().map(|&g| constants.rescale(g as f64, n)).collect();
        Ok(Self { n, constants, times, values, heights })
    }

    /// Piecewise-linear H_N(t); errors outside the stored window.
    pub fn eval(&self, t: f64) -> Result<f64, Error> {
        let u = t * self.constants.time_scale(self.n) + (self.n as f64 - 1.0);
        let last = (self.values.len() - 1) as f64;
        if !(0.0..=last).contains(&u) {
            return Err(Error::OutOfRange(format!("t = {t} outside the path window")));
        }
        let k = (u.floor() as usize).min(self.values.len() - 1);
        if k + 1 == self.values.len() {
            return Ok(self.values[k]);
        }
        let f = u - k as f64;
        Ok(self.values[k] * (1.0 - f) + self.values[k + 1] * f)
    }

    /// Index of the leftmost maximum.
    pub fn argmax_index(&self) -> usize {
        let best = *self.heights.iter().max().expect("nonempty path");
        self.heights.iter().position(|&h| h == best).unwrap()
    }
}

/// Reads h(2u, 2N−1) = G(N+u, N−u) off a PNG evolution.
pub fn rescale_height(evo: &HeightEvolution, q: f64, n: usize) -> Result<RescaledPath, Error> {
    let t = 2 * n - 1;
    if evo.final_time() < t {
        return Err(Error::Shape(format!("evolution stops before t = {t}")));
    }
    let ni = n as i64;
    let heights = ((1 - ni)..ni).map(|u| evo.h(2 * u, t)).collect();
    RescaledPath::from_heights(heights, q, n)
}

/// K_N: the first (leftmost) grid time where the path attains its maximum.
/// The sup of a piecewise-linear path sits on a grid point.
pub fn transversal_argmax(path: &RescaledPath) -> f64 {
    path.times[path.argmax_index()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centering_and_interpolation() {
        // q = 1/4: a = 2, so G = 2N at N = 8 rescales to 0.
        let p = RescaledPath::from_heights(vec![16; 15], 0.25, 8).unwrap();
        assert!(p.values.iter().all(|v| v.abs() < 1e-15));
        let mut h = vec![16; 15];
        h[8] = 20;
        let p = RescaledPath::from_heights(h, 0.25, 8).unwrap();
        let mid = 0.5 * (p.times[7] + p.times[8]);
        assert!((p.eval(mid).unwrap() - 0.5 * (p.values[7] + p.values[8])).abs() < 1e-14);
        assert_eq!(transversal_argmax(&p), p.times[8]);
    }

    #[test]
    fn argmax_ties_go_left() {
        let p = RescaledPath::from_heights(vec![1, 3, 2, 3, 0], 0.25, 3).unwrap();
        assert_eq!(p.argmax_index(), 1);
        let flat = RescaledPath::from_heights(vec![4; 5], 0.25, 3).unwrap();
        assert_eq!(transversal_argmax(&flat), flat.times[0]);
    }
}
