use super::params::GeomParams;
use crate::rng::{substream, Geometric, RngSeed};
use crate::Error;

/// Nonnegative integer weights w(i, j), 1 ≤ i ≤ I, 1 ≤ j ≤ J; zero elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightField {
    width: usize,
    height: usize,
    w: Vec<i64>,
}

impl WeightField {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, w: vec![0; width * height] }
    }

    /// `rows[i-1][j-1] = w(i, j)`.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, Error> {
        let width = rows.len();
        let height = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != height) {
            return Err(Error::Shape("ragged weight rows".into()));
        }
        if rows.iter().flatten().any(|&x| x < 0) {
            return Err(Error::InvalidParams("weights must be nonnegative".into()));
        }
        Ok(Self { width, height, w: rows.concat() })
    }

    /// I: range of the first index.
    pub fn width(&self) -> usize {
        self.width
    }
    /// J: range of the second index.
    pub fn height(&self) -> usize {
        self.height
    }

    /// w(i, j), zero outside the stored rectangle.
    #[inline]
    pub fn get(&self, i: i64, j: i64) -> i64 {
        if i < 1 || j < 1 || i as usize > self.width || j as usize > self.height {
            0
        } else {
            self.w[(i as usize - 1) * self.height + j as usize - 1]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        assert!(v >= 0, "negative weight");
        assert!((1..=self.width).contains(&i) && (1..=self.height).contains(&j));
        self.w[(i - 1) * self.height + j - 1] = v;
    }

    /// ω(x, t) under the coordinate map; zero for t − x even.
    #[inline]
    pub fn omega(&self, x: i64, t: i64) -> i64 {
        match super::cell_of(x, t) {
            Some((i, j)) => self.get(i, j),
            None => 0,
        }
    }

    /// Largest time carrying a possibly nonzero weight.
    pub fn max_time(&self) -> i64 {
        (self.width + self.height) as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    pub fn total(&self) -> i64 {
        self.w.iter().sum()
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.w.chunks(self.height.max(1)).map(<[i64]>::to_vec).collect()
    }

    /// Copy of the cells with i + j ≤ 2N into a (2N−1) × (2N−1) field.
    pub fn triangle(&self, n: usize) -> Self {
        let s = 2 * n - 1;
        let mut out = Self::zeros(s, s);
        for i in 1..=s {
            for j in 1..=(2 * n - i) {
                out.w[(i - 1) * s + j - 1] = self.get(i as i64, j as i64);
            }
        }
        out
    }

    /// CSV: two comment lines ("# I J q seed" and their values), then row i holds w(i, 1..J).
    pub fn to_csv(&self, q: Option<f64>, seed: Option<RngSeed>) -> String {
        let mut s = String::from("# I J q seed\n");
        let fmt_q = q.map_or("NA".to_string(), |v| v.to_string());
        let fmt_s = seed.map_or("NA".to_string(), |v| v.to_string());
        s.push_str(&format!("# {} {} {} {}\n", self.width, self.height, fmt_q, fmt_s));
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, Error> {
        let rows: Result<Vec<Vec<i64>>, _> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split(',').map(|v| v.trim().parse::<i64>()).collect())
            .collect();
        let rows = rows.map_err(|e| Error::InvalidParams(format!("weight CSV: {e}")))?;
        Self::from_rows(&rows)
    }
}

/// I × J field of independent geometric weights; cells are drawn row by row
/// from the stream `(seed, 0)`.
pub fn sample_weight_field(
    params: &GeomParams,
    width: usize,
    height: usize,
    seed: RngSeed,
) -> Result<WeightField, Error> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParams("field dimensions must be positive".into()));
    }
    params.check_covers(width, height)?;
    let mut rng = substream(seed, 0);
    let mut field = WeightField::zeros(width, height);
    for i in 1..=width {
        for j in 1..=height {
            let g = Geometric::new(params.a(i) * params.b(j));
            field.w[(i - 1) * height + j - 1] = g.sample(&mut rng);
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_parameter_gives_zero_field() {
        let f = sample_weight_field(&GeomParams::homogeneous(0.0).unwrap(), 5, 3, 1).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn deterministic_given_seed() {
        let p = GeomParams::homogeneous(0.25).unwrap();
        let a = sample_weight_field(&p, 4, 4, 11).unwrap();
        assert_eq!(a, sample_weight_field(&p, 4, 4, 11).unwrap());
        assert_ne!(a, sample_weight_field(&p, 4, 4, 12).unwrap());
    }

    #[test]
    fn geometric_mean() {
        let p = GeomParams::homogeneous(0.25).unwrap();
        let f = sample_weight_field(&p, 100, 1000, 3).unwrap();
        let n = 1e5;
        let mean = f.total() as f64 / n;
        // Var = p/(1-p)^2 = 4/9.
        let se = (4.0f64 / 9.0 / n).sqrt();
        assert!((mean - 1.0 / 3.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn csv_roundtrip() {
        let f = WeightField::from_rows(&[vec![1, 2, 0], vec![3, 4, 5]]).unwrap();
        let text = f.to_csv(Some(0.25), Some(7));
        assert!(text.starts_with("# I J q seed\n# 2 3 0.25 7\n1,2,0\n"));
        assert_eq!(WeightField::from_csv(&text).unwrap(), f);
    }

    #[test]
    fn coordinate_map() {
        let f = WeightField::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(f.omega(0, 1), 1);
        assert_eq!(f.omega(-1, 2), 2); // (1,2)
        assert_eq!(f.omega(1, 2), 3); // (2,1)
        assert_eq!(f.omega(0, 3), 4);
        assert_eq!(f.omega(0, 2), 0);
    }
}
