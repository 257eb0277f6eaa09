use super::field::WeightField;

/// Heights h(x, t), 0 ≤ t ≤ T, stored on the light cone |x| ≤ t; zero outside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightEvolution {
    final_time: usize,
    // Row t starts at offset t², holding x = −t..=t.
    h: Vec<i64>,
}

impl HeightEvolution {
    pub fn final_time(&self) -> usize {
        self.final_time
    }

    #[inline]
    pub fn h(&self, x: i64, t: usize) -> i64 {
        assert!(t <= self.final_time, "time {t} beyond T = {}", self.final_time);
        let ti = t as i64;
        if x.abs() > ti {
            0
        } else {
            self.h[t * t + (x + ti) as usize]
        }
    }

    /// Slice h(−t..=t, t).
    pub fn row(&self, t: usize) -> &[i64] {
        &self.h[t * t..(t + 1) * (t + 1)]
    }

    /// CSV rows "t,x,h" over the light cone.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,h\n");
        for t in 0..=self.final_time {
            for (k, v) in self.row(t).iter().enumerate() {
                s.push_str(&format!("{},{},{}\n", t, k as i64 - t as i64, v));
            }
        }
        s
    }
}

/// h(x, t+1) = max(h(x−1, t), h(x, t), h(x+1, t)) + ω(x, t+1), h(·, 0) ≡ 0.
pub fn evolve_png(field: &WeightField, final_time: usize) -> HeightEvolution {
    let t_max = final_time;
    let mut h = vec![0i64; (t_max + 1) * (t_max + 1)];
    for t in 0..t_max {
        let (prev, next) = h.split_at_mut((t + 1) * (t + 1));
        let prev = &prev[t * t..];
        let next = &mut next[..2 * t + 3];
        let ti = t as i64;
        let at = |x: i64| if x.abs() > ti { 0 } else { prev[(x + ti) as usize] };
        for x in -(ti + 1)..=(ti + 1) {
            let m = at(x - 1).max(at(x)).max(at(x + 1));
            next[(x + ti + 1) as usize] = m + field.omega(x, ti + 1);
        }
    }
    HeightEvolution { final_time: t_max, h }
}

/// Jumps η± at time t for the sites with t − x odd, x ∈ [−t−1, t+1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpProfile {
    pub t: usize,
    /// η⁺(x, t) = h(x, t) − h(x−1, t) at x = −t−1+2k.
    pub plus: Vec<i64>,
    /// η⁻(x, t) = h(x, t) − h(x+1, t) at x = −t−1+2k.
    pub minus: Vec<i64>,
}

impl JumpProfile {
    pub fn x_of(&self, k: usize) -> i64 {
        -(self.t as i64) - 1 + 2 * k as i64
    }

    fn index(&self, x: i64) -> Option<usize> {
        let off = x + self.t as i64 + 1;
        if off < 0 || off % 2 != 0 || off as usize / 2 >= self.plus.len() {
            None
        } else {
            Some(off as usize / 2)
        }
    }

    /// η⁺(x, t); zero off the stored sites.
    pub fn eta_plus(&self, x: i64) -> i64 {
        self.index(x).map_or(0, |k| self.plus[k])
    }

    /// η⁻(x, t); zero off the stored sites.
    pub fn eta_minus(&self, x: i64) -> i64 {
        self.index(x).map_or(0, |k| self.minus[k])
    }
}

pub fn jumps(evo: &HeightEvolution, t: usize) -> JumpProfile {
    let ti = t as i64;
    let n = t + 2;
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for k in 0..n {
        let x = -ti - 1 + 2 * k as i64;
        let h0 = evo.h(x, t);
        plus.push(h0 - evo.h(x - 1, t));
        minus.push(h0 - evo.h(x + 1, t));
    }
    JumpProfile { t, plus, minus }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_disorder_stays_flat() {
        let evo = evolve_png(&WeightField::zeros(4, 4), 7);
        assert!((0..=7).all(|t| evo.row(t).iter().all(|&v| v == 0)));
    }

    #[test]
    fn single_nucleation() {
        let f = WeightField::from_rows(&[vec![2]]).unwrap();
        let evo = evolve_png(&f, 3);
        assert_eq!(evo.row(1), &[0, 2, 0]);
        let j = jumps(&evo, 1);
        assert_eq!((j.eta_plus(0), j.eta_minus(0)), (2, 2));
        // The plateau spreads one site per step.
        assert_eq!(evo.row(3), &[0, 2, 2, 2, 2, 2, 0]);
    }

    #[test]
    fn two_by_two_top_height() {
        let f = WeightField::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(evolve_png(&f, 3).h(0, 3), 8);
    }

    #[test]
    fn csv_lists_cone() {
        let evo = evolve_png(&WeightField::from_rows(&[vec![1]]).unwrap(), 1);
        assert_eq!(evo.to_csv(), "t,x,h\n0,0,0\n1,-1,0\n1,0,1\n1,1,0\n");
    }
}
