use super::field::WeightField;
use crate::Error;

/// G(i, j) for 0 ≤ i ≤ I, 0 ≤ j ≤ J, zero on the axes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LastPassageTable {
    width: usize,
    height: usize,
    g: Vec<i64>,
}

impl LastPassageTable {
    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn g(&self, i: usize, j: usize) -> i64 {
        assert!(i <= self.width && j <= self.height, "G({i},{j}) outside table");
        self.g[i * (self.height + 1) + j]
    }
}

/// G(i, j) = max(G(i−1, j), G(i, j−1)) + w(i, j).
pub fn lpp_table(field: &WeightField) -> LastPassageTable {
    let (iw, jh) = (field.width(), field.height());
    let stride = jh + 1;
    let mut g = vec![0i64; (iw + 1) * stride];
    for i in 1..=iw {
        for j in 1..=jh {
            let best = g[(i - 1) * stride + j].max(g[i * stride + j - 1]);
            g[i * stride + j] = best + field.get(i as i64, j as i64);
        }
    }
    LastPassageTable { width: iw, height: jh, g }
}

/// max_{|K|<N} G(N+K, N−K).
pub fn point_to_line(table: &LastPassageTable, n: usize) -> Result<i64, Error> {
    if n == 0 || table.width < 2 * n - 1 || table.height < 2 * n - 1 {
        return Err(Error::Shape(format!(
            "point-to-line at N = {n} needs a {0}x{0} table, have {1}x{2}",
            2 * n - 1,
            table.width,
            table.height
        )));
    }
    Ok((1..2 * n).map(|i| table.g(i, 2 * n - i)).max().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        let t = lpp_table(&WeightField::from_rows(&[vec![3]]).unwrap());
        assert_eq!(t.g(1, 1), 3);
        assert_eq!(point_to_line(&t, 1).unwrap(), 3);
        let f = WeightField::from_rows(&[vec![1, 2, 0], vec![3, 4, 0], vec![0, 0, 0]]).unwrap();
        let t = lpp_table(&f);
        assert_eq!(t.g(2, 2), 8);
        let expect = t.g(3, 1).max(t.g(2, 2)).max(t.g(1, 3));
        assert_eq!(point_to_line(&t, 2).unwrap(), expect);
        assert!(point_to_line(&lpp_table(&WeightField::zeros(2, 2)), 2).is_err());
    }
}
