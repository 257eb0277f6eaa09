use super::field::WeightField;

/// Weakly decreasing parts λ_1 ≥ λ_2 ≥ … (trailing zeros dropped).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition(pub Vec<i64>);

impl Partition {
    /// λ_j, 1-based; zero past the last part.
    pub fn part(&self, j: usize) -> i64 {
        self.0.get(j - 1).copied().unwrap_or(0)
    }
    pub fn size(&self) -> i64 {
        self.0.iter().sum()
    }
}

/// Shape of the RSK insertion tableau of the submatrix (w(i, j))_{i≤M, j≤N}.
///
/// The biword lists (i, j) w(i, j) times in lexicographic order; the j's are
/// row-inserted, each bumping the leftmost strictly larger entry.
pub fn rsk_shape(field: &WeightField, m: usize, n: usize) -> Partition {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for i in 1..=m as i64 {
        for j in 1..=n as i64 {
            for _ in 0..field.get(i, j) {
                let mut v = j;
                let mut r = 0;
                loop {
                    if r == rows.len() {
                        rows.push(vec![v]);
                        break;
                    }
                    let row = &mut rows[r];
                    let pos = row.partition_point(|&e| e <= v);
                    if pos == row.len() {
                        row.push(v);
                        break;
                    }
                    v = std::mem::replace(&mut row[pos], v);
                    r += 1;
                }
            }
        }
    }
    Partition(rows.iter().map(|r| r.len() as i64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_examples() {
        let one = WeightField::from_rows(&[vec![1]]).unwrap();
        assert_eq!(rsk_shape(&one, 1, 1), Partition(vec![1]));
        let id = WeightField::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(rsk_shape(&id, 2, 2), Partition(vec![2]));
        let anti = WeightField::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(rsk_shape(&anti, 2, 2), Partition(vec![1, 1]));
    }
}
