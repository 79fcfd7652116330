//! Dense Gaussian elimination over exact scalars.

use crate::scalars::{Field, Scalar};

/// A basis of `{ v : m v = 0 }` for an `rows x cols` matrix.
pub(crate) fn nullspace(field: Field, mut m: Vec<Vec<Scalar>>, cols: usize) -> Vec<Vec<Scalar>> {
    let mut pivots: Vec<usize> = vec![];
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv().expect("pivot is nonzero");
        for c in 0..cols {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..cols {
                    let delta = &factor * &m[row][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![field.zero(); cols];
            v[free] = field.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[r][free];
            }
            v
        })
        .collect()
}

/// Rank of a matrix.
pub(crate) fn rank(field: Field, m: Vec<Vec<Scalar>>, cols: usize) -> usize {
    cols - nullspace(field, m, cols).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_nullspace() {
        let f = Field::prime(5).unwrap();
        let s = |n| f.from_i64(n);
        // x + 2y + 3z = 0 over F5
        let m = vec![vec![s(1), s(2), s(3)]];
        let ns = nullspace(f, m.clone(), 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot = (0..3).fold(f.zero(), |acc, i| &acc + &(&m[0][i] * &v[i]));
            assert!(dot.is_zero());
        }
        assert_eq!(rank(f, vec![vec![s(1), s(2)], vec![s(2), s(4)]], 2), 1);
    }
}
