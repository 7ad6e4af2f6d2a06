use crate::nn::Matrix;

/// Determinant of `m` after scaling each row by its largest absolute entry,
/// computed by LU factorization with partial pivoting. The row scaling makes
/// the magnitude a scale-invariant singularity measure: a matrix with a zero
/// row, or rows that are parallel up to `eps`, yields a value near zero no
/// matter how large its entries are.
pub fn row_scaled_determinant(m: &Matrix) -> f64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.as_slice().to_vec();
    for r in 0..n {
        let row = &mut a[r * n..(r + 1) * n];
        let scale = row.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return 0.0;
        }
        for v in row.iter_mut() {
            *v /= scale;
        }
    }
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for c in 0..n {
                a.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn identity_and_permutation() {
        assert_eq!(row_scaled_determinant(&Matrix::identity(3)), 1.0);
        let p = Matrix::from_row_major(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(row_scaled_determinant(&p), -1.0);
    }

    #[test]
    fn scale_invariance() {
        let a = Matrix::from_row_major(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let b = Matrix::from_row_major(2, 2, vec![2e6, 1e6, 1e-3, 3e-3]).unwrap();
        let (da, db) = (row_scaled_determinant(&a), row_scaled_determinant(&b));
        assert!((da - db).abs() < 1e-12);
        // rows scaled to [1, 0.5] and [1/3, 1]: det = 1 - 1/6
        assert!((da - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn nearly_parallel_rows() {
        let m = Matrix::from_row_major(2, 2, vec![1.0, 1.0, 1.0, 1.0 + 1e-14]).unwrap();
        let d = row_scaled_determinant(&m).abs();
        assert!(d < 1e-13 && d > 0.0, "{d}");
        let z = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(row_scaled_determinant(&z), 0.0);
    }
}
