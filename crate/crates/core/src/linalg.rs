//! Small dense linear-algebra helpers shared by the solvers.

use ndarray::Array2;

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
///
/// `a` is row-major `n × n`. Returns `None` when a pivot falls below `tol`
/// (singular to working precision).
pub fn solve_dense(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot_row][col].abs() <= tol {
            return None;
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Stack the columns of `x` (M×K) into a length-MK vector, column k first.
pub fn stack_columns(x: &Array2<f64>) -> Vec<f64> {
    let (m, k) = x.dim();
    let mut out = Vec::with_capacity(m * k);
    for col in 0..k {
        for row in 0..m {
            out.push(x[[row, col]]);
        }
    }
    out
}

/// Inverse of [`stack_columns`]: rebuild an M×K matrix from a stacked vector.
pub fn unstack_columns(v: &[f64], m: usize, k: usize) -> Array2<f64> {
    debug_assert_eq!(v.len(), m * k);
    let mut x = Array2::zeros((m, k));
    for col in 0..k {
        for row in 0..m {
            x[[row, col]] = v[col * m + row];
        }
    }
    x
}

/// Entrywise ℓ1 norm.
pub fn l1_norm(x: &Array2<f64>) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn solves_small_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_dense(&a, &[3.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12);
        assert!((x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve_dense(&a, &[1.0, 2.0], 1e-12).is_none());
    }

    #[test]
    fn stack_roundtrip() {
        let x = array![[1.0, 4.0], [2.0, 5.0], [3.0, 6.0]];
        let v = stack_columns(&x);
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(unstack_columns(&v, 3, 2), x);
    }
}
