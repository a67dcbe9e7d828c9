//! Dense Gaussian elimination for the small square systems built by the solver.

use crate::valuation::Scalar;

/// Solves `matrix * x = rhs` with partial pivoting. Returns `None` when the
/// system is singular (pivot judged by [`Scalar::negligible`]).
pub fn solve<S: Scalar>(mut matrix: Vec<Vec<S>>, mut rhs: Vec<S>) -> Option<Vec<S>> {
    let n = rhs.len();
    debug_assert!(matrix.len() == n && matrix.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| {
            matrix[a][col]
                .abs()
                .partial_cmp(&matrix[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if matrix[pivot][col].negligible() {
            return None;
        }
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            if matrix[row][col].is_zero() {
                continue;
            }
            let factor = matrix[row][col].clone() / matrix[col][col].clone();
            for k in col..n {
                let delta = factor.clone() * matrix[col][k].clone();
                matrix[row][k] = matrix[row][k].clone() - delta;
            }
            rhs[row] = rhs[row].clone() - factor * rhs[col].clone();
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in row + 1..n {
            acc = acc - matrix[row][k].clone() * x[k].clone();
        }
        x[row] = acc / matrix[row][row].clone();
    }
    Some(x)
}
