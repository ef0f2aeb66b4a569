//! Small dense matrices and the symmetric solves the estimators need.
//!
//! The linear systems in this crate are tiny: normal equations for at most a
//! dozen spline coefficients, or one-plus-`d` regression coefficients. A
//! row-major matrix with a Cholesky solve covers all of it without pulling in
//! a linear-algebra dependency.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Real> Mat<R> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![R::zero(); rows * cols],
        }
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::LengthMismatch {
                    left: ncols,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Mat {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> R {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: R) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` as a slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[R] {
        debug_assert!(i < self.rows);
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable view of row `i`.
    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [R] {
        debug_assert!(i < self.rows);
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// New matrix holding the listed rows, in order. Indices may repeat.
    pub fn take_rows(&self, indices: &[usize]) -> Mat<R> {
        let mut out = Mat::zeros(indices.len(), self.cols);
        for (k, &i) in indices.iter().enumerate() {
            out.row_mut(k).copy_from_slice(self.row(i));
        }
        out
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }
}

/// Inner product of two equally long slices.
#[inline]
pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm2<R: Real>(a: &[R]) -> R {
    dot(a, a).sqrt()
}

/// Solves the symmetric positive-definite system `a x = b` by Cholesky.
///
/// Returns `None` when a pivot is non-positive or not finite, which is how
/// rank deficiency and contaminated input surface here.
pub fn cholesky_solve<R: Real>(a: &Mat<R>, b: &[R]) -> Option<Vec<R>> {
    let n = a.rows();
    debug_assert_eq!(a.cols(), n);
    debug_assert_eq!(b.len(), n);

    // Lower-triangular factor, built column by column.
    let mut l = vec![R::zero(); n * n];
    for j in 0..n {
        let mut diag = a.get(j, j);
        for k in 0..j {
            diag = diag - l[j * n + k] * l[j * n + k];
        }
        if !(diag > R::zero()) || !diag.is_finite() {
            return None;
        }
        let diag = diag.sqrt();
        l[j * n + j] = diag;
        for i in (j + 1)..n {
            let mut v = a.get(i, j);
            for k in 0..j {
                v = v - l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = v / diag;
        }
    }

    // Forward substitution: L z = b.
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let lik = l[i * n + k];
            let zk = z[k];
            z[i] = z[i] - lik * zk;
        }
        z[i] = z[i] / l[i * n + i];
    }

    // Back substitution: L^T x = z.
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let lki = l[k * n + i];
            let zk = z[k];
            z[i] = z[i] - lki * zk;
        }
        z[i] = z[i] / l[i * n + i];
    }
    Some(z)
}

/// Solves the weighted least-squares normal equations
/// `(X^T W X) beta = X^T W y` with `W = diag(w)`.
///
/// `ridge` is added to every diagonal entry of the Gram matrix before
/// factorization; pass zero for a plain solve.
pub fn solve_weighted_normal<R: Real>(
    x: &Mat<R>,
    y: &[R],
    w: &[R],
    ridge: R,
) -> Option<Vec<R>> {
    let n = x.rows();
    let p = x.cols();
    debug_assert_eq!(y.len(), n);
    debug_assert_eq!(w.len(), n);

    let mut gram = Mat::zeros(p, p);
    let mut rhs = vec![R::zero(); p];
    for i in 0..n {
        let xi = x.row(i);
        let wi = w[i];
        let wy = wi * y[i];
        for a in 0..p {
            let wxa = wi * xi[a];
            rhs[a] += xi[a] * wy;
            for b in a..p {
                let v = gram.get(a, b) + wxa * xi[b];
                gram.set(a, b, v);
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            let v = gram.get(b, a);
            gram.set(a, b, v);
        }
        let v = gram.get(a, a) + ridge;
        gram.set(a, a, v);
    }
    cholesky_solve(&gram, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_recovers_known_solution() {
        // a = [[4,2],[2,3]], x = (1, -2) => b = (0, -4).
        let a = Mat::<f64>::from_rows(vec![vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let x = cholesky_solve(&a, &[0.0, -4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite_matrix() {
        let a = Mat::<f64>::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(cholesky_solve(&a, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn weighted_normal_matches_hand_computation() {
        // Interpolating two points with two parameters: exact fit.
        let x = Mat::<f64>::from_rows(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let beta =
            solve_weighted_normal(&x, &[2.0, 5.0], &[1.0, 3.0], 0.0).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-12);
        assert!((beta[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_system_returns_none() {
        let x = Mat::<f64>::from_rows(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(solve_weighted_normal(&x, &[1.0, 2.0], &[1.0, 1.0], 0.0).is_none());
    }

    #[test]
    fn take_rows_copies_in_order() {
        let m = Mat::<f64>::from_rows(vec![vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let s = m.take_rows(&[2, 0]);
        assert_eq!(s.get(0, 0), 3.0);
        assert_eq!(s.get(1, 0), 1.0);
    }
}
