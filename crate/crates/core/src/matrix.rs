//! Dense column-major matrix of `f64`.
//!
//! Columns are contiguous, which is what the factorization kernels and the
//! column-sampling sketches want. Entries are validated to be finite on
//! construction from external data; arithmetic on already-validated matrices
//! does not re-check.

use crate::error::{invalid, Result};

/// Dense real matrix, column-major storage (`data[i + j * rows]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Zero matrix. Zero-sized dimensions are allowed (empty factors).
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity.
    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Square matrix with `d` on the diagonal.
    pub fn from_diag(d: &[f64]) -> Matrix {
        let n = d.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Build from column-major data; rejects length mismatches and non-finite
    /// entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Build entry-wise; `f(i, j)` must return finite values.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Matrix { rows, cols, data }
    }

    /// Internal constructor for data already known to be finite.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Matrix {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i + j * self.rows]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i + j * self.rows] = v;
    }

    /// Contiguous view of column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        debug_assert!(j < self.cols);
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        debug_assert!(j < self.cols);
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// First `k` columns as a new matrix.
    pub fn take_columns(&self, k: usize) -> Matrix {
        assert!(k <= self.cols);
        Matrix::from_raw(self.rows, k, self.data[..self.rows * k].to_vec())
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "mul: inner dimensions");
        gemm(self, false, other, false)
    }

    /// `self^T * other`.
    pub fn tr_mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "tr_mul: inner dimensions");
        gemm(self, true, other, false)
    }

    /// `self * other^T`.
    pub fn mul_tr(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "mul_tr: inner dimensions");
        gemm(self, false, other, true)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, alpha: f64) -> Matrix {
        let data = self.data.iter().map(|v| v * alpha).collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    /// `self += alpha * other` in place.
    pub fn add_scaled(&mut self, alpha: f64, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += alpha * b;
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let data = self.data.iter().map(|&v| f(v)).collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn sum_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Number of entries with `|a_ij| > eps`.
    pub fn count_above(&self, eps: f64) -> usize {
        self.data.iter().filter(|v| v.abs() > eps).count()
    }
}

fn gemm(a: &Matrix, trans_a: bool, b: &Matrix, trans_b: bool) -> Matrix {
    let (m, k) = if trans_a {
        (a.cols, a.rows)
    } else {
        (a.rows, a.cols)
    };
    let n = if trans_b { b.rows } else { b.cols };
    let mut c = Matrix::zeros(m, n);
    if m == 0 || n == 0 {
        return c;
    }
    if k == 0 {
        return c;
    }
    let (rsa, csa) = if trans_a {
        (a.rows as isize, 1)
    } else {
        (1, a.rows as isize)
    };
    let (rsb, csb) = if trans_b {
        (b.rows as isize, 1)
    } else {
        (1, b.rows as isize)
    };
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.data.as_ptr(),
            rsa,
            csa,
            b.data.as_ptr(),
            rsb,
            csb,
            0.0,
            c.data.as_mut_ptr(),
            1,
            m as isize,
        );
    }
    c
}

/// Euclidean norm of a slice.
pub(crate) fn vec_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Dot product of two slices.
pub(crate) fn vec_dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(Matrix::from_vec(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::from_vec(1, 2, vec![1.0, f64::INFINITY]).is_err());
        assert!(Matrix::from_vec(1, 2, vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn column_major_layout() {
        let m = Matrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.col(2), &[5.0, 6.0]);
    }

    #[test]
    fn mul_matches_manual() {
        let a = Matrix::from_vec(2, 3, vec![1.0, 4.0, 2.0, 5.0, 3.0, 6.0]).unwrap();
        let b = Matrix::from_vec(3, 2, vec![7.0, 9.0, 11.0, 8.0, 10.0, 12.0]).unwrap();
        let c = a.mul(&b);
        // a = [1 2 3; 4 5 6], b = [7 8; 9 10; 11 12]
        assert_eq!(c.get(0, 0), 58.0);
        assert_eq!(c.get(0, 1), 64.0);
        assert_eq!(c.get(1, 0), 139.0);
        assert_eq!(c.get(1, 1), 154.0);
    }

    #[test]
    fn tr_mul_and_mul_tr_match_explicit_transpose() {
        let a = Matrix::from_fn(4, 3, |i, j| (i * 3 + j) as f64 * 0.5 - 1.0);
        let b = Matrix::from_fn(4, 2, |i, j| (i + 2 * j) as f64 * 0.25);
        let d = a.tr_mul(&b);
        let d2 = a.transpose().mul(&b);
        assert!(d.sub(&d2).frobenius_norm() < 1e-14);

        let e = Matrix::from_fn(2, 3, |i, j| (i + j) as f64);
        let f = a.mul_tr(&e);
        let f2 = a.mul(&e.transpose());
        assert!(f.sub(&f2).frobenius_norm() < 1e-14);
    }

    #[test]
    fn empty_dimensions() {
        let a = Matrix::zeros(3, 0);
        let b = Matrix::zeros(0, 4);
        let c = a.mul(&b);
        assert_eq!((c.rows(), c.cols()), (3, 4));
        assert_eq!(c.frobenius_norm(), 0.0);
        let at_a = a.tr_mul(&a);
        assert_eq!((at_a.rows(), at_a.cols()), (0, 0));
    }

    #[test]
    fn norms() {
        let m = Matrix::from_vec(2, 2, vec![1.0, -2.0, 0.0, 3.0]).unwrap();
        assert!((m.frobenius_norm() - 14.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.max_abs(), 3.0);
        assert_eq!(m.sum_abs(), 6.0);
        assert_eq!(m.count_above(0.0), 3);
        assert_eq!(m.count_above(1.5), 2);
    }
}
