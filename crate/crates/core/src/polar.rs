//! Polar decomposition `C = W * P` by the Newton iteration
//! `X_{j+1} = (X_j + X_j^{-T}) / 2`, which converges quadratically for
//! non-singular square inputs.

use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;

/// Stopping tolerance on the relative Frobenius step size.
pub const DEFAULT_POLAR_TOL: f64 = 1e-12;
/// Iteration cap; the iteration typically converges in about seven steps.
pub const DEFAULT_POLAR_MAX_ITER: usize = 30;

#[derive(Debug, Clone)]
pub struct PolarFactors {
    /// Orthonormal factor.
    pub w: Matrix,
    /// Symmetric positive semi-definite factor `W^T C`, symmetrized.
    pub p: Matrix,
    /// Newton steps taken.
    pub iterations: usize,
}

/// Unscaled Newton polar decomposition of a non-singular square matrix.
pub fn polar_newton(c: &Matrix, tol: f64, max_iter: usize) -> Result<PolarFactors> {
    if c.rows() != c.cols() || c.is_empty() {
        return Err(invalid(format!(
            "polar_newton: matrix must be square and nonempty, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    if !(tol > 0.0) {
        return Err(invalid("polar_newton: tol must be positive"));
    }
    let mut x = c.clone();
    let mut iterations = 0;
    let mut rel_step = f64::INFINITY;
    let mut converged = false;
    for j in 0..max_iter {
        let xinv = lu_inverse(&x)?;
        let xnext = x.add(&xinv.transpose()).scale(0.5);
        if !xnext.data().iter().all(|v| v.is_finite()) {
            return Err(Error::SingularMatrix(
                "polar_newton: iterate overflowed".into(),
            ));
        }
        let step = xnext.sub(&x).frobenius_norm();
        let scale = x.frobenius_norm();
        rel_step = if scale > 0.0 { step / scale } else { step };
        x = xnext;
        iterations = j + 1;
        if step <= tol * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            residual: rel_step,
        });
    }
    let wtc = x.tr_mul(c);
    let p = wtc.add(&wtc.transpose()).scale(0.5);
    Ok(PolarFactors {
        w: x,
        p,
        iterations,
    })
}

/// Dense inverse by LU with partial pivoting.
fn lu_inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let mut lu = a.clone();
    let mut pivots = vec![0usize; n];
    for k in 0..n {
        let mut p = k;
        let mut best = lu.get(k, k).abs();
        for i in k + 1..n {
            let v = lu.get(i, k).abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::SingularMatrix(format!(
                "zero pivot at column {k} of {n}"
            )));
        }
        pivots[k] = p;
        if p != k {
            for j in 0..n {
                let tmp = lu.get(k, j);
                lu.set(k, j, lu.get(p, j));
                lu.set(p, j, tmp);
            }
        }
        let pivot = lu.get(k, k);
        for i in k + 1..n {
            let m = lu.get(i, k) / pivot;
            lu.set(i, k, m);
            if m != 0.0 {
                for j in k + 1..n {
                    let val = lu.get(i, j) - m * lu.get(k, j);
                    lu.set(i, j, val);
                }
            }
        }
    }

    let mut inv = Matrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for col in 0..n {
        rhs.iter_mut().for_each(|v| *v = 0.0);
        rhs[col] = 1.0;
        for k in 0..n {
            rhs.swap(k, pivots[k]);
        }
        // Forward substitution with unit lower triangle.
        for i in 1..n {
            let mut sum = rhs[i];
            for j in 0..i {
                sum -= lu.get(i, j) * rhs[j];
            }
            rhs[i] = sum;
        }
        // Back substitution.
        for i in (0..n).rev() {
            let mut sum = rhs[i];
            for j in i + 1..n {
                sum -= lu.get(i, j) * rhs[j];
            }
            rhs[i] = sum / lu.get(i, i);
        }
        for i in 0..n {
            inv.set(i, col, rhs[i]);
        }
    }
    Ok(inv)
}
