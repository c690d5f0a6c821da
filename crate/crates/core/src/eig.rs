//! Symmetric eigendecomposition: Householder tridiagonalization followed by
//! the implicit-shift QL iteration, eigenpairs sorted by non-increasing
//! eigenvalue.

use crate::error::{invalid, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone)]
pub struct EigSymFactors {
    /// Orthonormal eigenvectors, one per column.
    pub v: Matrix,
    /// Eigenvalues, non-increasing. Values within roundoff below zero are
    /// clamped to zero so downstream shrinkage never sees a negative value.
    pub d: Vec<f64>,
}

impl EigSymFactors {
    /// `V * diag(d) * V^T`, symmetrized.
    pub fn reconstruct(&self) -> Matrix {
        let mut vd = self.v.clone();
        for j in 0..self.d.len() {
            let s = self.d[j];
            for val in vd.col_mut(j) {
                *val *= s;
            }
        }
        let out = vd.mul_tr(&self.v);
        out.add(&out.transpose()).scale(0.5)
    }
}

/// Eigendecomposition of a (nominally) symmetric matrix. The input is
/// symmetrized as `(P + P^T) / 2` before reduction.
pub fn eig_sym(p: &Matrix) -> Result<EigSymFactors> {
    if p.rows() != p.cols() {
        return Err(invalid(format!(
            "eig_sym: matrix must be square, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let n = p.rows();
    if n == 0 {
        return Ok(EigSymFactors {
            v: Matrix::zeros(0, 0),
            d: Vec::new(),
        });
    }
    let mut v = p.add(&p.transpose()).scale(0.5);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_iterate(&mut v, &mut d, &mut e)?;

    // Sort eigenpairs by non-increasing eigenvalue.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).unwrap());
    let sorted_v = Matrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    let mut sorted_d: Vec<f64> = order.iter().map(|&i| d[i]).collect();

    let scale = sorted_d.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for val in sorted_d.iter_mut() {
        if *val < 0.0 && *val >= -1e-10 * scale {
            *val = 0.0;
        }
    }
    Ok(EigSymFactors {
        v: sorted_v,
        d: sorted_d,
    })
}

/// Householder reduction to tridiagonal form with accumulated transforms.
fn tridiagonalize(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = v.rows();
    for j in 0..n {
        d[j] = v.get(n - 1, j);
    }

    for i in (1..n).rev() {
        let mut h = 0.0;
        let mut scale = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
                v.set(j, i, 0.0);
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v.set(j, i, f);
                g = e[j] + v.get(j, j) * f;
                for k in j + 1..i {
                    g += v.get(k, j) * d[k];
                    e[k] += v.get(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let val = v.get(k, j) - (f * e[k] + g * d[k]);
                    v.set(k, j, val);
                }
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v.set(n - 1, i, v.get(i, i));
        v.set(i, i, 1.0);
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v.get(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v.get(k, i + 1) * v.get(k, j);
                }
                for k in 0..=i {
                    let val = v.get(k, j) - g * d[k];
                    v.set(k, j, val);
                }
            }
        }
        for k in 0..=i {
            v.set(k, i + 1, 0.0);
        }
    }
    for j in 0..n {
        d[j] = v.get(n - 1, j);
        v.set(n - 1, j, 0.0);
    }
    v.set(n - 1, n - 1, 1.0);
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal, rotations accumulated into `v`.
fn ql_iterate(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut guard = 0;
            loop {
                guard += 1;
                if guard > 1000 {
                    return Err(crate::error::Error::NonConvergence {
                        iterations: guard,
                        residual: e[l].abs(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v.get(k, i + 1);
                        v.set(k, i + 1, s * v.get(k, i) + c * h);
                        v.set(k, i, c * v.get(k, i) - s * h);
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
