//! Exact thin SVD, used as the reference oracle everywhere.
//!
//! Golub-Kahan-Reinsch: Householder bidiagonalization followed by the
//! implicit-shift QR iteration on the bidiagonal (the classic LINPACK
//! scheme). This path shares no code with the randomized pipeline or the
//! polar/eigen kernels it is used to check.

use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;

/// Thin factorization `A ~ U * diag(sigma) * V^T` with orthonormal columns in
/// `U` (m x s) and `V` (n x s) and `sigma` sorted non-increasing.
#[derive(Debug, Clone)]
pub struct ThinFactorization {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl ThinFactorization {
    /// `U * diag(sigma) * V^T`, skipping zero singular values.
    pub fn reconstruct(&self) -> Matrix {
        reconstruct_scaled(&self.u, &self.sigma, &self.v)
    }

    /// `U * diag(values) * V^T` with a replacement spectrum (for example a
    /// shrunk one).
    pub fn reconstruct_with(&self, values: &[f64]) -> Matrix {
        reconstruct_scaled(&self.u, values, &self.v)
    }
}

/// `U * diag(values) * V^T` using only the columns with nonzero values.
pub(crate) fn reconstruct_scaled(u: &Matrix, values: &[f64], v: &Matrix) -> Matrix {
    let limit = values.len().min(u.cols()).min(v.cols());
    let active: Vec<usize> = (0..limit).filter(|&i| values[i] != 0.0).collect();
    if active.is_empty() {
        return Matrix::zeros(u.rows(), v.rows());
    }
    let mut us = Matrix::zeros(u.rows(), active.len());
    let mut vs = Matrix::zeros(v.rows(), active.len());
    for (j, &idx) in active.iter().enumerate() {
        let s = values[idx];
        for (dst, src) in us.col_mut(j).iter_mut().zip(u.col(idx)) {
            *dst = s * src;
        }
        vs.col_mut(j).copy_from_slice(v.col(idx));
    }
    us.mul_tr(&vs)
}

/// Exact thin SVD with `s = min(m, n)`.
pub fn svd_exact(a: &Matrix) -> Result<ThinFactorization> {
    if a.is_empty() {
        return Err(invalid("svd_exact: matrix must be nonempty"));
    }
    if a.rows() < a.cols() {
        let f = svd_exact(&a.transpose())?;
        return Ok(ThinFactorization {
            u: f.v,
            sigma: f.sigma,
            v: f.u,
        });
    }
    golub_kahan(a)
}

/// SVD of a tall matrix (`m >= n`): thin `U` (m x n), `sigma` (n), `V` (n x n).
fn golub_kahan(a: &Matrix) -> Result<ThinFactorization> {
    let m = a.rows();
    let n = a.cols();
    let mut work = a.clone();
    let mut s = vec![0.0_f64; n];
    let mut e = vec![0.0_f64; n];
    let mut u = Matrix::zeros(m, n);
    let mut v = Matrix::zeros(n, n);
    let mut tmp = vec![0.0_f64; m];

    // Bidiagonalize: diagonal into s, super-diagonal into e, with the
    // Householder vectors parked in `work` for the back-accumulation.
    let nct = (m - 1).min(n);
    let nrt = n.saturating_sub(2).min(m);
    for k in 0..nct.max(nrt) {
        if k < nct {
            let mut norm = 0.0_f64;
            for i in k..m {
                norm = norm.hypot(work.get(i, k));
            }
            if norm != 0.0 {
                if work.get(k, k) < 0.0 {
                    norm = -norm;
                }
                for i in k..m {
                    let val = work.get(i, k) / norm;
                    work.set(i, k, val);
                }
                work.set(k, k, work.get(k, k) + 1.0);
            }
            s[k] = -norm;
        }
        for j in k + 1..n {
            if k < nct && s[k] != 0.0 {
                let mut t = 0.0;
                for i in k..m {
                    t += work.get(i, k) * work.get(i, j);
                }
                t = -t / work.get(k, k);
                for i in k..m {
                    let val = work.get(i, j) + t * work.get(i, k);
                    work.set(i, j, val);
                }
            }
            e[j] = work.get(k, j);
        }
        if k < nct {
            for i in k..m {
                u.set(i, k, work.get(i, k));
            }
        }
        if k < nrt {
            let mut norm = 0.0_f64;
            for item in e.iter().take(n).skip(k + 1) {
                norm = norm.hypot(*item);
            }
            if norm != 0.0 {
                if e[k + 1] < 0.0 {
                    norm = -norm;
                }
                for item in e.iter_mut().take(n).skip(k + 1) {
                    *item /= norm;
                }
                e[k + 1] += 1.0;
            }
            e[k] = -norm;
            if k + 1 < m && e[k] != 0.0 {
                for item in tmp.iter_mut().take(m).skip(k + 1) {
                    *item = 0.0;
                }
                for j in k + 1..n {
                    for i in k + 1..m {
                        tmp[i] += e[j] * work.get(i, j);
                    }
                }
                for j in k + 1..n {
                    let t = -e[j] / e[k + 1];
                    for i in k + 1..m {
                        let val = work.get(i, j) + t * tmp[i];
                        work.set(i, j, val);
                    }
                }
            }
            for i in k + 1..n {
                v.set(i, k, e[i]);
            }
        }
    }

    // Final bidiagonal of order p.
    let mut p = n.min(m + 1);
    if nct < n {
        s[nct] = work.get(nct, nct);
    }
    if m < p {
        s[p - 1] = 0.0;
    }
    if nrt + 1 < p {
        e[nrt] = work.get(nrt, p - 1);
    }
    e[p - 1] = 0.0;

    // Accumulate U.
    for j in nct..n {
        for i in 0..m {
            u.set(i, j, 0.0);
        }
        u.set(j, j, 1.0);
    }
    for k in (0..nct).rev() {
        if s[k] != 0.0 {
            for j in k + 1..n {
                let mut t = 0.0;
                for i in k..m {
                    t += u.get(i, k) * u.get(i, j);
                }
                t = -t / u.get(k, k);
                for i in k..m {
                    let val = u.get(i, j) + t * u.get(i, k);
                    u.set(i, j, val);
                }
            }
            for i in k..m {
                u.set(i, k, -u.get(i, k));
            }
            u.set(k, k, 1.0 + u.get(k, k));
            for i in 0..k {
                u.set(i, k, 0.0);
            }
        } else {
            for i in 0..m {
                u.set(i, k, 0.0);
            }
            u.set(k, k, 1.0);
        }
    }

    // Accumulate V.
    for k in (0..n).rev() {
        if k < nrt && e[k] != 0.0 {
            for j in k + 1..n {
                let mut t = 0.0;
                for i in k + 1..n {
                    t += v.get(i, k) * v.get(i, j);
                }
                t = -t / v.get(k + 1, k);
                for i in k + 1..n {
                    let val = v.get(i, j) + t * v.get(i, k);
                    v.set(i, j, val);
                }
            }
        }
        for i in 0..n {
            v.set(i, k, 0.0);
        }
        v.set(k, k, 1.0);
    }

    // Implicit-shift QR on the bidiagonal.
    let pp = p - 1;
    let eps = f64::EPSILON;
    let tiny = 2.0_f64.powi(-966);
    let mut guard = 0usize;
    let guard_cap = 100 * (n + 1);
    while p > 0 {
        guard += 1;
        if guard > guard_cap {
            return Err(Error::NonConvergence {
                iterations: guard,
                residual: e[p.saturating_sub(2)].abs(),
            });
        }

        // kase 1: s(p) negligible     -> deflate
        // kase 2: s(k) negligible     -> split
        // kase 3: e(k-1) negligible   -> QR step on s(k..p)
        // kase 4: e(p-1) negligible   -> converged
        let mut k = p as isize - 2;
        while k >= 0 {
            let kk = k as usize;
            if e[kk].abs() <= tiny + eps * (s[kk].abs() + s[kk + 1].abs()) {
                e[kk] = 0.0;
                break;
            }
            k -= 1;
        }
        let kase;
        if k == p as isize - 2 {
            kase = 4;
        } else {
            let mut ks = p as isize - 1;
            while ks > k {
                let kss = ks as usize;
                let t = if ks != p as isize { e[kss].abs() } else { 0.0 }
                    + if ks != k + 1 { e[kss - 1].abs() } else { 0.0 };
                if s[kss].abs() <= tiny + eps * t {
                    s[kss] = 0.0;
                    break;
                }
                ks -= 1;
            }
            if ks == k {
                kase = 3;
            } else if ks == p as isize - 1 {
                kase = 1;
            } else {
                kase = 2;
                k = ks;
            }
        }
        let k = (k + 1) as usize;

        match kase {
            1 => {
                let mut f = e[p - 2];
                e[p - 2] = 0.0;
                for j in (k..p - 1).rev() {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    if j != k {
                        f = -sn * e[j - 1];
                        e[j - 1] *= cs;
                    }
                    rotate_cols(&mut v, j, p - 1, cs, sn);
                }
            }
            2 => {
                let mut f = e[k - 1];
                e[k - 1] = 0.0;
                for j in k..p {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    f = -sn * e[j];
                    e[j] *= cs;
                    rotate_cols(&mut u, j, k - 1, cs, sn);
                }
            }
            3 => {
                // Shift from the trailing 2x2.
                let scale = s[p - 1]
                    .abs()
                    .max(s[p - 2].abs())
                    .max(e[p - 2].abs())
                    .max(s[k].abs())
                    .max(e[k].abs());
                let sp = s[p - 1] / scale;
                let spm1 = s[p - 2] / scale;
                let epm1 = e[p - 2] / scale;
                let sk = s[k] / scale;
                let ek = e[k] / scale;
                let b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
                let c = (sp * epm1) * (sp * epm1);
                let mut shift = 0.0;
                if b != 0.0 || c != 0.0 {
                    shift = (b * b + c).sqrt();
                    if b < 0.0 {
                        shift = -shift;
                    }
                    shift = c / (b + shift);
                }
                let mut f = (sk + sp) * (sk - sp) + shift;
                let mut g = sk * ek;

                for j in k..p - 1 {
                    let mut t = f.hypot(g);
                    let mut cs = f / t;
                    let mut sn = g / t;
                    if j != k {
                        e[j - 1] = t;
                    }
                    f = cs * s[j] + sn * e[j];
                    e[j] = cs * e[j] - sn * s[j];
                    g = sn * s[j + 1];
                    s[j + 1] *= cs;
                    rotate_cols(&mut v, j, j + 1, cs, sn);

                    t = f.hypot(g);
                    cs = f / t;
                    sn = g / t;
                    s[j] = t;
                    f = cs * e[j] + sn * s[j + 1];
                    s[j + 1] = -sn * e[j] + cs * s[j + 1];
                    g = sn * e[j + 1];
                    e[j + 1] *= cs;
                    if j < m - 1 {
                        rotate_cols(&mut u, j, j + 1, cs, sn);
                    }
                }
                e[p - 2] = f;
            }
            _ => {
                // Converged: fix sign, then bubble into non-increasing order.
                if s[k] <= 0.0 {
                    s[k] = if s[k] < 0.0 { -s[k] } else { 0.0 };
                    for i in 0..=pp.min(n - 1) {
                        v.set(i, k, -v.get(i, k));
                    }
                }
                let mut k = k;
                while k < pp {
                    if s[k] >= s[k + 1] {
                        break;
                    }
                    s.swap(k, k + 1);
                    if k < n - 1 {
                        swap_cols(&mut v, k, k + 1);
                    }
                    if k < m - 1 {
                        swap_cols(&mut u, k, k + 1);
                    }
                    k += 1;
                }
                p -= 1;
            }
        }
    }

    Ok(ThinFactorization { u, sigma: s, v })
}

/// Apply a Givens rotation to columns `(a, b)`: `col_a <- cs*col_a + sn*col_b`,
/// `col_b <- -sn*col_a + cs*col_b`.
fn rotate_cols(mat: &mut Matrix, a: usize, b: usize, cs: f64, sn: f64) {
    for i in 0..mat.rows() {
        let t = cs * mat.get(i, a) + sn * mat.get(i, b);
        mat.set(i, b, -sn * mat.get(i, a) + cs * mat.get(i, b));
        mat.set(i, a, t);
    }
}

fn swap_cols(mat: &mut Matrix, a: usize, b: usize) {
    for i in 0..mat.rows() {
        let t = mat.get(i, a);
        mat.set(i, a, mat.get(i, b));
        mat.set(i, b, t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_values() {
        let a = Matrix::from_diag(&[3.0, 1.0]);
        let f = svd_exact(&a).unwrap();
        assert!((f.sigma[0] - 3.0).abs() < 1e-12);
        assert!((f.sigma[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let f = svd_exact(&Matrix::zeros(4, 3)).unwrap();
        assert_eq!(f.sigma.len(), 3);
        assert!(f.sigma.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn rank_two_product_has_tiny_third_value() {
        let mut rng = crate::rng::RngStream::new(11, 0);
        let x = crate::rng::gaussian_matrix(&mut rng, 30, 2).unwrap();
        let y = crate::rng::gaussian_matrix(&mut rng, 2, 20).unwrap();
        let a = x.mul(&y);
        let f = svd_exact(&a).unwrap();
        assert!(f.sigma[2] <= 1e-10 * f.sigma[0], "sigma_3 = {}", f.sigma[2]);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let mut rng = crate::rng::RngStream::new(5, 0);
        let a = crate::rng::gaussian_matrix(&mut rng, 25, 12).unwrap();
        let f = svd_exact(&a).unwrap();
        let rec = f.reconstruct();
        assert!(rec.sub(&a).frobenius_norm() <= 1e-10 * a.frobenius_norm());
        let utu = f.u.tr_mul(&f.u);
        let vtv = f.v.tr_mul(&f.v);
        let eye = Matrix::identity(12);
        assert!(utu.sub(&eye).frobenius_norm() < 1e-9);
        assert!(vtv.sub(&eye).frobenius_norm() < 1e-9);
        for w in f.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn wide_matrix() {
        let mut rng = crate::rng::RngStream::new(6, 0);
        let a = crate::rng::gaussian_matrix(&mut rng, 8, 15).unwrap();
        let f = svd_exact(&a).unwrap();
        assert_eq!(f.sigma.len(), 8);
        assert_eq!((f.u.rows(), f.u.cols()), (8, 8));
        assert_eq!((f.v.rows(), f.v.cols()), (15, 8));
        assert!(f.reconstruct().sub(&a).frobenius_norm() <= 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn accurate_on_projected_near_rank_deficient_input() {
        // Projections of full-rank matrices onto a few leading singular
        // directions: the spectrum mixes O(1) values with rounding-level
        // noise, which is where a sloppy implementation drifts.
        for trial in 0..50 {
            let mut rng = crate::rng::RngStream::new(4200, trial);
            let (m, n) = (12 + rng.index(10), 8 + rng.index(8));
            let a = crate::rng::gaussian_matrix(&mut rng, m, n).unwrap();
            let f = svd_exact(&a).unwrap();
            let k = 1 + rng.index(4.min(n - 1));
            let q = f.u.take_columns(k);
            let ahat = q.mul(&q.tr_mul(&a));
            let fh = svd_exact(&ahat).unwrap();
            let rec = fh.reconstruct().sub(&ahat).frobenius_norm();
            assert!(
                rec <= 1e-12 * ahat.frobenius_norm(),
                "trial {trial}: reconstruction {rec:e}"
            );
            for (sa, sh) in f.sigma.iter().take(k).zip(fh.sigma.iter()) {
                assert!((sa - sh).abs() <= 1e-10 * sa.max(1.0), "trial {trial}");
            }
        }
    }

    #[test]
    fn matches_gram_eigenvalues() {
        let mut rng = crate::rng::RngStream::new(77, 0);
        let a = crate::rng::gaussian_matrix(&mut rng, 30, 14).unwrap();
        let f = svd_exact(&a).unwrap();
        let gram = a.tr_mul(&a);
        let e = crate::eig::eig_sym(&gram).unwrap();
        for (s, lam) in f.sigma.iter().zip(e.d.iter()) {
            let expected = lam.max(0.0).sqrt();
            assert!((s - expected).abs() <= 1e-9 * expected.max(1.0));
        }
    }

    #[test]
    fn single_column_and_single_row() {
        let a = Matrix::from_vec(3, 1, vec![3.0, 0.0, 4.0]).unwrap();
        let f = svd_exact(&a).unwrap();
        assert!((f.sigma[0] - 5.0).abs() < 1e-12);
        let at = a.transpose();
        let ft = svd_exact(&at).unwrap();
        assert!((ft.sigma[0] - 5.0).abs() < 1e-12);
        assert!(ft.reconstruct().sub(&at).frobenius_norm() < 1e-12);
    }
}
