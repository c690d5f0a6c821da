//! Householder QR, QR with column pivoting (rank revealing), and partial
//! orthonormalization of appended columns.

use crate::error::{invalid, Result};
use crate::matrix::{vec_dot, vec_norm, Matrix};

/// QR factors. `perm` and `revealed_rank` are populated by the pivoted
/// variant only.
#[derive(Debug, Clone)]
pub struct QrFactors {
    /// Orthonormal columns (truncated to `revealed_rank` when pivoted).
    pub q: Matrix,
    /// Upper triangular (thin QR) or upper trapezoidal (pivoted).
    pub r: Matrix,
    /// Column permutation: input column `perm[j]` lands at position `j`.
    pub perm: Option<Vec<usize>>,
    pub revealed_rank: Option<usize>,
}

/// Rank tolerance used when callers do not pick one: `max(m, n) * eps`
/// relative to the leading pivot.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

struct Reflectors {
    work: Matrix,
    taus: Vec<f64>,
}

impl Reflectors {
    /// Apply reflector `k` to a column slice (length = rows of `work`).
    fn apply_to(&self, k: usize, x: &mut [f64]) {
        let tau = self.taus[k];
        if tau == 0.0 {
            return;
        }
        let m = self.work.rows();
        let v = self.work.col(k);
        let mut w = x[k];
        for i in k + 1..m {
            w += v[i] * x[i];
        }
        w *= tau;
        x[k] -= w;
        for i in k + 1..m {
            x[i] -= w * v[i];
        }
    }

    /// Accumulate the first `count` thin-Q columns.
    fn build_q(&self, count: usize) -> Matrix {
        let m = self.work.rows();
        let mut q = Matrix::zeros(m, count);
        for j in 0..count {
            q.set(j, j, 1.0);
        }
        for k in (0..count).rev() {
            for j in k..count {
                let col = q.col_mut(j);
                self.apply_to_raw(k, col);
            }
        }
        q
    }

    fn apply_to_raw(&self, k: usize, x: &mut [f64]) {
        self.apply_to(k, x);
    }
}

/// One Householder step on column `k` of `work`; returns tau. The reflector
/// vector is stored below the diagonal with an implicit leading 1.
fn householder_step(work: &mut Matrix, k: usize) -> f64 {
    let m = work.rows();
    let col = work.col_mut(k);
    let normx = vec_norm(&col[k..]);
    if normx == 0.0 {
        return 0.0;
    }
    let alpha = col[k];
    let beta = if alpha >= 0.0 { -normx } else { normx };
    let tau = (beta - alpha) / beta;
    let denom = alpha - beta;
    for item in col.iter_mut().take(m).skip(k + 1) {
        *item /= denom;
    }
    col[k] = beta;
    tau
}

/// Apply the reflector stored in column `k` to columns `k+1..` of `work`.
fn apply_reflector_trailing(work: &mut Matrix, k: usize, tau: f64) {
    if tau == 0.0 {
        return;
    }
    let m = work.rows();
    let n = work.cols();
    let v: Vec<f64> = work.col(k)[k + 1..m].to_vec();
    for j in k + 1..n {
        let col = work.col_mut(j);
        let mut w = col[k];
        for (i, vi) in v.iter().enumerate() {
            w += vi * col[k + 1 + i];
        }
        w *= tau;
        col[k] -= w;
        for (i, vi) in v.iter().enumerate() {
            col[k + 1 + i] -= w * vi;
        }
    }
}

/// Thin QR of a tall matrix (`rows >= cols`): `A = Q * R` with `Q` m x n
/// orthonormal and `R` n x n upper triangular.
pub fn qr_thin(a: &Matrix) -> Result<QrFactors> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(invalid(format!("qr_thin: need rows >= cols, got {m}x{n}")));
    }
    let mut work = a.clone();
    let mut taus = vec![0.0; n];
    for k in 0..n {
        taus[k] = householder_step(&mut work, k);
        apply_reflector_trailing(&mut work, k, taus[k]);
    }
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            r.set(i, j, work.get(i, j));
        }
    }
    let refl = Reflectors { work, taus };
    Ok(QrFactors {
        q: refl.build_q(n),
        r,
        perm: None,
        revealed_rank: None,
    })
}

/// QR with column pivoting. Pivot magnitudes on the diagonal of `R` are
/// non-increasing; `revealed_rank` counts pivots above `rank_tol` relative to
/// the leading one, and `Q` is truncated to that many columns.
pub fn qr_cp(a: &Matrix, rank_tol: f64) -> Result<QrFactors> {
    if a.is_empty() {
        return Err(invalid("qr_cp: matrix must be nonempty"));
    }
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(invalid("qr_cp: rank_tol must lie in (0, 1)"));
    }
    let (m, n) = (a.rows(), a.cols());
    let kmax = m.min(n);
    let mut work = a.clone();
    let mut taus = vec![0.0; kmax];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut xnorms: Vec<f64> = (0..n).map(|j| vec_norm(work.col(j))).collect();
    let mut pnorms = xnorms.clone();
    let sqrt_eps = f64::EPSILON.sqrt();
    let mut steps = kmax;

    for k in 0..kmax {
        let mut pivot = k;
        for j in k + 1..n {
            if pnorms[j] > pnorms[pivot] {
                pivot = j;
            }
        }
        if pnorms[pivot] == 0.0 {
            steps = k;
            break;
        }
        if pivot != k {
            perm.swap(k, pivot);
            xnorms.swap(k, pivot);
            pnorms.swap(k, pivot);
            for i in 0..m {
                let tmp = work.get(i, k);
                work.set(i, k, work.get(i, pivot));
                work.set(i, pivot, tmp);
            }
        }
        taus[k] = householder_step(&mut work, k);
        apply_reflector_trailing(&mut work, k, taus[k]);
        for j in k + 1..n {
            if pnorms[j] == 0.0 {
                continue;
            }
            let t = work.get(k, j).abs() / pnorms[j];
            let factor = ((1.0 + t) * (1.0 - t)).max(0.0);
            let ratio = pnorms[j] / xnorms[j];
            if factor * ratio * ratio <= sqrt_eps {
                let fresh = vec_norm(&work.col(j)[k + 1..m]);
                pnorms[j] = fresh;
                xnorms[j] = fresh;
            } else {
                pnorms[j] *= factor.sqrt();
            }
        }
    }

    let lead = if steps == 0 { 0.0 } else { work.get(0, 0).abs() };
    let mut rank = 0;
    for k in 0..steps {
        if work.get(k, k).abs() > rank_tol * lead {
            rank += 1;
        } else {
            break;
        }
    }

    let mut r = Matrix::zeros(rank, n);
    for j in 0..n {
        for i in 0..rank.min(j + 1) {
            r.set(i, j, work.get(i, j));
        }
    }
    let refl = Reflectors { work, taus };
    Ok(QrFactors {
        q: refl.build_q(rank),
        r,
        perm: Some(perm),
        revealed_rank: Some(rank),
    })
}

/// Orthonormalize the columns of `ynew` against an orthonormal `q` (modified
/// Gram-Schmidt, two passes) and append the survivors.
///
/// Returns the augmented basis together with one residual norm per input
/// column, taken after projection removal and before normalization. Columns
/// whose residual drops below `1e-12` of their own norm are dropped.
pub fn partial_orthonormalize(q: &Matrix, ynew: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    if q.rows() != ynew.rows() {
        return Err(invalid(format!(
            "partial_orthonormalize: row mismatch {} vs {}",
            q.rows(),
            ynew.rows()
        )));
    }
    let m = q.rows();
    let mut basis: Vec<Vec<f64>> = (0..q.cols()).map(|j| q.col(j).to_vec()).collect();
    let mut residual_norms = Vec::with_capacity(ynew.cols());

    for jy in 0..ynew.cols() {
        let y = ynew.col(jy);
        let ynorm = vec_norm(y);
        let mut v = y.to_vec();
        for _pass in 0..2 {
            for b in &basis {
                let coeff = vec_dot(b, &v);
                for i in 0..m {
                    v[i] -= coeff * b[i];
                }
            }
        }
        let rnorm = vec_norm(&v);
        residual_norms.push(rnorm);
        if rnorm > 1e-12 * ynorm {
            for item in v.iter_mut() {
                *item /= rnorm;
            }
            basis.push(v);
        }
    }

    let cols = basis.len();
    let mut data = Vec::with_capacity(m * cols);
    for b in basis {
        data.extend_from_slice(&b);
    }
    Ok((Matrix::from_raw(m, cols, data), residual_norms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_matrix, RngStream};
    use crate::svd::svd_exact;

    fn ortho_defect(q: &Matrix) -> f64 {
        let eye = Matrix::identity(q.cols());
        q.tr_mul(q).sub(&eye).frobenius_norm()
    }

    #[test]
    fn qr_thin_identity() {
        let f = qr_thin(&Matrix::identity(3)).unwrap();
        for i in 0..3 {
            assert!((f.q.get(i, i).abs() - 1.0).abs() < 1e-14);
            assert!((f.r.get(i, i).abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn qr_thin_scaled_identity() {
        let f = qr_thin(&Matrix::identity(4).scale(2.0)).unwrap();
        for i in 0..4 {
            assert!((f.r.get(i, i).abs() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn qr_thin_reconstructs_random() {
        let mut rng = RngStream::new(17, 0);
        let a = gaussian_matrix(&mut rng, 50, 10).unwrap();
        let f = qr_thin(&a).unwrap();
        let rec = f.q.mul(&f.r);
        assert!(rec.sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
        assert!(ortho_defect(&f.q) < 1e-13);
    }

    #[test]
    fn qr_thin_rejects_wide() {
        assert!(qr_thin(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn qr_cp_rank_one_outer_product() {
        let mut rng = RngStream::new(23, 0);
        let u = gaussian_matrix(&mut rng, 8, 1).unwrap();
        let v = gaussian_matrix(&mut rng, 1, 6).unwrap();
        let a = u.mul(&v);
        let f = qr_cp(&a, default_rank_tol(8, 6)).unwrap();
        assert_eq!(f.revealed_rank, Some(1));
        assert_eq!(f.q.cols(), 1);
    }

    #[test]
    fn qr_cp_zero_matrix() {
        let f = qr_cp(&Matrix::zeros(5, 4), 1e-12).unwrap();
        assert_eq!(f.revealed_rank, Some(0));
        assert_eq!(f.q.cols(), 0);
    }

    #[test]
    fn qr_cp_rejects_bad_tolerance() {
        let a = Matrix::identity(3);
        assert!(qr_cp(&a, 0.0).is_err());
        assert!(qr_cp(&a, 1.0).is_err());
        assert!(qr_cp(&a, f64::NAN).is_err());
        assert!(qr_cp(&Matrix::zeros(0, 0), 1e-10).is_err());
    }

    #[test]
    fn qr_cp_reveals_product_rank() {
        let mut rng = RngStream::new(31, 0);
        let x = gaussian_matrix(&mut rng, 20, 5).unwrap();
        let y = gaussian_matrix(&mut rng, 5, 12).unwrap();
        let a = x.mul(&y);
        let tol = default_rank_tol(20, 12);
        let f = qr_cp(&a, tol).unwrap();
        // Oracle: numerical rank from the exact SVD at the same tolerance.
        let sv = svd_exact(&a).unwrap().sigma;
        let oracle = sv.iter().filter(|s| **s > tol * sv[0]).count();
        assert_eq!(f.revealed_rank, Some(oracle));
        assert_eq!(f.revealed_rank, Some(5));
    }

    #[test]
    fn qr_cp_pivots_non_increasing_and_reconstructs() {
        let mut rng = RngStream::new(37, 0);
        let a = gaussian_matrix(&mut rng, 15, 9).unwrap();
        let f = qr_cp(&a, default_rank_tol(15, 9)).unwrap();
        let rank = f.revealed_rank.unwrap();
        assert_eq!(rank, 9);
        let mut last = f64::INFINITY;
        for k in 0..rank {
            let d = f.r.get(k, k).abs();
            assert!(d <= last + 1e-12);
            last = d;
        }
        let perm = f.perm.as_ref().unwrap();
        let permuted = Matrix::from_fn(15, 9, |i, j| a.get(i, perm[j]));
        let rec = f.q.mul(&f.r);
        assert!(rec.sub(&permuted).frobenius_norm() <= 1e-10 * a.frobenius_norm());
        assert!(ortho_defect(&f.q) < 1e-13);
    }

    #[test]
    fn partial_orthonormalize_in_span() {
        let mut rng = RngStream::new(41, 0);
        let base = gaussian_matrix(&mut rng, 30, 4).unwrap();
        let q = qr_thin(&base).unwrap().q;
        let coeffs = gaussian_matrix(&mut rng, 4, 2).unwrap();
        let ynew = q.mul(&coeffs);
        let (qaug, res) = partial_orthonormalize(&q, &ynew).unwrap();
        assert_eq!(qaug.cols(), 4);
        for r in res {
            assert!(r <= 1e-10 * ynew.frobenius_norm());
        }
    }

    #[test]
    fn partial_orthonormalize_from_empty() {
        let q = Matrix::zeros(6, 0);
        let mut y = Matrix::zeros(6, 1);
        y.set(2, 0, 1.0);
        let (qaug, res) = partial_orthonormalize(&q, &y).unwrap();
        assert_eq!(qaug.cols(), 1);
        assert!((res[0] - 1.0).abs() < 1e-14);
        assert!((qaug.get(2, 0).abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn partial_orthonormalize_stays_orthonormal() {
        let mut rng = RngStream::new(43, 0);
        let base = gaussian_matrix(&mut rng, 100, 5).unwrap();
        let q = qr_thin(&base).unwrap().q;
        let ynew = gaussian_matrix(&mut rng, 100, 3).unwrap();
        let (qaug, _) = partial_orthonormalize(&q, &ynew).unwrap();
        assert_eq!(qaug.cols(), 8);
        assert!(ortho_defect(&qaug) <= 1e-10);
    }

    #[test]
    fn partial_orthonormalize_dim_mismatch() {
        let q = Matrix::zeros(5, 2);
        let y = Matrix::zeros(6, 1);
        assert!(partial_orthonormalize(&q, &y).is_err());
    }
}
