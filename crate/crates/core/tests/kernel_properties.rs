//! Cross-cutting invariants of the factorization kernels: reconstruction,
//! orthonormality, polar uniqueness, revealed-rank consistency and
//! determinism.

use frsvt_core::*;

fn lowrank(rng: &mut RngStream, m: usize, n: usize, r: usize) -> Matrix {
    let x = gaussian_matrix(rng, m, r).unwrap();
    let y = gaussian_matrix(rng, r, n).unwrap();
    x.mul(&y)
}

fn ortho_defect(q: &Matrix) -> f64 {
    let eye = Matrix::identity(q.cols());
    q.tr_mul(q).sub(&eye).frobenius_norm()
}

#[test]
fn factor_reconstruction_100_trials() {
    for trial in 0..100 {
        let mut rng = RngStream::new(9000, trial);
        let m = 5 + rng.index(40);
        let n = 2 + rng.index(m.min(20) - 1);
        let a = gaussian_matrix(&mut rng, m, n).unwrap();
        let scale = a.frobenius_norm();

        let qr = qr_thin(&a).unwrap();
        assert!(qr.q.mul(&qr.r).sub(&a).frobenius_norm() <= 1e-9 * scale);

        let cp = qr_cp(&a, qr::default_rank_tol(m, n)).unwrap();
        let perm = cp.perm.as_ref().unwrap();
        let permuted = Matrix::from_fn(m, n, |i, j| a.get(i, perm[j]));
        assert!(cp.q.mul(&cp.r).sub(&permuted).frobenius_norm() <= 1e-9 * scale);

        let f = svd_exact(&a).unwrap();
        assert!(f.reconstruct().sub(&a).frobenius_norm() <= 1e-9 * scale);

        let p = a.tr_mul(&a);
        let e = eig_sym(&p).unwrap();
        assert!(e.reconstruct().sub(&p).frobenius_norm() <= 1e-9 * p.frobenius_norm());
    }
}

#[test]
fn orthonormality_up_to_1000x200() {
    for &(m, n) in &[(50, 10), (300, 40), (1000, 200)] {
        let mut rng = RngStream::new(9100, m as u64);
        let a = gaussian_matrix(&mut rng, m, n).unwrap();
        let q = qr_thin(&a).unwrap().q;
        assert!(ortho_defect(&q) <= 1e-9, "{m}x{n} defect {}", ortho_defect(&q));
        let qcp = qr_cp(&a, qr::default_rank_tol(m, n)).unwrap().q;
        assert!(ortho_defect(&qcp) <= 1e-9);
    }
}

#[test]
fn polar_factor_matches_symmetric_square_root() {
    // Oracle route: P must equal (C^T C)^{1/2} computed by eigendecomposition.
    for trial in 0..20 {
        let mut rng = RngStream::new(9200, trial);
        let n = 3 + rng.index(20);
        let c = gaussian_matrix(&mut rng, n, n).unwrap();
        let f = polar_newton(&c, polar::DEFAULT_POLAR_TOL, polar::DEFAULT_POLAR_MAX_ITER).unwrap();

        let gram = c.tr_mul(&c);
        let e = eig_sym(&gram).unwrap();
        let sqrt_d: Vec<f64> = e.d.iter().map(|v| v.max(0.0).sqrt()).collect();
        let mut vd = e.v.clone();
        for j in 0..sqrt_d.len() {
            for val in vd.col_mut(j) {
                *val *= sqrt_d[j];
            }
        }
        let root = vd.mul_tr(&e.v);
        let rel = f.p.sub(&root).frobenius_norm() / root.frobenius_norm();
        assert!(rel <= 1e-8, "trial {trial}: relative gap {rel}");
    }
}

#[test]
fn qr_cp_rank_matches_svd_rank_on_gapped_spectra() {
    for trial in 0..20 {
        let mut rng = RngStream::new(9300, trial);
        let m = 20 + rng.index(30);
        let n = 10 + rng.index(10);
        let r = 1 + rng.index(n.min(8));
        // Spectrum with a >= 10x gap at the cut: strong leading block plus a
        // tiny full-rank tail.
        let strong = lowrank(&mut rng, m, n, r);
        let noise = gaussian_matrix(&mut rng, m, n).unwrap();
        let s1 = norm(&strong, NormKind::Spectral).unwrap();
        let a = strong.add(&noise.scale(1e-9 * s1));

        let tol = 1e-6;
        let sv = svd_exact(&a).unwrap().sigma;
        let oracle = sv.iter().filter(|s| **s > tol * sv[0]).count();
        let revealed = qr_cp(&a, tol).unwrap().revealed_rank.unwrap();
        assert_eq!(revealed, oracle, "trial {trial}");
    }
}

#[test]
fn kernels_are_bit_reproducible() {
    let mut rng1 = RngStream::new(9400, 7);
    let mut rng2 = RngStream::new(9400, 7);
    let a1 = gaussian_matrix(&mut rng1, 40, 15).unwrap();
    let a2 = gaussian_matrix(&mut rng2, 40, 15).unwrap();
    assert_eq!(a1.data(), a2.data());

    let q1 = qr_thin(&a1).unwrap();
    let q2 = qr_thin(&a2).unwrap();
    assert_eq!(q1.q.data(), q2.q.data());
    assert_eq!(q1.r.data(), q2.r.data());

    let c1 = qr_cp(&a1, 1e-10).unwrap();
    let c2 = qr_cp(&a2, 1e-10).unwrap();
    assert_eq!(c1.q.data(), c2.q.data());
    assert_eq!(c1.perm, c2.perm);

    let g1 = a1.tr_mul(&a1);
    let e1 = eig_sym(&g1).unwrap();
    let e2 = eig_sym(&g1).unwrap();
    assert_eq!(e1.d, e2.d);
    assert_eq!(e1.v.data(), e2.v.data());

    let sq = a1.take_columns(15);
    let sq = sq.tr_mul(&sq).add(&Matrix::identity(15));
    let p1 = polar_newton(&sq, 1e-12, 30).unwrap();
    let p2 = polar_newton(&sq, 1e-12, 30).unwrap();
    assert_eq!(p1.w.data(), p2.w.data());
    assert_eq!(p1.iterations, p2.iterations);

    let s1 = svd_exact(&a1).unwrap();
    let s2 = svd_exact(&a1).unwrap();
    assert_eq!(s1.sigma, s2.sigma);
    assert_eq!(s1.u.data(), s2.u.data());
}

#[test]
fn polar_iteration_count_is_small_on_well_scaled_input() {
    let mut rng = RngStream::new(9500, 0);
    let mut total = 0usize;
    let trials = 50;
    for _ in 0..trials {
        let n = 10 + rng.index(30);
        let c = gaussian_matrix(&mut rng, n, n).unwrap();
        let f = polar_newton(&c, polar::DEFAULT_POLAR_TOL, polar::DEFAULT_POLAR_MAX_ITER).unwrap();
        total += f.iterations;
    }
    let mean = total as f64 / trials as f64;
    assert!(mean <= 12.0, "mean Newton iterations {mean}");
}
