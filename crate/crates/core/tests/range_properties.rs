//! Behavioral guarantees of the randomized range finder: containment in the
//! true column space, exact capture of low-rank inputs, equivalence of
//! propagation from an empty basis, and coverage of the probabilistic
//! residual estimate.

use frsvt_core::*;

fn lowrank(rng: &mut RngStream, m: usize, n: usize, r: usize) -> Matrix {
    let x = gaussian_matrix(rng, m, r).unwrap();
    let y = gaussian_matrix(rng, r, n).unwrap();
    x.mul(&y)
}

#[test]
fn basis_is_contained_in_the_column_space() {
    // Controlled spectrum: the range leak of the orthonormalization scales
    // with the cubed condition number under one power step, so the cut and
    // the conditioning are both kept benign.
    for trial in 0..20 {
        let mut rng = RngStream::new(5000, trial);
        let r = 2 + rng.index(5);
        let u = qr_thin(&gaussian_matrix(&mut rng, 40, r).unwrap()).unwrap().q;
        let v = qr_thin(&gaussian_matrix(&mut rng, 30, r).unwrap()).unwrap().q;
        let sigma: Vec<f64> = (0..r).map(|i| 3.0 - 2.0 * i as f64 / r as f64).collect();
        let mut us = u.clone();
        for j in 0..r {
            for val in us.col_mut(j) {
                *val *= sigma[j];
            }
        }
        let a = us.mul_tr(&v);

        let mut cfg = RangeConfig::new(r + 3, 0);
        cfg.rank_tol = Some(1e-8);
        let basis = find_range(&a, &cfg, &mut rng).unwrap();
        let sharpened = power_iterate(&a, &basis.q, 1, true).unwrap();
        for q in [&basis.q, &sharpened] {
            let residual = q.sub(&u.mul(&u.tr_mul(q))).frobenius_norm();
            assert!(residual <= 1e-9 * (q.cols() as f64).sqrt(), "trial {trial}");
        }
    }
}

#[test]
fn exact_capture_of_lowrank_inputs_over_100_seeds() {
    for trial in 0..100 {
        let mut rng = RngStream::new(5100, trial);
        let r = 1 + rng.index(6);
        let a = lowrank(&mut rng, 50, 35, r);
        let mut cfg = RangeConfig::new(r.max(2) + 2, 0);
        cfg.rank_tol = Some(1e-8);
        let basis = find_range(&a, &cfg, &mut rng).unwrap();
        assert_eq!(basis.s, r, "trial {trial}: captured rank");
        let residual = a.sub(&basis.q.mul(&basis.q.tr_mul(&a))).frobenius_norm();
        assert!(
            residual <= 1e-8 * a.frobenius_norm(),
            "trial {trial}: residual {residual:e}"
        );
    }
}

#[test]
fn propagation_from_empty_basis_matches_find_range_contract() {
    for trial in 0..10 {
        let mut rng1 = RngStream::new(5200, trial);
        let mut rng2 = RngStream::new(5200, trial);
        let a = gaussian_matrix(&mut rng1, 30, 25).unwrap();
        let _ = gaussian_matrix(&mut rng2, 30, 25).unwrap();
        let l = 6;
        let direct = find_range(&a, &RangeConfig::new(l, 0), &mut rng1).unwrap();
        let empty = Matrix::zeros(30, 0);
        let (propagated, _) = propagate_range(&a, &empty, l, &mut rng2).unwrap();
        assert_eq!(direct.q.cols(), l);
        assert_eq!(propagated.q.cols(), l);
        let eye = Matrix::identity(l);
        assert!(direct.q.tr_mul(&direct.q).sub(&eye).frobenius_norm() <= 1e-9);
        assert!(propagated.q.tr_mul(&propagated.q).sub(&eye).frobenius_norm() <= 1e-9);
    }
}

#[test]
fn propagation_from_empty_basis_drops_dependent_columns() {
    let mut rng = RngStream::new(5300, 0);
    let a = lowrank(&mut rng, 40, 30, 4);
    let empty = Matrix::zeros(40, 0);
    let (basis, _) = propagate_range(&a, &empty, 9, &mut rng).unwrap();
    assert_eq!(basis.s, 4, "all samples beyond the rank are in-span");
}

#[test]
fn deferred_reorthonormalization_still_returns_a_basis() {
    // With the per-step QR disabled, the orthonormalization happens once at
    // the end; the result is still orthonormal and captures comparably.
    let mut rng = RngStream::new(5500, 0);
    let a = gaussian_matrix(&mut rng, 60, 40).unwrap();
    let basis = find_range(&a, &RangeConfig::new(10, 0), &mut rng).unwrap();
    let eager = power_iterate(&a, &basis.q, 2, true).unwrap();
    let deferred = power_iterate(&a, &basis.q, 2, false).unwrap();
    let eye = Matrix::identity(10);
    assert!(deferred.tr_mul(&deferred).sub(&eye).frobenius_norm() <= 1e-9);
    let capture = |q: &Matrix| a.sub(&q.mul(&q.tr_mul(&a))).frobenius_norm();
    let (e, d) = (capture(&eager), capture(&deferred));
    assert!((e - d).abs() <= 0.05 * e, "eager {e} vs deferred {d}");
}

#[test]
fn residual_estimate_covers_the_unseen_singular_value() {
    // 1000 trials; the bound holds per trial with probability >= 0.95.
    let alpha = 20.0;
    let mut covered = 0usize;
    let trials = 1000;
    for trial in 0..trials {
        let mut rng = RngStream::new(5400, trial as u64);
        let a = lowrank(&mut rng, 50, 30, 8);
        let f = svd_exact(&a).unwrap();
        let k = 4;
        let q = f.u.take_columns(k);
        let omega = gaussian_matrix(&mut rng, 30, 1).unwrap();
        let y = a.mul(&omega);
        let projected = q.mul(&q.tr_mul(&y));
        let residual = y.sub(&projected).frobenius_norm();
        let estimate = residual_sv_estimate(residual, alpha).unwrap();
        if estimate >= f.sigma[k] {
            covered += 1;
        }
    }
    let fraction = covered as f64 / trials as f64;
    assert!(fraction >= 0.93, "coverage {fraction}");
}
