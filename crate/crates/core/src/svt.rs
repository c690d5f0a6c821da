//! Singular value thresholding operators.
//!
//! [`svt_exact`] is the closed-form proximal operator of the nuclear norm
//! (SVD plus soft shrinkage of the spectrum) and [`proj_2ball`] its dual, the
//! Euclidean projection onto the spectral-norm ball. [`frsvt`] approximates
//! the same operator without a full SVD: it sketches an orthonormal basis for
//! the dominant range, optionally sharpened by power iteration or seeded from
//! the previous solver iteration (range propagation), then factors the small
//! core matrix of `A^T Q` by a Newton polar decomposition followed by a
//! symmetric eigendecomposition. [`partial_svt`] leaves a leading block of
//! singular values untouched; the underlying per-index threshold vector is
//! exposed as [`frsvt_weighted`].

use std::borrow::Cow;

use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::polar::{polar_newton, DEFAULT_POLAR_MAX_ITER, DEFAULT_POLAR_TOL};
use crate::qr::{qr_cp, qr_thin};
use crate::range::{
    find_range, power_iterate, propagate_range, residual_sv_estimate, RangeConfig,
};
use crate::rng::RngStream;
use crate::svd::{reconstruct_scaled, svd_exact, ThinFactorization};
use crate::{eig::eig_sym, norm, NormKind};

/// Configuration of the randomized thresholding operator.
#[derive(Debug, Clone)]
pub struct FrsvtConfig {
    /// Shrinkage threshold, `>= 0`.
    pub tau: f64,
    /// Sketching parameters (sampling rate, power iterations, rank
    /// tolerance).
    pub range: RangeConfig,
    /// Seed the basis from a carried `q_carry` when one is supplied.
    pub use_range_propagation: bool,
    /// Confidence parameter of the residual singular-value check; the bound
    /// holds with probability `1 - 1/alpha`.
    pub alpha: f64,
    /// After propagation, grow the basis (at most five extra columns) until
    /// the provable residual estimate drops below the threshold. Off by
    /// default; the rank re-check at the first power step handles the common
    /// case.
    pub use_residual_check: bool,
}

impl FrsvtConfig {
    pub fn new(tau: f64, range: RangeConfig) -> FrsvtConfig {
        FrsvtConfig {
            tau,
            range,
            use_range_propagation: true,
            alpha: 20.0,
            use_residual_check: false,
        }
    }
}

/// Output of a thresholding operator.
#[derive(Debug, Clone)]
pub struct SvtResult {
    /// The thresholded matrix.
    pub x: Matrix,
    /// Pre-threshold thin factorization of the (approximated) input; `x`
    /// reconstructs from it with the shrunk spectrum.
    pub factors: ThinFactorization,
    /// Number of singular values surviving the threshold.
    pub rank_after: usize,
    /// Basis to seed the next iteration's range finding, expressed on the
    /// shorter matrix axis (the orientation the operator works in).
    pub q_carry: Matrix,
}

enum ThresholdRule<'a> {
    Uniform(f64),
    PerIndex(&'a [f64]),
}

impl ThresholdRule<'_> {
    fn validate(&self) -> Result<()> {
        match self {
            ThresholdRule::Uniform(t) => {
                if *t < 0.0 || !t.is_finite() {
                    return Err(invalid("threshold must be finite and >= 0"));
                }
            }
            ThresholdRule::PerIndex(t) => {
                if t.is_empty() {
                    return Err(invalid("per-index thresholds must be nonempty"));
                }
                if t.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                    return Err(invalid("per-index thresholds must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }

    /// Threshold for singular value index `i`; per-index vectors are padded
    /// with their last entry.
    fn at(&self, i: usize) -> f64 {
        match self {
            ThresholdRule::Uniform(t) => *t,
            ThresholdRule::PerIndex(t) => t[i.min(t.len() - 1)],
        }
    }

    fn max(&self) -> f64 {
        match self {
            ThresholdRule::Uniform(t) => *t,
            ThresholdRule::PerIndex(t) => t.iter().fold(0.0_f64, |m, v| m.max(*v)),
        }
    }
}

/// Soft shrinkage: `sgn(x) * max(|x| - tau, 0)`.
pub fn soft_shrink(x: f64, tau: f64) -> f64 {
    x.signum() * (x.abs() - tau).max(0.0)
}

fn apply_rule(sigma: &[f64], rule: &ThresholdRule) -> (Vec<f64>, usize) {
    let shrunk: Vec<f64> = sigma
        .iter()
        .enumerate()
        .map(|(i, &s)| soft_shrink(s, rule.at(i)))
        .collect();
    let rank_after = shrunk.iter().filter(|v| **v > 0.0).count();
    (shrunk, rank_after)
}

fn exact_with_rule(a: &Matrix, rule: &ThresholdRule) -> Result<SvtResult> {
    rule.validate()?;
    let f = svd_exact(a)?;
    let (shrunk, rank_after) = apply_rule(&f.sigma, rule);
    let x = reconstruct_scaled(&f.u, &shrunk, &f.v);
    let q_carry = if a.rows() > a.cols() {
        f.v.clone()
    } else {
        f.u.clone()
    };
    Ok(SvtResult {
        x,
        factors: f,
        rank_after,
        q_carry,
    })
}

/// Exact SVT by full SVD: `U * shrink(Sigma) * V^T`.
pub fn svt_exact(a: &Matrix, tau: f64) -> Result<SvtResult> {
    exact_with_rule(a, &ThresholdRule::Uniform(tau))
}

/// Exact partial SVT: the leading `keep` singular values pass through, the
/// rest are soft-shrunk by `tau`.
pub fn partial_svt_exact(a: &Matrix, tau: f64, keep: usize) -> Result<SvtResult> {
    let s = a.rows().min(a.cols());
    let t: Vec<f64> = (0..s.max(1))
        .map(|i| if i < keep { 0.0 } else { tau })
        .collect();
    exact_with_rule(a, &ThresholdRule::PerIndex(&t))
}

/// Euclidean projection onto the spectral-norm ball of radius `tau`:
/// `U * min(Sigma, tau) * V^T`. Satisfies `A = svt_exact(A).x + proj_2ball(A)`.
pub fn proj_2ball(a: &Matrix, tau: f64) -> Result<Matrix> {
    if tau < 0.0 || !tau.is_finite() {
        return Err(invalid("proj_2ball: tau must be finite and >= 0"));
    }
    let f = svd_exact(a)?;
    let clipped: Vec<f64> = f.sigma.iter().map(|&s| s.min(tau)).collect();
    Ok(reconstruct_scaled(&f.u, &clipped, &f.v))
}

/// Fast randomized SVT. `carry`, when present and enabled in the config, is
/// the `q_carry` of the previous call on a same-shaped matrix.
pub fn frsvt(
    a: &Matrix,
    cfg: &FrsvtConfig,
    carry: Option<&Matrix>,
    rng: &mut RngStream,
) -> Result<SvtResult> {
    run_frsvt(a, &ThresholdRule::Uniform(cfg.tau), cfg, carry, rng)
}

/// Randomized partial SVT: singular values up to index `keep` pass through
/// unshrunk, the rest are thresholded by `tau`. Requires `keep < cfg.range.l`.
pub fn partial_svt(
    a: &Matrix,
    tau: f64,
    keep: usize,
    cfg: &FrsvtConfig,
    carry: Option<&Matrix>,
    rng: &mut RngStream,
) -> Result<SvtResult> {
    if keep >= cfg.range.l {
        return Err(invalid(format!(
            "partial_svt: keep = {keep} must be below the sampling rate {}",
            cfg.range.l
        )));
    }
    let t: Vec<f64> = (0..cfg.range.l)
        .map(|i| if i < keep { 0.0 } else { tau })
        .collect();
    run_frsvt(a, &ThresholdRule::PerIndex(&t), cfg, carry, rng)
}

/// Randomized SVT with one threshold per singular-value index (indices past
/// the end reuse the last entry). The closed form is the exact proximal
/// operator only for non-decreasing threshold sequences; arbitrary
/// non-negative weights are applied mechanically.
pub fn frsvt_weighted(
    a: &Matrix,
    thresholds: &[f64],
    cfg: &FrsvtConfig,
    carry: Option<&Matrix>,
    rng: &mut RngStream,
) -> Result<SvtResult> {
    run_frsvt(a, &ThresholdRule::PerIndex(thresholds), cfg, carry, rng)
}

fn zero_result(m: usize, n: usize) -> SvtResult {
    SvtResult {
        x: Matrix::zeros(m, n),
        factors: ThinFactorization {
            u: Matrix::zeros(m, 0),
            sigma: Vec::new(),
            v: Matrix::zeros(n, 0),
        },
        rank_after: 0,
        q_carry: Matrix::zeros(m.min(n), 0),
    }
}

/// QR of `A^T Q` followed by the polar decomposition of the core matrix.
fn factor_core(bt: &Matrix) -> Result<(Matrix, Matrix, Matrix)> {
    let f = qr_thin(bt)?;
    let polar = polar_newton(&f.r, DEFAULT_POLAR_TOL, DEFAULT_POLAR_MAX_ITER)?;
    Ok((f.q, polar.w, polar.p))
}

fn run_frsvt(
    a: &Matrix,
    rule: &ThresholdRule,
    cfg: &FrsvtConfig,
    carry: Option<&Matrix>,
    rng: &mut RngStream,
) -> Result<SvtResult> {
    if a.is_empty() {
        return Err(invalid("frsvt: matrix must be nonempty"));
    }
    rule.validate()?;
    let (m, n) = (a.rows(), a.cols());
    let minmn = m.min(n);
    let l = cfg.range.l;
    if l == 0 || l > minmn {
        return Err(invalid(format!(
            "frsvt: sampling rate {l} must lie in 1..={minmn}"
        )));
    }

    // Keep the power-iterated side short: work on A^T when rows > cols and
    // swap the factors back at the end.
    let flipped = m > n;
    let work: Cow<'_, Matrix> = if flipped {
        Cow::Owned(a.transpose())
    } else {
        Cow::Borrowed(a)
    };
    let wm = work.rows();
    let tol = cfg.range.tol_for(work.rows(), work.cols());

    let carried = match carry {
        Some(c) if cfg.use_range_propagation => {
            if c.rows() != wm {
                return Err(invalid(format!(
                    "frsvt: carry basis has {} rows, expected {wm}",
                    c.rows()
                )));
            }
            Some(c)
        }
        _ => None,
    };

    let mut propagated = false;
    let mut q = match carried {
        Some(c) => {
            propagated = true;
            let prev = if c.cols() > l { c.take_columns(l) } else { c.clone() };
            let p = l - prev.cols();
            let (basis, residuals) = propagate_range(&work, &prev, p, rng)?;
            let mut q = basis.q;
            if cfg.use_residual_check {
                let mut last = residuals.last().copied();
                let mut extra = 0;
                while let Some(r) = last {
                    let estimate = residual_sv_estimate(r, cfg.alpha)?;
                    if estimate <= rule.max() || extra >= 5 || q.cols() >= wm {
                        break;
                    }
                    let (aug, res) = propagate_range(&work, &q, 1, rng)?;
                    q = aug.q;
                    last = res.last().copied();
                    extra += 1;
                }
            }
            q
        }
        None => find_range(&work, &cfg.range, rng)?.q,
    };
    if q.cols() == 0 {
        return Ok(zero_result(m, n));
    }

    // Power iteration; after propagation the first step doubles as the rank
    // re-check via pivoted QR.
    let eta = cfg.range.eta;
    if propagated && eta >= 1 {
        let z = work.mul(&work.tr_mul(&q));
        q = qr_cp(&z, tol)?.q;
        if q.cols() == 0 {
            return Ok(zero_result(m, n));
        }
        if eta > 1 {
            q = power_iterate(&work, &q, eta - 1, cfg.range.reorthonormalize_each_step)?;
        }
    } else if eta > 0 {
        q = power_iterate(&work, &q, eta, cfg.range.reorthonormalize_each_step)?;
    }

    // Factor the core; a singular core means the rank was over-estimated, so
    // truncate by revealed rank once and retry.
    let mut bt = work.tr_mul(&q);
    let mut core = factor_core(&bt);
    if core.is_err() {
        let z = work.mul(&bt);
        let f = qr_cp(&z, tol)?;
        if f.q.cols() == 0 {
            return Ok(zero_result(m, n));
        }
        q = f.q;
        bt = work.tr_mul(&q);
        core = factor_core(&bt);
    }
    let (h, w, p_mat) = core?;
    let eig = eig_sym(&p_mat)?;

    let left = q.mul(&eig.v);
    let right = h.mul(&w).mul(&eig.v);
    let (shrunk, rank_after) = apply_rule(&eig.d, rule);
    let x_oriented = reconstruct_scaled(&left, &shrunk, &right);

    let (x, u_factor, v_factor) = if flipped {
        (x_oriented.transpose(), right, left.clone())
    } else {
        (x_oriented, left.clone(), right)
    };
    Ok(SvtResult {
        x,
        factors: ThinFactorization {
            u: u_factor,
            sigma: eig.d,
            v: v_factor,
        },
        rank_after,
        q_carry: left,
    })
}

/// Convenience: `1 / sqrt(||A||_2)`, the threshold rule used by the
/// full-rank benchmarks.
pub fn inv_sqrt_spectral_tau(a: &Matrix) -> Result<f64> {
    let s1 = norm(a, NormKind::Spectral)?;
    if s1 == 0.0 {
        return Err(invalid("inv_sqrt_spectral_tau: zero matrix"));
    }
    Ok(1.0 / s1.sqrt())
}
