//! Randomized range finding: Gaussian sketching with rank-revealing
//! truncation, range propagation across solver iterations, power iteration,
//! and the probabilistic residual singular-value estimate.

use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::qr::{default_rank_tol, partial_orthonormalize, qr_cp, qr_thin};
use crate::rng::{gaussian_matrix, RngStream};

/// Sketching parameters. `l` is the sampling rate (target rank plus
/// over-sampling), `eta` the number of power iterations.
#[derive(Debug, Clone)]
pub struct RangeConfig {
    pub l: usize,
    pub eta: usize,
    /// Relative tolerance for the rank-revealing truncation; `None` picks
    /// `max(m, n) * eps` at the call site.
    pub rank_tol: Option<f64>,
    /// Re-orthonormalize after every power step (default). Disabling defers
    /// the QR to the final step.
    pub reorthonormalize_each_step: bool,
}

impl RangeConfig {
    pub fn new(l: usize, eta: usize) -> RangeConfig {
        RangeConfig {
            l,
            eta,
            rank_tol: None,
            reorthonormalize_each_step: true,
        }
    }

    pub(crate) fn tol_for(&self, rows: usize, cols: usize) -> f64 {
        self.rank_tol.unwrap_or_else(|| default_rank_tol(rows, cols))
    }
}

/// Orthonormal basis approximating the dominant column range, with
/// `s = q.cols() <= l` the effective (revealed) rank.
#[derive(Debug, Clone)]
pub struct RangeBasis {
    pub q: Matrix,
    pub s: usize,
}

/// Sketch `Y = A * Omega` with a Gaussian `Omega` of `l` columns and extract
/// an orthonormal basis by pivoted QR, truncated to the revealed rank.
pub fn find_range(a: &Matrix, cfg: &RangeConfig, rng: &mut RngStream) -> Result<RangeBasis> {
    if cfg.l == 0 {
        return Err(invalid("find_range: sampling rate must be positive"));
    }
    if cfg.l > a.rows().min(a.cols()) {
        return Err(invalid(format!(
            "find_range: sampling rate {} exceeds min dimension {}",
            cfg.l,
            a.rows().min(a.cols())
        )));
    }
    let omega = gaussian_matrix(rng, a.cols(), cfg.l)?;
    let y = a.mul(&omega);
    let f = qr_cp(&y, cfg.tol_for(a.rows(), a.cols()))?;
    let s = f.revealed_rank.unwrap_or(f.q.cols());
    Ok(RangeBasis { q: f.q, s })
}

/// Reuse a previous basis and append `p` fresh Gaussian samples, partially
/// orthonormalized against it. Returns the augmented basis and the residual
/// norms of the appended samples (inputs to [`residual_sv_estimate`]).
pub fn propagate_range(
    a: &Matrix,
    qprev: &Matrix,
    p: usize,
    rng: &mut RngStream,
) -> Result<(RangeBasis, Vec<f64>)> {
    if qprev.rows() != a.rows() {
        return Err(invalid(format!(
            "propagate_range: basis has {} rows, matrix has {}",
            qprev.rows(),
            a.rows()
        )));
    }
    if p == 0 {
        return Ok((
            RangeBasis {
                q: qprev.clone(),
                s: qprev.cols(),
            },
            Vec::new(),
        ));
    }
    let omega = gaussian_matrix(rng, a.cols(), p)?;
    let y = a.mul(&omega);
    let (qaug, residual_norms) = partial_orthonormalize(qprev, &y)?;
    let s = qaug.cols();
    Ok((RangeBasis { q: qaug, s }, residual_norms))
}

/// `eta` power steps `Q <- orth(A (A^T Q))`, sharpening the captured
/// spectrum. With `reorth` unset the orthonormalization happens once at the
/// end; `eta = 0` returns `q` unchanged.
pub fn power_iterate(a: &Matrix, q: &Matrix, eta: usize, reorth: bool) -> Result<Matrix> {
    if q.rows() != a.rows() {
        return Err(invalid("power_iterate: row mismatch"));
    }
    if eta == 0 || q.cols() == 0 {
        return Ok(q.clone());
    }
    let mut cur = q.clone();
    for step in 0..eta {
        let z = a.mul(&a.tr_mul(&cur));
        if reorth || step + 1 == eta {
            cur = qr_thin(&z)?.q;
        } else {
            cur = z;
        }
    }
    Ok(cur)
}

/// Provable upper-bound estimate for the first unreached singular value:
/// `alpha * sqrt(2 / pi) * ||y - Q Q^T y||_2` bounds `||(I - Q Q^T) A||_2`
/// with probability at least `1 - 1/alpha` for a fresh Gaussian probe.
pub fn residual_sv_estimate(residual_norm: f64, alpha: f64) -> Result<f64> {
    if residual_norm < 0.0 {
        return Err(invalid("residual_sv_estimate: norm must be >= 0"));
    }
    if !(alpha > 1.0) {
        return Err(invalid("residual_sv_estimate: alpha must exceed 1"));
    }
    Ok(alpha * (2.0 / std::f64::consts::PI).sqrt() * residual_norm)
}
