//! Robust PCA by the inexact augmented Lagrange multiplier scheme, splitting
//! an observation into a low-rank part (via SVT) and a sparse part (via
//! entrywise soft shrinkage). The SVT step is pluggable: exact, randomized,
//! or randomized with the basis carried across iterations.

use std::time::{Duration, Instant};

use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;
use crate::norm::{norm, NormKind};
use crate::predictor::PredictorState;
use crate::range::RangeConfig;
use crate::rng::RngStream;
use crate::svt::{frsvt, partial_svt, partial_svt_exact, soft_shrink, svt_exact, FrsvtConfig};

/// Which operator performs the low-rank update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvtBackend {
    Exact,
    Frsvt,
    FrsvtRp,
}

impl SvtBackend {
    pub fn is_randomized(self) -> bool {
        !matches!(self, SvtBackend::Exact)
    }
}

#[derive(Debug, Clone)]
pub struct RpcaConfig {
    /// Sparsity weight; `None` picks `1 / sqrt(max(m, n))`.
    pub lambda: Option<f64>,
    /// Initial penalty; `None` picks `1.25 / ||O||_2`.
    pub mu0: Option<f64>,
    /// Penalty growth factor, `> 1`.
    pub rho_mu: f64,
    /// Penalty cap; `None` picks `1e7 * mu0`.
    pub mu_max: Option<f64>,
    /// Stopping tolerance on `||O - L - S||_F / ||O||_F`.
    pub tol: f64,
    pub max_iter: usize,
    pub backend: SvtBackend,
    /// Max-rank fraction handed to the sampling-rate predictor.
    pub predictor_gamma: f64,
    /// Power iterations inside the randomized SVT.
    pub eta: usize,
    /// Constant over-sample of the predictor.
    pub oversample_a: usize,
}

impl Default for RpcaConfig {
    fn default() -> RpcaConfig {
        RpcaConfig {
            lambda: None,
            mu0: None,
            rho_mu: 1.5,
            mu_max: None,
            tol: 1e-7,
            max_iter: 200,
            backend: SvtBackend::Exact,
            predictor_gamma: 0.2,
            eta: 2,
            oversample_a: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RpcaResult {
    /// Recovered low-rank component.
    pub l: Matrix,
    /// Recovered sparse component.
    pub s: Matrix,
    pub iterations: usize,
    /// False when the loop hit `max_iter` before reaching `tol`.
    pub converged: bool,
    /// `||O - L - S||_F / ||O||_F` per iteration.
    pub residual_history: Vec<f64>,
    /// Post-threshold rank per iteration.
    pub rank_history: Vec<usize>,
    /// Wall time per iteration.
    pub svt_time_history: Vec<Duration>,
    /// Basis carried out of the last iteration (range-propagation backend
    /// only); seeds the next solve in semi-online use.
    pub final_carry: Option<Matrix>,
}

/// Robust PCA: minimize `||L||_* + lambda ||S||_1` subject to `O = L + S`.
pub fn rpca_ialm(o: &Matrix, cfg: &RpcaConfig, rng: &mut RngStream) -> Result<RpcaResult> {
    solve(o, None, cfg, None, rng)
}

/// Truncated-nuclear-norm variant: the leading `keep` singular values are
/// exempt from shrinkage.
pub fn rpca_truncated(
    o: &Matrix,
    keep: usize,
    cfg: &RpcaConfig,
    rng: &mut RngStream,
) -> Result<RpcaResult> {
    solve(o, Some(keep), cfg, None, rng)
}

/// As [`rpca_truncated`], seeded with a basis carried from a previous solve
/// on related data (the semi-online pattern).
pub fn rpca_truncated_with_carry(
    o: &Matrix,
    keep: usize,
    cfg: &RpcaConfig,
    carry: Option<Matrix>,
    rng: &mut RngStream,
) -> Result<RpcaResult> {
    solve(o, Some(keep), cfg, carry, rng)
}

fn validate_config(cfg: &RpcaConfig) -> Result<()> {
    if let Some(l) = cfg.lambda {
        if !(l > 0.0) {
            return Err(invalid("rpca: lambda must be positive"));
        }
    }
    if !(cfg.rho_mu > 1.0) {
        return Err(invalid("rpca: rho_mu must exceed 1"));
    }
    if !(cfg.tol > 0.0) {
        return Err(invalid("rpca: tol must be positive"));
    }
    if cfg.max_iter == 0 {
        return Err(invalid("rpca: max_iter must be at least 1"));
    }
    Ok(())
}

/// `o - x + y * inv_mu`, one pass.
fn shift_combine(o: &Matrix, x: &Matrix, y: &Matrix, inv_mu: f64) -> Matrix {
    let data: Vec<f64> = o
        .data()
        .iter()
        .zip(x.data())
        .zip(y.data())
        .map(|((&ov, &xv), &yv)| ov - xv + yv * inv_mu)
        .collect();
    Matrix::from_raw(o.rows(), o.cols(), data)
}

fn shrink_entries(a: &Matrix, tau: f64) -> Matrix {
    a.map(|v| soft_shrink(v, tau))
}

fn solve(
    o: &Matrix,
    keep: Option<usize>,
    cfg: &RpcaConfig,
    carry_in: Option<Matrix>,
    rng: &mut RngStream,
) -> Result<RpcaResult> {
    validate_config(cfg)?;
    if o.is_empty() {
        return Err(invalid("rpca: observation must be nonempty"));
    }
    let (m, n) = (o.rows(), o.cols());
    let minmn = m.min(n);
    if let Some(k) = keep {
        if k >= minmn {
            return Err(invalid(format!(
                "rpca: keep = {k} must be below min dimension {minmn}"
            )));
        }
    }

    let fro = o.frobenius_norm();
    if fro == 0.0 {
        return Ok(RpcaResult {
            l: Matrix::zeros(m, n),
            s: Matrix::zeros(m, n),
            iterations: 0,
            converged: true,
            residual_history: Vec::new(),
            rank_history: Vec::new(),
            svt_time_history: Vec::new(),
            final_carry: None,
        });
    }

    let spectral = norm(o, NormKind::Spectral)?;
    let lambda = cfg
        .lambda
        .unwrap_or_else(|| 1.0 / (m.max(n) as f64).sqrt());
    let dual_scale = spectral.max(o.max_abs() / lambda);
    let mut y = o.scale(1.0 / dual_scale);
    let mut mu = cfg.mu0.unwrap_or(1.25 / spectral);
    let mu_max = cfg.mu_max.unwrap_or(1e7 * mu);

    let mut l_mat = Matrix::zeros(m, n);
    let mut s_mat = Matrix::zeros(m, n);
    let mut predictor = if cfg.backend.is_randomized() {
        Some(PredictorState::init_with(
            minmn,
            cfg.predictor_gamma,
            cfg.oversample_a,
            0.05,
        )?)
    } else {
        None
    };
    let mut carry = if cfg.backend == SvtBackend::FrsvtRp {
        carry_in
    } else {
        None
    };

    let mut residual_history = Vec::new();
    let mut rank_history = Vec::new();
    let mut svt_time_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iter {
        let started = Instant::now();
        let inv_mu = 1.0 / mu;

        s_mat = shrink_entries(&shift_combine(o, &l_mat, &y, inv_mu), lambda * inv_mu);
        let gl = shift_combine(o, &s_mat, &y, inv_mu);
        let tau_it = inv_mu;

        let res = match cfg.backend {
            SvtBackend::Exact => match keep {
                None => svt_exact(&gl, tau_it),
                Some(k) => partial_svt_exact(&gl, tau_it, k),
            },
            SvtBackend::Frsvt | SvtBackend::FrsvtRp => {
                let state = predictor.as_mut().expect("predictor present");
                let mut l_rate = state.l.clamp(1, minmn);
                if let Some(k) = keep {
                    l_rate = l_rate.max(k + 1).min(minmn);
                }
                // Keep the predictor's invariant r <= l when the clamp above
                // raised the rate.
                state.l = state.l.max(l_rate);
                let fcfg = FrsvtConfig {
                    tau: tau_it,
                    range: RangeConfig::new(l_rate, cfg.eta),
                    use_range_propagation: cfg.backend == SvtBackend::FrsvtRp,
                    alpha: 20.0,
                    use_residual_check: false,
                };
                let carry_ref = carry.as_ref();
                match keep {
                    None => frsvt(&gl, &fcfg, carry_ref, rng),
                    Some(k) => partial_svt(&gl, tau_it, k, &fcfg, carry_ref, rng),
                }
            }
        }
        .map_err(|e| Error::SvtFailed {
            iteration: it,
            source: Box::new(e),
        })?;

        l_mat = res.x;
        let observed = res.rank_after;
        rank_history.push(observed);
        if let Some(state) = predictor.as_mut() {
            state.advance(observed.min(state.l))?;
        }
        if cfg.backend == SvtBackend::FrsvtRp {
            let cols = observed.min(res.q_carry.cols());
            carry = Some(res.q_carry.take_columns(cols));
        }

        let z = o.sub(&l_mat).sub(&s_mat);
        y.add_scaled(mu, &z);
        let residual = z.frobenius_norm() / fro;
        residual_history.push(residual);
        mu = (mu * cfg.rho_mu).min(mu_max);
        svt_time_history.push(started.elapsed());
        iterations = it;

        if residual <= cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(RpcaResult {
        l: l_mat,
        s: s_mat,
        iterations,
        converged,
        residual_history,
        rank_history,
        svt_time_history,
        final_carry: carry,
    })
}
