//! Closed-form evaluators for the approximation error bounds of randomized
//! low-rank factorization and of the approximate SVT built on it, plus the
//! column-sampling (linear-time SVD) bounds used for comparison.
//!
//! Conventions: `sigma` is the full non-increasing singular-value list of the
//! input (`h = min(m, n)` entries), `k` the target rank, `p >= 2` the
//! over-sampling, `eta` the number of power iterations. Squared-Frobenius
//! bounds have a simple closed form only without power iteration; with
//! `eta > 0` they are reported as absent rather than approximated.

use crate::error::{invalid, Result};

/// Parameters of the polynomial error bounds.
#[derive(Debug, Clone)]
pub struct BoundParams {
    pub k: usize,
    pub p: usize,
    pub eta: usize,
    /// `min(m, n)`; equals `sigma.len()`.
    pub h: usize,
    pub tau: f64,
    /// Full singular-value list, non-increasing.
    pub sigma: Vec<f64>,
}

impl BoundParams {
    pub fn new(k: usize, p: usize, eta: usize, tau: f64, sigma: Vec<f64>) -> Result<BoundParams> {
        if k < 2 {
            return Err(invalid("bounds: target rank k must be at least 2"));
        }
        if p < 2 {
            return Err(invalid("bounds: over-sampling p must be at least 2"));
        }
        let h = sigma.len();
        if k + p > h {
            return Err(invalid(format!(
                "bounds: k + p = {} exceeds h = {h}",
                k + p
            )));
        }
        if tau < 0.0 || !tau.is_finite() {
            return Err(invalid("bounds: tau must be finite and >= 0"));
        }
        if sigma.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(invalid("bounds: singular values must be finite and >= 0"));
        }
        if sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid("bounds: singular values must be non-increasing"));
        }
        Ok(BoundParams {
            k,
            p,
            eta,
            h,
            tau,
            sigma,
        })
    }

    fn tail_sq(&self) -> f64 {
        self.sigma[self.k..].iter().map(|s| s * s).sum()
    }

    fn sigma_next(&self) -> f64 {
        self.sigma[self.k]
    }

    /// The bracketed spectral bound: with `t = 2 eta + 1`,
    /// `[(1 + sqrt(k/(p-1))) s_{k+1}^t + (e sqrt(k+p)/p) (sum_{j>k} s_j^{2t})^{1/2}]^{1/t}`,
    /// evaluated with the tail scaled by `s_{k+1}` for overflow safety.
    fn spectral_bracket(&self) -> f64 {
        let s1 = self.sigma_next();
        if s1 == 0.0 {
            return 0.0;
        }
        let t = (2 * self.eta + 1) as f64;
        let a = 1.0 + (self.k as f64 / (self.p as f64 - 1.0)).sqrt();
        let c = std::f64::consts::E * ((self.k + self.p) as f64).sqrt() / self.p as f64;
        let scaled_tail: f64 = self.sigma[self.k..]
            .iter()
            .map(|s| (s / s1).powf(2.0 * t))
            .sum();
        s1 * (a + c * scaled_tail.sqrt()).powf(1.0 / t)
    }

    fn loose_poly(&self) -> f64 {
        let t = (2 * self.eta + 1) as f64;
        let a = 1.0 + (self.k as f64 / (self.p as f64 - 1.0)).sqrt();
        let c = std::f64::consts::E * ((self.k + self.p) as f64).sqrt() / self.p as f64;
        (a + c * ((self.h - self.k) as f64).sqrt()).powf(1.0 / t)
    }
}

/// `1 + k / (p - 1)`, the squared-Frobenius bound polynomial without power
/// iteration.
pub fn poly_frob(k: usize, p: usize) -> Result<f64> {
    if p < 2 {
        return Err(invalid("poly_frob: p must be at least 2"));
    }
    Ok(1.0 + k as f64 / (p as f64 - 1.0))
}

/// Error bounds for the randomized rank-`k` approximation itself.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankBounds {
    /// Theoretical minimum of the expected squared Frobenius error.
    pub frob_min: f64,
    /// Expected squared Frobenius error upper bound; absent when power
    /// iterations are requested (no simple closed form).
    pub frob_max: Option<f64>,
    /// Theoretical minimum of the expected spectral error.
    pub spec_min: f64,
    /// Expected spectral error upper bound with the power scheme.
    pub spec_max: f64,
    /// Loose spectral bound `poly * sigma_{k+1}`.
    pub spec_loose: f64,
}

pub fn lowrank_bounds(bp: &BoundParams) -> Result<LowRankBounds> {
    let tail = bp.tail_sq();
    let frob_max = if bp.eta == 0 {
        Some(poly_frob(bp.k, bp.p)? * tail)
    } else {
        None
    };
    Ok(LowRankBounds {
        frob_min: tail,
        frob_max,
        spec_min: bp.sigma_next(),
        spec_max: bp.spectral_bracket(),
        spec_loose: bp.loose_poly() * bp.sigma_next(),
    })
}

/// Error bounds for the approximate SVT. The spectral bounds report the
/// worst-case pseudo-contraction constant `C = 2`; all values are clamped at
/// zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SvtBounds {
    /// Expected squared Frobenius error bound (absent when `eta > 0`).
    pub frob_bound: Option<f64>,
    pub spec_bound: f64,
    pub spec_loose: f64,
}

pub fn svt_bounds(bp: &BoundParams) -> Result<SvtBounds> {
    const C: f64 = 2.0;
    let g: f64 = bp.sigma[bp.k..]
        .iter()
        .map(|s| {
            let m = s.min(bp.tau);
            m * m
        })
        .sum();
    let g_spec = bp.sigma_next().min(bp.tau);
    let frob_bound = if bp.eta == 0 {
        Some((poly_frob(bp.k, bp.p)? * bp.tail_sq() - g).max(0.0))
    } else {
        None
    };
    Ok(SvtBounds {
        frob_bound,
        spec_bound: (C * bp.spectral_bracket() - g_spec).max(0.0),
        spec_loose: (C * bp.loose_poly() * bp.sigma_next() - g_spec).max(0.0),
    })
}

/// Column-sampling (linear-time SVD) bounds in the `c = 2k`, `beta = 1`
/// regime, where the sampling slack is `epsilon = sqrt(2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtsvdBounds {
    /// Expected squared Frobenius error bound.
    pub frob_bound: f64,
    /// Expected spectral error bound.
    pub spec_bound: f64,
}

pub fn ltsvd_bounds(sigma: &[f64], k: usize) -> Result<LtsvdBounds> {
    if k == 0 {
        return Err(invalid("ltsvd_bounds: k must be at least 1"));
    }
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    let tail: f64 = sigma.iter().skip(k).map(|s| s * s).sum();
    let next = sigma.get(k).copied().unwrap_or(0.0);
    let sqrt2 = std::f64::consts::SQRT_2;
    Ok(LtsvdBounds {
        frob_bound: tail + sqrt2 * total,
        spec_bound: (next * next + sqrt2 * total).sqrt(),
    })
}

/// Head-to-head squared-Frobenius comparison at matched budgets (`p = k`
/// against column sampling with `c = 2k`). For `k >= 4` the Gaussian-sketch
/// bound is guaranteed tighter.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundComparison {
    pub gauss_sketch_frob: f64,
    pub ltsvd_frob: f64,
    pub sketch_tighter: bool,
}

pub fn bound_compare(sigma: &[f64], k: usize) -> Result<BoundComparison> {
    if k < 2 {
        return Err(invalid("bound_compare: k must be at least 2"));
    }
    let tail: f64 = sigma.iter().skip(k).map(|s| s * s).sum();
    let sketch = poly_frob(k, k)? * tail;
    let ltsvd = ltsvd_bounds(sigma, k)?.frob_bound;
    Ok(BoundComparison {
        gauss_sketch_frob: sketch,
        ltsvd_frob: ltsvd,
        sketch_tighter: sketch <= ltsvd,
    })
}
