//! Adaptive sampling-rate prediction.
//!
//! The sampling rate for the next solver iteration follows the observed
//! post-threshold rank: while the rank stays below the current rate, a small
//! constant over-sample `a` suffices; once the rank saturates the rate, the
//! rate jumps by `ceil(rho * n)` to catch up, capped at `b = ceil(gamma * n)`.

use crate::error::{invalid, Result};

#[derive(Debug, Clone)]
pub struct PredictorState {
    /// Short dimension of the matrices being thresholded.
    pub n: usize,
    /// Constant over-sample applied while the rank is not saturated.
    pub a: usize,
    /// Catch-up fraction.
    pub rho: f64,
    /// Max-rank fraction.
    pub gamma: f64,
    /// Sampling-rate cap `ceil(gamma * n)`.
    pub b: usize,
    /// Current predicted sampling rate.
    pub l: usize,
    /// Last observed post-threshold rank.
    pub r: usize,
}

impl PredictorState {
    /// Start state: `b = ceil(gamma * n)`, `l_0 = ceil(0.1 * b)` (at least 1).
    pub fn init(n: usize, gamma: f64) -> Result<PredictorState> {
        Self::init_with(n, gamma, 2, 0.05)
    }

    /// As [`init`](Self::init) with explicit over-sample constant and
    /// catch-up fraction.
    pub fn init_with(n: usize, gamma: f64, a: usize, rho: f64) -> Result<PredictorState> {
        if n == 0 {
            return Err(invalid("predictor: n must be at least 1"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(invalid("predictor: gamma must lie in (0, 1]"));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(invalid("predictor: rho must lie in (0, 1]"));
        }
        let b = (gamma * n as f64).ceil() as usize;
        let l = ((0.1 * b as f64).ceil() as usize).max(1);
        Ok(PredictorState {
            n,
            a,
            rho,
            gamma,
            b,
            l,
            r: 0,
        })
    }

    /// Feed the observed rank of the last thresholding and get the next
    /// sampling rate together with the over-sampling amount.
    pub fn advance(&mut self, observed_rank: usize) -> Result<(usize, usize)> {
        if observed_rank > self.l {
            return Err(invalid(format!(
                "predictor: observed rank {observed_rank} exceeds rate {}",
                self.l
            )));
        }
        let p = if observed_rank < self.l {
            self.a
        } else {
            (self.rho * self.n as f64).ceil() as usize
        };
        let l_next = (observed_rank + p).min(self.b).max(1);
        self.r = observed_rank;
        self.l = l_next;
        Ok((l_next, p))
    }
}
