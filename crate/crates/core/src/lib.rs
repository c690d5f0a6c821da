//! Dense randomized singular value thresholding (SVT) and friends.
//!
//! The crate is organized around a plain column-major [`Matrix`] of `f64` and
//! a small set of factorization kernels (QR, pivoted QR, symmetric
//! eigendecomposition, Newton polar decomposition, exact SVD). On top of the
//! kernels sit:
//!
//! * [`range`] — randomized range finding with power iteration, range
//!   propagation across solver iterations, and a probabilistic residual
//!   singular-value estimate,
//! * [`svt`] — the exact SVT operator, its dual 2-norm-ball projection, and
//!   the fast randomized approximation (`frsvt`) including partial/weighted
//!   per-index thresholding,
//! * [`predictor`] — the adaptive sampling-rate state machine that picks the
//!   sketch width for each solver iteration,
//! * [`bounds`] — closed-form evaluators for the approximation error bounds
//!   of randomized low-rank factorization and of the approximate SVT,
//! * [`rpca`] — an inexact augmented-Lagrangian robust PCA solver with a
//!   pluggable SVT backend (exact, randomized, randomized + range
//!   propagation).
//!
//! All operations are pure functions of their inputs; randomness comes in
//! only through an explicit, splittable [`RngStream`].

pub mod bounds;
pub mod eig;
pub mod error;
pub mod matrix;
pub mod norm;
pub mod polar;
pub mod predictor;
pub mod qr;
pub mod range;
pub mod rng;
pub mod rpca;
pub mod svd;
pub mod svt;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use norm::{norm, NormKind};
pub use rng::{gaussian_matrix, RngStream};

pub use eig::{eig_sym, EigSymFactors};
pub use polar::{polar_newton, PolarFactors};
pub use qr::{partial_orthonormalize, qr_cp, qr_thin, QrFactors};
pub use svd::{svd_exact, ThinFactorization};

pub use bounds::{
    bound_compare, ltsvd_bounds, lowrank_bounds, poly_frob, svt_bounds, BoundParams,
};
pub use predictor::PredictorState;
pub use range::{
    find_range, power_iterate, propagate_range, residual_sv_estimate, RangeBasis, RangeConfig,
};
pub use rpca::{rpca_ialm, rpca_truncated, RpcaConfig, RpcaResult, SvtBackend};
pub use svt::{
    frsvt, frsvt_weighted, partial_svt, proj_2ball, soft_shrink, svt_exact, FrsvtConfig,
    SvtResult,
};
