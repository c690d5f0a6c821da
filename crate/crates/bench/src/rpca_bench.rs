//! Robust-PCA benchmark across sizes and SVT backends on generated
//! low-rank-plus-sparse instances, with a comparison table over iterations,
//! accuracy, recovered support, and timing.

use std::fmt::Write as _;
use std::time::Instant;

use frsvt_core::{rpca_ialm, Error, Result, RngStream, RpcaConfig, SvtBackend};

use crate::gen::{gen_rpca_instance, nrmse};
use crate::report::{BenchReport, TrialRecord};

#[derive(Debug, Clone)]
pub struct RpcaBenchSpec {
    pub sizes: Vec<(usize, usize)>,
    pub backends: Vec<SvtBackend>,
    pub rank_ratio: f64,
    pub corruption_fraction: f64,
    pub sparse_amplitude: f64,
    /// `None` picks `1 / sqrt(max(m, n))` per size.
    pub lambda: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub predictor_gamma: f64,
    pub eta: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for RpcaBenchSpec {
    fn default() -> RpcaBenchSpec {
        RpcaBenchSpec {
            sizes: vec![(200, 200)],
            backends: vec![SvtBackend::Exact, SvtBackend::Frsvt, SvtBackend::FrsvtRp],
            rank_ratio: 0.1,
            corruption_fraction: 0.1,
            sparse_amplitude: 10.0,
            lambda: None,
            tol: 1e-7,
            max_iter: 200,
            predictor_gamma: 0.2,
            eta: 2,
            trials: 1,
            seed: 0,
        }
    }
}

pub fn backend_label(b: SvtBackend) -> &'static str {
    match b {
        SvtBackend::Exact => "exact",
        SvtBackend::Frsvt => "frsvt",
        SvtBackend::FrsvtRp => "frsvt-rp",
    }
}

/// Run every backend on the same generated instances. Instance for trial `t`
/// uses stream `2t`, the solver for all backends uses stream `2t + 1`, so
/// backends see identical data and identical sketch randomness.
pub fn run_rpca_bench(spec: &RpcaBenchSpec) -> Result<BenchReport> {
    if spec.trials == 0 || spec.sizes.is_empty() || spec.backends.is_empty() {
        return Err(Error::InvalidArgument(
            "rpca bench: sizes, backends, and trials must be nonempty".into(),
        ));
    }
    let mut records = Vec::new();
    for &(m, n) in &spec.sizes {
        for trial in 0..spec.trials {
            let mut gen_rng = RngStream::new(spec.seed, 2 * trial as u64);
            let inst = gen_rpca_instance(
                &mut gen_rng,
                m,
                n,
                spec.rank_ratio,
                spec.corruption_fraction,
                spec.sparse_amplitude,
            )?;
            let support_eps = 1e-6 * inst.o.max_abs();
            for &backend in &spec.backends {
                let cfg = RpcaConfig {
                    lambda: spec.lambda,
                    tol: spec.tol,
                    max_iter: spec.max_iter,
                    backend,
                    predictor_gamma: spec.predictor_gamma,
                    eta: spec.eta,
                    ..RpcaConfig::default()
                };
                let mut solve_rng = RngStream::new(spec.seed, 2 * trial as u64 + 1);
                let started = Instant::now();
                let res = rpca_ialm(&inst.o, &cfg, &mut solve_rng)?;
                let wall_time_ns = started.elapsed().as_nanos() as u64;
                records.push(TrialRecord {
                    config: format!("{m}x{n} backend={}", backend_label(backend)),
                    trial,
                    nrmse: nrmse(&inst.l0, &res.l),
                    wall_time_ns,
                    iterations: Some(res.iterations),
                    converged: Some(res.converged),
                    rank_history: res.rank_history,
                    residual_history: res.residual_history,
                    sparse_support: Some(res.s.count_above(support_eps)),
                    err_sq: None,
                    frob_bound: None,
                });
            }
        }
    }
    Ok(BenchReport::new("rpca", spec.seed, records))
}

/// Text table over the aggregates: one metric block per row group, one
/// column per configuration.
pub fn format_comparison_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let width = 22usize;
    let _ = write!(out, "{:<24}", "metric");
    for a in &report.aggregates {
        let _ = write!(out, "{:>width$}", a.config);
    }
    out.push('\n');
    let rows: [(&str, Box<dyn Fn(&crate::report::Aggregate) -> String>); 5] = [
        (
            "iterations",
            Box::new(|a| a.mean_iterations.map(|v| format!("{v:.1}")).unwrap_or_default()),
        ),
        ("nrmse", Box::new(|a| format!("{:.3e}", a.mean_nrmse))),
        (
            "sparse support",
            Box::new(|a| {
                a.mean_sparse_support
                    .map(|v| format!("{v:.0}"))
                    .unwrap_or_default()
            }),
        ),
        (
            "total time (s)",
            Box::new(|a| format!("{:.3}", a.mean_wall_time_ns / 1e9)),
        ),
        (
            "time/iteration (s)",
            Box::new(|a| {
                a.mean_per_iteration_ns
                    .map(|v| format!("{:.3}", v / 1e9))
                    .unwrap_or_default()
            }),
        ),
    ];
    for (label, f) in rows {
        let _ = write!(out, "{label:<24}");
        for a in &report.aggregates {
            let _ = write!(out, "{:>width$}", f(a));
        }
        out.push('\n');
    }
    out
}
