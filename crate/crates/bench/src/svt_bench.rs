//! Single-operator benchmark: generate a matrix, compute the exact SVT as
//! reference, run the randomized operator over a parameter sweep, and record
//! accuracy, timing, and the closed-form error bound per configuration.

use std::time::Instant;

use frsvt_core::{
    frsvt, soft_shrink, svd_exact, svt_bounds, BoundParams, Error, FrsvtConfig, Matrix,
    RangeConfig, Result, RngStream,
};

use crate::gen::{gen_lowrank, nrmse};
use crate::report::{BenchReport, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixKind {
    GaussianFullRank,
    LowRank(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauRule {
    Fixed(f64),
    /// `tau = 1 / sqrt(||A||_2)`.
    InvSqrtSpectral,
}

#[derive(Debug, Clone)]
pub struct SvtBenchSpec {
    pub m: usize,
    pub n: usize,
    pub kind: MatrixKind,
    pub tau_rule: TauRule,
    pub ks: Vec<usize>,
    pub ps: Vec<usize>,
    pub etas: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

impl SvtBenchSpec {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("svt bench: trials must be >= 1".into()));
        }
        if self.ks.is_empty() || self.ps.is_empty() || self.etas.is_empty() {
            return Err(Error::InvalidArgument(
                "svt bench: k, p, and eta sweeps must be nonempty".into(),
            ));
        }
        let h = self.m.min(self.n);
        for &k in &self.ks {
            for &p in &self.ps {
                if k < 2 || p < 2 || k + p > h {
                    return Err(Error::InvalidArgument(format!(
                        "svt bench: sweep cell k={k} p={p} violates 2 <= k, 2 <= p, k+p <= {h}"
                    )));
                }
            }
        }
        if let MatrixKind::LowRank(r) = self.kind {
            if r == 0 || r > h {
                return Err(Error::InvalidArgument(format!(
                    "svt bench: low-rank parameter {r} out of range"
                )));
            }
        }
        if let TauRule::Fixed(v) = self.tau_rule {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(
                    "svt bench: fixed tau must be finite and >= 0".into(),
                ));
            }
        }
        Ok(())
    }
}

fn generate(spec: &SvtBenchSpec, rng: &mut RngStream) -> Result<Matrix> {
    match spec.kind {
        MatrixKind::GaussianFullRank => frsvt_core::gaussian_matrix(rng, spec.m, spec.n),
        MatrixKind::LowRank(r) => gen_lowrank(rng, spec.m, spec.n, r),
    }
}

fn run_trial(
    spec: &SvtBenchSpec,
    trial: usize,
    records: Option<&mut Vec<TrialRecord>>,
) -> Result<()> {
    let mut rng = RngStream::new(spec.seed, trial as u64);
    let a = generate(spec, &mut rng)?;
    let f = svd_exact(&a)?;
    let sigma = f.sigma.clone();
    let tau = match spec.tau_rule {
        TauRule::Fixed(v) => v,
        TauRule::InvSqrtSpectral => {
            if sigma[0] == 0.0 {
                return Err(Error::InvalidArgument(
                    "svt bench: spectral tau rule on a zero matrix".into(),
                ));
            }
            1.0 / sigma[0].sqrt()
        }
    };
    let shrunk: Vec<f64> = sigma.iter().map(|&s| soft_shrink(s, tau)).collect();
    let reference = f.reconstruct_with(&shrunk);

    let mut out = records;
    for &k in &spec.ks {
        for &p in &spec.ps {
            for &eta in &spec.etas {
                let cfg = FrsvtConfig::new(tau, RangeConfig::new(k + p, eta));
                let started = Instant::now();
                let approx = frsvt(&a, &cfg, None, &mut rng)?;
                let wall_time_ns = started.elapsed().as_nanos() as u64;
                let err = reference.sub(&approx.x).frobenius_norm();
                let bound = svt_bounds(&BoundParams::new(k, p, eta, tau, sigma.clone())?)?;
                if let Some(records) = out.as_deref_mut() {
                    records.push(TrialRecord {
                        config: format!("k={k} p={p} eta={eta}"),
                        trial,
                        nrmse: nrmse(&reference, &approx.x),
                        wall_time_ns,
                        iterations: None,
                        converged: None,
                        rank_history: vec![approx.rank_after],
                        residual_history: Vec::new(),
                        sparse_support: None,
                        err_sq: Some(err * err),
                        frob_bound: bound.frob_bound,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Run the sweep. Trial `t` draws from stream index `t` of the master seed;
/// one extra warm-up execution of trial 0 is excluded from the report.
pub fn run_svt_bench(spec: &SvtBenchSpec) -> Result<BenchReport> {
    spec.validate()?;
    run_trial(spec, 0, None)?;
    let mut records = Vec::new();
    for trial in 0..spec.trials {
        run_trial(spec, trial, Some(&mut records))?;
    }
    Ok(BenchReport::new("svt", spec.seed, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SvtBenchSpec {
        SvtBenchSpec {
            m: 60,
            n: 40,
            kind: MatrixKind::GaussianFullRank,
            tau_rule: TauRule::InvSqrtSpectral,
            ks: vec![4, 8],
            ps: vec![2],
            etas: vec![0, 2],
            trials: 3,
            seed: 11,
        }
    }

    #[test]
    fn record_count_is_trials_times_sweep() {
        let report = run_svt_bench(&small_spec()).unwrap();
        assert_eq!(report.records.len(), 3 * 2 * 2);
        assert_eq!(report.aggregates.len(), 4);
    }

    #[test]
    fn lowrank_inputs_are_recovered_exactly() {
        let spec = SvtBenchSpec {
            kind: MatrixKind::LowRank(4),
            ks: vec![4],
            ps: vec![2],
            etas: vec![1],
            trials: 5,
            seed: 13,
            ..small_spec()
        };
        let report = run_svt_bench(&spec).unwrap();
        for r in &report.records {
            assert!(r.nrmse <= 1e-8, "trial {} nrmse {}", r.trial, r.nrmse);
        }
    }

    #[test]
    fn bound_contains_error_in_every_closed_form_cell() {
        let spec = SvtBenchSpec {
            trials: 5,
            seed: 17,
            ..small_spec()
        };
        let report = run_svt_bench(&spec).unwrap();
        let mut checked = 0;
        for a in &report.aggregates {
            if let Some(contained) = a.bound_contained {
                assert!(contained, "{}: mean error above bound", a.config);
                checked += 1;
            }
        }
        assert_eq!(checked, 2, "the eta = 0 cells carry closed-form bounds");
    }

    #[test]
    fn nrmse_is_non_increasing_in_k_for_most_trials() {
        let spec = SvtBenchSpec {
            m: 200,
            n: 100,
            kind: MatrixKind::GaussianFullRank,
            tau_rule: TauRule::InvSqrtSpectral,
            ks: vec![10, 20, 40],
            ps: vec![5],
            etas: vec![2],
            trials: 20,
            seed: 19,
        };
        let report = run_svt_bench(&spec).unwrap();
        let mut monotone = 0;
        for trial in 0..spec.trials {
            let errs: Vec<f64> = spec
                .ks
                .iter()
                .map(|k| {
                    report
                        .records
                        .iter()
                        .find(|r| r.trial == trial && r.config == format!("k={k} p=5 eta=2"))
                        .unwrap()
                        .nrmse
                })
                .collect();
            if errs[0] >= errs[1] && errs[1] >= errs[2] {
                monotone += 1;
            }
        }
        assert!(
            monotone * 2 > spec.trials,
            "monotone in only {monotone}/{} trials",
            spec.trials
        );
    }

    #[test]
    fn fixed_seed_reproduces_non_timing_fields() {
        let a = run_svt_bench(&small_spec()).unwrap();
        let b = run_svt_bench(&small_spec()).unwrap();
        assert_eq!(a.without_timing().to_json(), b.without_timing().to_json());
    }

    #[test]
    fn rejects_invalid_sweeps() {
        let mut spec = small_spec();
        spec.ks = vec![1];
        assert!(run_svt_bench(&spec).is_err());
        let mut spec = small_spec();
        spec.ps = vec![40];
        assert!(run_svt_bench(&spec).is_err());
        let mut spec = small_spec();
        spec.trials = 0;
        assert!(run_svt_bench(&spec).is_err());
    }
}
