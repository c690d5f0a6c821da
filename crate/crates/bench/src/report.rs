//! Benchmark reports: per-trial records plus per-configuration aggregates,
//! serialized as JSON for machines and CSV for plotting. Reports are
//! deterministic for a fixed spec and seed except for the timing fields;
//! [`BenchReport::without_timing`] zeroes those for comparisons.

use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub config: String,
    pub trial: usize,
    pub nrmse: f64,
    pub wall_time_ns: u64,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub rank_history: Vec<usize>,
    pub residual_history: Vec<f64>,
    /// Entry count of the recovered sparse part above the support threshold.
    pub sparse_support: Option<usize>,
    /// Squared Frobenius error against the exact operator.
    pub err_sq: Option<f64>,
    /// Closed-form squared-Frobenius error bound for this configuration.
    pub frob_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub config: String,
    pub trials: usize,
    pub mean_nrmse: f64,
    pub stddev_nrmse: f64,
    pub mean_wall_time_ns: f64,
    pub mean_iterations: Option<f64>,
    pub mean_per_iteration_ns: Option<f64>,
    pub mean_sparse_support: Option<f64>,
    pub mean_err_sq: Option<f64>,
    pub mean_frob_bound: Option<f64>,
    /// Whether the empirical mean squared error sits below the mean bound.
    pub bound_contained: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub kind: String,
    pub seed: u64,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
}

impl BenchReport {
    pub fn new(kind: &str, seed: u64, records: Vec<TrialRecord>) -> BenchReport {
        let aggregates = aggregate(&records);
        BenchReport {
            kind: kind.to_string(),
            seed,
            records,
            aggregates,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<BenchReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Copy with every timing field zeroed; two runs of the same spec and
    /// seed serialize identically after this.
    pub fn without_timing(&self) -> BenchReport {
        let mut copy = self.clone();
        for r in &mut copy.records {
            r.wall_time_ns = 0;
        }
        for a in &mut copy.aggregates {
            a.mean_wall_time_ns = 0.0;
            a.mean_per_iteration_ns = None;
        }
        copy
    }

    /// Flat per-record CSV (histories omitted).
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "config,trial,nrmse,wall_time_ns,iterations,converged,sparse_support,err_sq,frob_bound"
        )?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{:.16e},{},{},{},{},{},{}",
                r.config,
                r.trial,
                r.nrmse,
                r.wall_time_ns,
                opt(r.iterations),
                opt(r.converged),
                opt(r.sparse_support),
                opt_float(r.err_sq),
                opt_float(r.frob_bound),
            )?;
        }
        Ok(())
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_float(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

fn aggregate(records: &[TrialRecord]) -> Vec<Aggregate> {
    let mut order: Vec<&str> = Vec::new();
    for r in records {
        if !order.contains(&r.config.as_str()) {
            order.push(&r.config);
        }
    }
    order
        .into_iter()
        .map(|config| {
            let group: Vec<&TrialRecord> = records.iter().filter(|r| r.config == config).collect();
            let count = group.len();
            let mean = |f: &dyn Fn(&TrialRecord) -> f64| {
                group.iter().map(|r| f(r)).sum::<f64>() / count as f64
            };
            let mean_nrmse = mean(&|r| r.nrmse);
            let var = group
                .iter()
                .map(|r| (r.nrmse - mean_nrmse).powi(2))
                .sum::<f64>()
                / count as f64;
            let mean_time = mean(&|r| r.wall_time_ns as f64);
            let mean_iterations = if group.iter().all(|r| r.iterations.is_some()) {
                Some(mean(&|r| r.iterations.unwrap() as f64))
            } else {
                None
            };
            let mean_per_iteration_ns = mean_iterations.map(|mi| {
                if mi > 0.0 {
                    mean_time / mi
                } else {
                    0.0
                }
            });
            let mean_sparse_support = if group.iter().all(|r| r.sparse_support.is_some()) {
                Some(mean(&|r| r.sparse_support.unwrap() as f64))
            } else {
                None
            };
            let mean_err_sq = if group.iter().all(|r| r.err_sq.is_some()) {
                Some(mean(&|r| r.err_sq.unwrap()))
            } else {
                None
            };
            let mean_frob_bound = if group.iter().all(|r| r.frob_bound.is_some()) {
                Some(mean(&|r| r.frob_bound.unwrap()))
            } else {
                None
            };
            let bound_contained = match (mean_err_sq, mean_frob_bound) {
                (Some(e), Some(b)) => Some(e <= b),
                _ => None,
            };
            Aggregate {
                config: config.to_string(),
                trials: count,
                mean_nrmse,
                stddev_nrmse: var.sqrt(),
                mean_wall_time_ns: mean_time,
                mean_iterations,
                mean_per_iteration_ns,
                mean_sparse_support,
                mean_err_sq,
                mean_frob_bound,
                bound_contained,
            }
        })
        .collect()
}
