//! Benchmark harness for the SVT library: synthetic data generation,
//! accuracy/timing runs for the single thresholding operator and for the
//! robust PCA solver, matrix file I/O, and deterministic JSON/CSV reports.

pub mod gen;
pub mod io;
pub mod report;
pub mod rpca_bench;
pub mod svt_bench;

pub use gen::{gen_lowrank, gen_rpca_instance, nrmse, RpcaInstance};
pub use io::{read_matrix, write_matrix, IoError, MatrixFormat};
pub use report::{Aggregate, BenchReport, TrialRecord};
pub use rpca_bench::{backend_label, format_comparison_table, run_rpca_bench, RpcaBenchSpec};
pub use svt_bench::{run_svt_bench, MatrixKind, SvtBenchSpec, TauRule};
