//! Benchmark CLI.
//!
//! Exit codes: 0 on success, 1 on invalid arguments or I/O failure, 2 when a
//! solver run did not converge. `FRSVT_SEED` overrides the default seed and
//! `FRSVT_OUT_DIR` prefixes relative output paths.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use frsvt_bench::{
    format_comparison_table, gen_lowrank, read_matrix, run_rpca_bench, run_svt_bench,
    write_matrix, BenchReport, MatrixFormat, MatrixKind, RpcaBenchSpec, SvtBenchSpec, TauRule,
};
use frsvt_core::{gaussian_matrix, RngStream, SvtBackend};

#[derive(Parser)]
#[command(
    name = "bench",
    about = "Randomized-SVT benchmarks and matrix file tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-SVT accuracy and timing sweep against the exact operator.
    Svt(SvtArgs),
    /// Robust PCA comparison across SVT backends.
    Rpca(RpcaArgs),
    /// Matrix file export/import.
    Matrix {
        #[command(subcommand)]
        op: MatrixCmd,
    },
}

#[derive(Args)]
struct SvtArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// gauss | lowrank:R
    #[arg(long, default_value = "gauss")]
    kind: String,
    /// fixed:V | inv-sqrt-spec
    #[arg(long, default_value = "inv-sqrt-spec")]
    tau: String,
    /// Target ranks, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    k: Vec<usize>,
    /// Over-sampling values, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    p: Vec<usize>,
    /// Power-iteration counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    eta: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, env = "FRSVT_SEED", default_value_t = 0)]
    seed: u64,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat CSV of the per-trial records.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RpcaArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    rank_ratio: f64,
    #[arg(long, default_value_t = 0.1)]
    corruption: f64,
    #[arg(long, default_value_t = 10.0)]
    amplitude: f64,
    /// Comma-separated subset of exact,frsvt,frsvt-rp.
    #[arg(long, value_delimiter = ',', default_value = "exact,frsvt,frsvt-rp")]
    backend: Vec<String>,
    /// auto | positive number
    #[arg(long, default_value = "auto")]
    lambda: String,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 0.2)]
    gamma: f64,
    #[arg(long, default_value_t = 2)]
    eta: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, env = "FRSVT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MatrixCmd {
    /// Generate a matrix and write it to a file.
    Export(ExportArgs),
    /// Read a matrix file and print a summary.
    Import(ImportArgs),
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    format: MatrixFormatArg,
    #[arg(long)]
    path: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Low-rank factor rank; full-rank Gaussian when omitted.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, env = "FRSVT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    format: MatrixFormatArg,
    #[arg(long)]
    path: PathBuf,
}

#[derive(Clone, Copy)]
struct MatrixFormatArg(MatrixFormat);

impl std::str::FromStr for MatrixFormatArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<MatrixFormat>().map(MatrixFormatArg)
    }
}

fn parse_kind(text: &str) -> Result<MatrixKind, String> {
    if text == "gauss" {
        return Ok(MatrixKind::GaussianFullRank);
    }
    if let Some(r) = text.strip_prefix("lowrank:") {
        let r: usize = r
            .parse()
            .map_err(|_| format!("bad rank in kind '{text}'"))?;
        return Ok(MatrixKind::LowRank(r));
    }
    Err(format!("unknown kind '{text}' (gauss | lowrank:R)"))
}

fn parse_tau(text: &str) -> Result<TauRule, String> {
    if text == "inv-sqrt-spec" {
        return Ok(TauRule::InvSqrtSpectral);
    }
    if let Some(v) = text.strip_prefix("fixed:") {
        let v: f64 = v.parse().map_err(|_| format!("bad value in tau '{text}'"))?;
        return Ok(TauRule::Fixed(v));
    }
    Err(format!("unknown tau rule '{text}' (fixed:V | inv-sqrt-spec)"))
}

fn parse_backend(text: &str) -> Result<SvtBackend, String> {
    match text {
        "exact" => Ok(SvtBackend::Exact),
        "frsvt" => Ok(SvtBackend::Frsvt),
        "frsvt-rp" => Ok(SvtBackend::FrsvtRp),
        other => Err(format!(
            "unknown backend '{other}' (exact | frsvt | frsvt-rp)"
        )),
    }
}

fn parse_lambda(text: &str) -> Result<Option<f64>, String> {
    if text == "auto" {
        return Ok(None);
    }
    let v: f64 = text.parse().map_err(|_| format!("bad lambda '{text}'"))?;
    if v <= 0.0 {
        return Err("lambda must be positive".into());
    }
    Ok(Some(v))
}

/// Relative output paths land under `FRSVT_OUT_DIR` when it is set.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os("FRSVT_OUT_DIR") {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

fn write_report(
    report: &BenchReport,
    out: &Option<PathBuf>,
    csv: &Option<PathBuf>,
) -> Result<(), String> {
    if let Some(path) = out {
        let path = resolve_out(path);
        std::fs::write(&path, report.to_json())
            .map_err(|e| format!("writing {}: {e}", path.display()))?;
        println!("report written to {}", path.display());
    }
    if let Some(path) = csv {
        let path = resolve_out(path);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).map_err(|e| e.to_string())?;
        std::fs::write(&path, buf).map_err(|e| format!("writing {}: {e}", path.display()))?;
        println!("csv written to {}", path.display());
    }
    Ok(())
}

fn run_svt(args: SvtArgs) -> Result<ExitCode, String> {
    let spec = SvtBenchSpec {
        m: args.m,
        n: args.n,
        kind: parse_kind(&args.kind)?,
        tau_rule: parse_tau(&args.tau)?,
        ks: args.k,
        ps: args.p,
        etas: args.eta,
        trials: args.trials,
        seed: args.seed,
    };
    let report = run_svt_bench(&spec).map_err(|e| e.to_string())?;
    for a in &report.aggregates {
        println!(
            "{:<20} nrmse {:.3e} +- {:.1e}   time {:.3} ms{}",
            a.config,
            a.mean_nrmse,
            a.stddev_nrmse,
            a.mean_wall_time_ns / 1e6,
            match (a.mean_err_sq, a.mean_frob_bound, a.bound_contained) {
                (Some(e), Some(b), Some(ok)) => format!(
                    "   err^2 {:.3e} <= bound {:.3e}: {}",
                    e,
                    b,
                    if ok { "yes" } else { "NO" }
                ),
                _ => String::new(),
            }
        );
    }
    write_report(&report, &args.out, &args.csv)?;
    Ok(ExitCode::SUCCESS)
}

fn run_rpca(args: RpcaArgs) -> Result<ExitCode, String> {
    let backends = args
        .backend
        .iter()
        .map(|b| parse_backend(b))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = RpcaBenchSpec {
        sizes: vec![(args.m, args.n)],
        backends,
        rank_ratio: args.rank_ratio,
        corruption_fraction: args.corruption,
        sparse_amplitude: args.amplitude,
        lambda: parse_lambda(&args.lambda)?,
        tol: args.tol,
        max_iter: args.max_iter,
        predictor_gamma: args.gamma,
        eta: args.eta,
        trials: args.trials,
        seed: args.seed,
    };
    let report = run_rpca_bench(&spec).map_err(|e| e.to_string())?;
    print!("{}", format_comparison_table(&report));
    write_report(&report, &args.out, &args.csv)?;
    let all_converged = report.records.iter().all(|r| r.converged == Some(true));
    if all_converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("warning: at least one run did not converge");
        Ok(ExitCode::from(2))
    }
}

fn run_matrix(cmd: MatrixCmd) -> Result<ExitCode, String> {
    match cmd {
        MatrixCmd::Export(args) => {
            let mut rng = RngStream::new(args.seed, 0);
            let matrix = match args.rank {
                Some(r) => gen_lowrank(&mut rng, args.m, args.n, r),
                None => gaussian_matrix(&mut rng, args.m, args.n),
            }
            .map_err(|e| e.to_string())?;
            let path = resolve_out(&args.path);
            write_matrix(&path, &matrix, args.format.0).map_err(|e| e.to_string())?;
            println!("wrote {}x{} matrix to {}", args.m, args.n, path.display());
            Ok(ExitCode::SUCCESS)
        }
        MatrixCmd::Import(args) => {
            let matrix = read_matrix(&args.path, args.format.0).map_err(|e| e.to_string())?;
            println!(
                "{}x{}  frobenius {:.6e}  max|entry| {:.6e}",
                matrix.rows(),
                matrix.cols(),
                matrix.frobenius_norm(),
                matrix.max_abs()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let outcome = match cli.command {
        Command::Svt(args) => run_svt(args),
        Command::Rpca(args) => run_rpca(args),
        Command::Matrix { op } => run_matrix(op),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
