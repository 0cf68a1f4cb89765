//! Command-line surface for the curvature engine.
//!
//! Three subcommands cover the batch workflows:
//!
//! * `scal` — evaluate the trace-one scalar curvature at one point, given
//!   either a comma-separated spectrum or a JSON matrix file, by closed
//!   form (with per-term breakdown) or by the definition-level oracle.
//! * `verify` — cross-check every closed-form quantity against its oracle
//!   on random points and report per-quantity worst relative errors
//!   against a documented budget.
//! * `scan` — run a randomized majorization scan (or a boundary ray) and
//!   write its CSV/JSON report.
//!
//! Output discipline: everything on stdout is machine-parseable JSON or
//! CSV; human-oriented text goes to stderr only. Exit codes are a stable
//! contract: 0 success, 1 verification failure, 2 parse error (including
//! bad flags), 3 domain error (invalid mathematical input or
//! configuration), 4 I/O failure. Inputs are never silently normalized:
//! a matrix or spectrum with trace ≠ 1 is an error unless `--normalize`
//! is given.
//!
//! Orchestration here is single-threaded; the library parallelizes scans
//! and oracle sweeps internally, and `KUBOMORI_THREADS` caps that worker
//! pool (default: machine cores).

mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kubomori::closedform::scal1_closed;
use kubomori::conjlab::{self, ScanMethod, ScanOptions};
use kubomori::{
    float17, parse_matrix_json, parse_spectrum, Error, OracleConfig, PosDefMatrix, Spectrum,
    SymMatrix,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 4;

/// How a library error maps onto the exit-code contract.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => EXIT_PARSE,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_DOMAIN,
    }
}

#[derive(Parser)]
#[command(
    name = "kubomori",
    about = "Curvature of the trace-one positive definite matrices",
    after_help = "Exit codes: 0 success, 1 verification failure, 2 parse error, \
                  3 domain error, 4 I/O failure.\n\
                  Environment: KUBOMORI_THREADS caps worker parallelism.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the trace-one scalar curvature at one point.
    Scal(ScalArgs),
    /// Cross-check closed forms against the definition-level oracle.
    Verify(VerifyArgs),
    /// Run a randomized majorization scan or a boundary ray.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    /// Eigenvalue-only closed forms with per-term breakdown.
    Closed,
    /// Definition-level quadrature/finite-difference oracle.
    Oracle,
}

impl MethodArg {
    fn scan_method(self) -> ScanMethod {
        match self {
            MethodArg::Closed => ScanMethod::ClosedForm,
            MethodArg::Oracle => ScanMethod::Oracle,
        }
    }
}

impl std::fmt::Display for MethodArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MethodArg::Closed => "closed",
            MethodArg::Oracle => "oracle",
        })
    }
}

/// Tuning overrides for the oracle evaluator.
#[derive(Args)]
struct OracleArgs {
    /// Relative finite-difference step for oracle derivatives.
    #[arg(long, value_name = "REL")]
    fd_step_rel: Option<f64>,
    /// Richardson extrapolation levels for oracle derivatives.
    #[arg(long, value_name = "K")]
    richardson_levels: Option<usize>,
    /// Absolute tolerance for oracle quadratures.
    #[arg(long, value_name = "TOL")]
    quad_tol: Option<f64>,
}

impl OracleArgs {
    fn build(&self) -> OracleConfig {
        let mut cfg = OracleConfig::default();
        if let Some(v) = self.fd_step_rel {
            cfg.fd_step_rel = v;
        }
        if let Some(v) = self.richardson_levels {
            cfg.richardson_levels = v;
        }
        if let Some(v) = self.quad_tol {
            cfg.quad_tol = v;
        }
        cfg
    }
}

#[derive(Args)]
struct ScalArgs {
    /// Comma-separated positive eigenvalues, e.g. 0.5,0.3,0.2.
    #[arg(
        long,
        value_name = "LIST",
        required_unless_present = "matrix",
        conflicts_with = "matrix"
    )]
    spectrum: Option<String>,
    /// Path to a JSON 2-D array; symmetrized before use.
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
    /// Evaluator to run.
    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    method: MethodArg,
    /// Scale the input to trace one instead of rejecting it.
    #[arg(long)]
    normalize: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Matrix side length, between 2 and 6.
    #[arg(long)]
    n: usize,
    /// Random points per quantity.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Seed for the random points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Budget for the metric against its quadrature oracle.
    #[arg(long, value_name = "TOL", default_value_t = 1e-8)]
    tol_metric: f64,
    /// Budget for the inverse metric against its oracle.
    #[arg(long, value_name = "TOL", default_value_t = 1e-8)]
    tol_ginv: f64,
    /// Budget for the Christoffel form against finite differences.
    #[arg(long, value_name = "TOL", default_value_t = 1e-6)]
    tol_christoffel: f64,
    /// Budget for the curvature tensor against finite differences.
    #[arg(long, value_name = "TOL", default_value_t = 1e-5)]
    tol_curvature: f64,
    /// Budget for the trace-one scalar curvature against its oracle.
    #[arg(long, value_name = "TOL", default_value_t = 1e-4)]
    tol_scal: f64,
    /// Write the JSON summary here instead of stdout.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Spectrum dimension, at least 2.
    #[arg(long)]
    n: usize,
    /// Number of random spectra to draw.
    #[arg(long, required_unless_present = "ray_steps")]
    samples: Option<usize>,
    /// Seed for the scan's random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluator for every sample.
    #[arg(long, value_enum, default_value_t = MethodArg::Closed)]
    method: MethodArg,
    /// Compare every sampled pair instead of the near-linear plan.
    #[arg(long)]
    exhaustive_pairs: bool,
    /// Fraction of samples re-evaluated with the other method.
    #[arg(long, value_name = "FRAC", default_value_t = 0.01)]
    crosscheck_fraction: f64,
    /// Walk the segment from the uniform spectrum to a near-pure one in
    /// this many steps instead of random sampling.
    #[arg(
        long,
        value_name = "STEPS",
        conflicts_with_all = ["samples", "exhaustive_pairs", "crosscheck_fraction"]
    )]
    ray_steps: Option<usize>,
    /// Directory for scan.csv and scan.json (ray.csv in ray mode).
    #[arg(short, long, value_name = "DIR")]
    output: Option<PathBuf>,
    #[command(flatten)]
    oracle: OracleArgs,
}

fn main() -> ExitCode {
    if let Ok(raw) = std::env::var("KUBOMORI_THREADS") {
        match raw.parse::<usize>() {
            Ok(k) if k >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring unusable KUBOMORI_THREADS={raw:?}"),
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Scal(args) => cmd_scal(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Scan(args) => cmd_scan(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Emits machine output: to the file when a path is given, else stdout.
fn emit(output: Option<&PathBuf>, content: &str) -> kubomori::Result<()> {
    match output {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// The evaluation point: always a spectrum, plus the full matrix when the
/// input was one (the oracle differentiates through the matrix itself).
struct ScalInput {
    spectrum: Spectrum,
    matrix: Option<PosDefMatrix>,
}

fn read_scal_input(args: &ScalArgs) -> kubomori::Result<ScalInput> {
    if let Some(text) = &args.spectrum {
        let mut spectrum = parse_spectrum(text)?;
        spectrum = normalized_spectrum(spectrum, args.normalize)?;
        return Ok(ScalInput {
            spectrum,
            matrix: None,
        });
    }
    let path = args.matrix.as_ref().expect("clap requires one input");
    let text = std::fs::read_to_string(path)?;
    let raw = parse_matrix_json(&text)?;
    let mut d = PosDefMatrix::new(SymMatrix::symmetric_part(&raw))?;
    let trace = d.matrix().trace();
    if args.normalize {
        d = PosDefMatrix::new(d.matrix().scaled(1.0 / trace))?;
    } else {
        check_trace_one(trace)?;
    }
    Ok(ScalInput {
        spectrum: d.spectrum().clone(),
        matrix: Some(d),
    })
}

fn normalized_spectrum(spectrum: Spectrum, normalize: bool) -> kubomori::Result<Spectrum> {
    let trace = spectrum.trace();
    if normalize {
        let values: Vec<f64> = spectrum.values().iter().map(|v| v / trace).collect();
        Spectrum::new(values)
    } else {
        check_trace_one(trace)?;
        Ok(spectrum)
    }
}

fn check_trace_one(trace: f64) -> kubomori::Result<()> {
    if (trace - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "trace must be 1 (got {trace}); pass --normalize to scale the input"
        )));
    }
    Ok(())
}

fn cmd_scal(args: &ScalArgs) -> kubomori::Result<ExitCode> {
    let input = read_scal_input(args)?;
    let spectrum_json: Vec<String> = input
        .spectrum
        .values()
        .iter()
        .map(|&v| float17(v))
        .collect();
    let body = match args.method {
        MethodArg::Closed => {
            let report = scal1_closed(&input.spectrum)?;
            format!(
                "\"scal1\": {},\n  \"terms\": {{\n    \"offdiag_offdiag\": {},\n    \
                 \"q_twice\": {},\n    \"diag_diag\": {},\n    \"second\": {},\n    \
                 \"third\": {}\n  }},\n  \"total_final_formula\": {}",
                float17(report.total_assembled),
                float17(report.term_offdiag_offdiag),
                float17(report.term_q_twice),
                float17(report.term_diag_diag),
                float17(report.term_second),
                float17(report.term_third),
                float17(report.total_final_formula)
            )
        }
        MethodArg::Oracle => {
            let cfg = args.oracle.build();
            let d = match input.matrix {
                Some(d) => d,
                None => PosDefMatrix::new(SymMatrix::diagonal(input.spectrum.values()))?,
            };
            let value = scal1_oracle_checked(&d, &cfg)?;
            format!("\"scal1\": {}", float17(value))
        }
    };
    let json = format!(
        "{{\n  \"n\": {},\n  \"spectrum\": [{}],\n  \"method\": \"{}\",\n  {}\n}}\n",
        input.spectrum.n(),
        spectrum_json.join(", "),
        match args.method {
            MethodArg::Closed => "closed",
            MethodArg::Oracle => "oracle",
        },
        body
    );
    emit(args.output.as_ref(), &json)?;
    Ok(ExitCode::SUCCESS)
}

/// The oracle's own trace gate is looser than the CLI's; funnel through
/// the CLI gate first so both methods reject identically.
fn scal1_oracle_checked(d: &PosDefMatrix, cfg: &OracleConfig) -> kubomori::Result<f64> {
    check_trace_one(d.matrix().trace())?;
    kubomori::oracle::scal1_oracle(d, cfg)
}

fn cmd_verify(args: &VerifyArgs) -> kubomori::Result<ExitCode> {
    let budgets = verify::Budgets {
        metric: args.tol_metric,
        ginv: args.tol_ginv,
        christoffel: args.tol_christoffel,
        curvature: args.tol_curvature,
        scal: args.tol_scal,
    };
    let summary = verify::run(
        args.n,
        args.trials,
        args.seed,
        &budgets,
        &args.oracle.build(),
    )?;
    eprint!("{}", verify::render_human(&summary));
    emit(args.output.as_ref(), &verify::render_json(&summary))?;
    if summary.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VERIFY_FAILED))
    }
}

fn cmd_scan(args: &ScanArgs) -> kubomori::Result<ExitCode> {
    if let Some(steps) = args.ray_steps {
        let points = conjlab::ray_scan(
            args.n,
            steps,
            args.method.scan_method(),
            &args.oracle.build(),
        )?;
        let csv = conjlab::write_ray_csv(args.n, &points);
        match &args.output {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join("ray.csv");
                std::fs::write(&path, &csv)?;
                eprintln!("ray: {} points -> {}", points.len(), path.display());
            }
            None => print!("{csv}"),
        }
        return Ok(ExitCode::SUCCESS);
    }

    let mut options = ScanOptions::new(
        args.n,
        args.samples
            .expect("clap requires samples without --ray-steps"),
        args.seed,
        args.method.scan_method(),
    );
    options.exhaustive_pairs = args.exhaustive_pairs;
    options.crosscheck_fraction = args.crosscheck_fraction;
    options.oracle = args.oracle.build();
    let report = conjlab::scan(&options)?;
    let json = conjlab::write_json(&report);
    if let Some(dir) = &args.output {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join("scan.csv");
        let json_path = dir.join("scan.json");
        std::fs::write(&csv_path, conjlab::write_csv(&report))?;
        std::fs::write(&json_path, &json)?;
        eprintln!(
            "scan: wrote {} and {}",
            csv_path.display(),
            json_path.display()
        );
    }
    print!("{json}");
    eprintln!(
        "scan: {} records, {} comparisons, {} violations, {} failures; uniform is minimum: {}",
        report.records.len(),
        report.comparisons,
        report.violations.len(),
        report.failures.len(),
        report.uniform_is_minimum
    );
    Ok(ExitCode::SUCCESS)
}
