//! Command-line front end: closed-form bounds for a single case, oracle
//! verification, and sample-size sweeps with CSV output.
//!
//! Exit codes: 0 success, 1 usage or validation problem, 2 failed sandwich
//! check, 3 oracle failure.

use std::io::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use priorgap::engine::Monotonicity;
use priorgap::models::{BinomialSuccessCase, ModelCase, NormalVarianceCase, PoissonRateCase};
use priorgap::numerics::QuadratureSettings;
use priorgap::sweep::{
    default_mode, fit_decay_slope, render_csv, run_sweep_mode, ExecMode, SlopeColumn, SweepModel,
    SweepPlan,
};
use priorgap::wasserstein::{w1_crosscheck, OracleSettings};
use priorgap::{Error, Result};

#[derive(Parser)]
#[command(
    name = "priorgap",
    version,
    about = "Bounds on how far a change of prior moves a posterior, in Wasserstein distance"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form bounds for one model case.
    Bounds(CaseArgs),
    /// Recompute the bounds numerically and check them against the
    /// brute-force distance oracle.
    Verify(CaseArgs),
    /// Sweep growing sample sizes on synthetic data, emit CSV, and fit the
    /// decay slope of each bound column.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    /// Normal observations, known mean, unknown variance.
    NormalVariance,
    /// Bernoulli trials, unknown success probability.
    Binomial,
    /// Poisson counts, unknown rate.
    Poisson,
}

#[derive(Args)]
struct CaseArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Sample size.
    #[arg(long)]
    n: u64,
    /// Sum of squared deviations from the known mean (normal-variance only).
    #[arg(long)]
    s: Option<f64>,
    /// Success count (binomial only).
    #[arg(long)]
    successes: Option<u64>,
    /// Total event count (poisson only).
    #[arg(long)]
    sum_x: Option<u64>,
    /// Extra prior shape (normal-variance, binomial).
    #[arg(long)]
    alpha: Option<f64>,
    /// Extra prior scale (normal-variance, binomial).
    #[arg(long)]
    beta: Option<f64>,
    /// First gamma prior shape (poisson).
    #[arg(long)]
    a1: Option<f64>,
    /// First gamma prior rate (poisson).
    #[arg(long)]
    b1: Option<f64>,
    /// Second gamma prior shape (poisson).
    #[arg(long)]
    a2: Option<f64>,
    /// Second gamma prior rate (poisson).
    #[arg(long)]
    b2: Option<f64>,
    /// Override the relative quadrature tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Override the absolute quadrature tolerance.
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Single-line machine-readable key=value output.
    #[arg(long)]
    porcelain: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    b1: Option<f64>,
    #[arg(long)]
    a2: Option<f64>,
    #[arg(long)]
    b2: Option<f64>,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "10,32,100,316,1000,3162,10000")]
    n_grid: Vec<u64>,
    /// Data-generating parameter: variance, success probability, or rate.
    #[arg(long)]
    true_param: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    replicates: u32,
    /// Write the CSV here instead of standard output (slopes then go to
    /// standard output instead of standard error).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run rows sequentially even if parallel execution is available.
    #[arg(long)]
    serial: bool,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
}

fn main() {
    let code = match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            0
        }
        Err(e) => {
            let _ = e.print();
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> i32 {
    let outcome = match cli.cmd {
        Cmd::Bounds(args) => cmd_bounds(&args),
        Cmd::Verify(args) => cmd_verify(&args),
        Cmd::Sweep(args) => cmd_sweep(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Sandwich { .. } => 2,
        Error::OracleMismatch { .. } => 3,
        _ => 1,
    }
}

fn quad_settings(rel_tol: Option<f64>, abs_tol: Option<f64>) -> (QuadratureSettings, OracleSettings) {
    let mut quad = QuadratureSettings::default();
    let mut oracle = OracleSettings::default();
    if let Some(rel) = rel_tol {
        quad.rel_tol = rel;
        oracle.quad.rel_tol = rel;
    }
    if let Some(abs) = abs_tol {
        quad.abs_tol = abs;
        oracle.quad.abs_tol = abs;
    }
    (quad, oracle)
}

fn missing(model: &str, flags: &str) -> Error {
    Error::Model(format!("{model} requires {flags}"))
}

fn build_case(args: &CaseArgs) -> Result<ModelCase> {
    match args.model {
        ModelKind::NormalVariance => {
            let (s, alpha, beta) = match (args.s, args.alpha, args.beta) {
                (Some(s), Some(a), Some(b)) => (s, a, b),
                _ => return Err(missing("normal-variance", "--s, --alpha and --beta")),
            };
            Ok(ModelCase::NormalVariance(NormalVarianceCase {
                n: args.n,
                centered_sq_sum: s,
                alpha,
                beta,
            }))
        }
        ModelKind::Binomial => {
            let (x, alpha, beta) = match (args.successes, args.alpha, args.beta) {
                (Some(x), Some(a), Some(b)) => (x, a, b),
                _ => return Err(missing("binomial", "--successes, --alpha and --beta")),
            };
            Ok(ModelCase::BinomialSuccess(BinomialSuccessCase {
                n: args.n,
                successes: x,
                alpha,
                beta,
            }))
        }
        ModelKind::Poisson => {
            let (sum_x, a1, b1, a2, b2) =
                match (args.sum_x, args.a1, args.b1, args.a2, args.b2) {
                    (Some(sx), Some(a1), Some(b1), Some(a2), Some(b2)) => (sx, a1, b1, a2, b2),
                    _ => return Err(missing("poisson", "--sum-x, --a1, --b1, --a2 and --b2")),
                };
            Ok(ModelCase::PoissonRate(PoissonRateCase {
                n: args.n,
                sum_x,
                alpha1: a1,
                beta1: b1,
                alpha2: a2,
                beta2: b2,
            }))
        }
    }
}

fn build_sweep_model(args: &SweepArgs) -> Result<SweepModel> {
    match args.model {
        ModelKind::NormalVariance => match (args.alpha, args.beta) {
            (Some(alpha), Some(beta)) => Ok(SweepModel::NormalVariance { alpha, beta }),
            _ => Err(missing("normal-variance sweep", "--alpha and --beta")),
        },
        ModelKind::Binomial => match (args.alpha, args.beta) {
            (Some(alpha), Some(beta)) => Ok(SweepModel::BinomialSuccess { alpha, beta }),
            _ => Err(missing("binomial sweep", "--alpha and --beta")),
        },
        ModelKind::Poisson => match (args.a1, args.b1, args.a2, args.b2) {
            (Some(alpha1), Some(beta1), Some(alpha2), Some(beta2)) => Ok(SweepModel::PoissonRate {
                alpha1,
                beta1,
                alpha2,
                beta2,
            }),
            _ => Err(missing("poisson sweep", "--a1, --b1, --a2 and --b2")),
        },
    }
}

/// Display helper: a sup-norm bound that does not exist prints as a word,
/// not as a number.
fn supnorm_text(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "inapplicable".to_string()
    }
}

fn cmd_bounds(args: &CaseArgs) -> Result<i32> {
    let case = build_case(args)?;
    let closed = case.closed_bounds()?;
    let (quad, _) = quad_settings(args.rel_tol, args.abs_tol);
    let engine = case.nested_pair()?.bounds(&quad)?;
    let exact = case.classify_monotone()? != Monotonicity::NonMonotone;

    if args.porcelain {
        let mut line = format!(
            "lower={} upper={} upper_supnorm={} exact={exact}",
            closed.lower,
            closed.upper,
            supnorm_text(engine.upper_supnorm)
        );
        if exact {
            line.push_str(&format!(" distance={}", closed.lower));
        }
        println!("{line}");
    } else {
        println!("lower         = {}", closed.lower);
        println!("upper         = {}", closed.upper);
        println!("upper_supnorm = {}", supnorm_text(engine.upper_supnorm));
        println!("exact         = {exact}");
        if exact {
            println!("distance      = {}", closed.lower);
        }
    }
    Ok(0)
}

fn cmd_verify(args: &CaseArgs) -> Result<i32> {
    let case = build_case(args)?;
    let closed = case.closed_bounds()?;
    let (quad, oracle_settings) = quad_settings(args.rel_tol, args.abs_tol);
    let engine = case.nested_pair()?.bounds(&quad)?;
    let (p1, p2) = case.posterior_pair()?;

    let cross = match w1_crosscheck(&p1, &p2, &oracle_settings) {
        Ok(c) => c,
        Err(err) => {
            eprintln!("error: {err}");
            return Ok(3);
        }
    };
    let oracle = cross.cdf_value;

    let slack = 1e-6 * oracle.max(1.0);
    let pass = engine.lower <= oracle + slack && oracle <= engine.upper * (1.0 + 1e-6) + slack;
    let verdict = if pass { "PASS" } else { "FAIL" };

    if args.porcelain {
        println!(
            "lower={} engine_upper={} closed_upper={} oracle={} sandwich={}",
            engine.lower,
            engine.upper,
            closed.upper,
            oracle,
            verdict.to_lowercase()
        );
    } else {
        println!("lower        = {}", engine.lower);
        println!("engine upper = {}", engine.upper);
        println!("closed upper = {}", closed.upper);
        println!("oracle       = {oracle}");
        println!("sandwich     = {verdict}");
    }
    Ok(if pass { 0 } else { 2 })
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let model = build_sweep_model(args)?;
    let mut plan = SweepPlan::new(model, args.n_grid.clone(), args.true_param, args.seed);
    plan.replicates = args.replicates;
    let (quad, oracle) = quad_settings(args.rel_tol, args.abs_tol);
    plan.quad = quad;
    plan.oracle = oracle;

    let mode = if args.serial {
        ExecMode::Serial
    } else {
        default_mode()
    };
    let rows = run_sweep_mode(&plan, mode)?;
    let csv = render_csv(&rows);

    let use_stdout_for_slopes = args.out.is_some();
    match &args.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }

    // Keep stdout pure CSV when it carries the table; slope lines then go
    // to stderr.
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut slope_sink: Box<dyn std::io::Write> = if use_stdout_for_slopes {
        Box::new(stdout.lock())
    } else {
        Box::new(stderr.lock())
    };
    for column in [SlopeColumn::Lower, SlopeColumn::Upper, SlopeColumn::Oracle] {
        match fit_decay_slope(&rows, column) {
            Ok(slope) => writeln!(slope_sink, "slope_{}={slope}", column.name())?,
            Err(err) => writeln!(
                slope_sink,
                "slope_{}=unavailable ({err})",
                column.name()
            )?,
        }
    }
    Ok(0)
}
