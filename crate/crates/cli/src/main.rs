//! Command-line front end for the `rrkhs` library.
//!
//! Subcommands cover Gram positivity checking, value and difference
//! fitting, model evaluation, the seeded verification suites, and a
//! randomized audit of the semi-inner-product axioms. Reports and model
//! files are JSON, written to standard output or behind `--out`; tabular
//! inputs are CSV. Runs are deterministic: the same flags and seed produce
//! byte-identical output.
//!
//! Exit codes: 0 success, 2 input error, 3 positivity failure,
//! 4 infeasible fit, 5 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rrkhs::complexfmt::{parse_complex, JsonComplex};
use rrkhs::io::{read_difference_constraints_file, read_points_file, read_value_constraints_file};
use rrkhs::{
    build_kernel, check_psd, fit_differences, fit_values, run_verify, sip_axiom_report, Fault,
    HomogeneityForm, Kernel, KernelSpec, ModelFile, OutVector, Point, SipSpace, Tolerance,
    VerifyConfig,
};

const EXIT_INPUT: u8 = 2;
const EXIT_NOT_PSD: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(
    name = "rrkhs",
    version,
    about = "Operator-valued kernel fitting, difference interpolation, and \
             semi-inner-product checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the block Gram matrix of a point set for positive
    /// semidefiniteness
    CheckPsd(CheckPsdArgs),
    /// Fit a kernel span through prescribed values and write the model
    FitValues(FitValuesArgs),
    /// Fit a relative span through prescribed differences and write the
    /// model
    FitDifferences(FitDifferencesArgs),
    /// Evaluate a fitted model file at points
    Eval(EvalArgs),
    /// Run the seeded verification suites over the built-in kernels
    Verify(VerifyArgs),
    /// Audit the semi-inner-product axioms on random l^p vectors
    SipCheck(SipCheckArgs),
}

/// Overrides for the default numerical tolerances.
#[derive(Args)]
struct ToleranceArgs {
    /// absolute tolerance
    #[arg(long)]
    abs_tol: Option<f64>,
    /// relative tolerance
    #[arg(long)]
    rel_tol: Option<f64>,
}

impl ToleranceArgs {
    fn build(&self) -> rrkhs::Result<Tolerance> {
        let d = Tolerance::default();
        Tolerance::new(
            self.abs_tol.unwrap_or(d.abs_tol),
            self.rel_tol.unwrap_or(d.rel_tol),
            d.psd_eig_floor,
        )
    }
}

#[derive(Args)]
struct CheckPsdArgs {
    /// kernel spec JSON file
    #[arg(long)]
    kernel: PathBuf,
    /// points CSV file with header x_1,...,x_d
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    tol: ToleranceArgs,
    /// write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitValuesArgs {
    /// kernel spec JSON file
    #[arg(long)]
    kernel: PathBuf,
    /// values CSV file with header x_1,...,x_d,v_1,...,v_m
    #[arg(long)]
    data: PathBuf,
    /// ridge regularization added to the Gram diagonal
    #[arg(long, default_value_t = 1e-10)]
    ridge: f64,
    /// write the model here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitDifferencesArgs {
    /// kernel spec JSON file
    #[arg(long)]
    kernel: PathBuf,
    /// differences CSV file with header x_1,...,x_d,y_1,...,y_d,d_1,...,d_m
    #[arg(long)]
    data: PathBuf,
    /// ridge regularization added to the relative Gram diagonal
    #[arg(long, default_value_t = 1e-10)]
    ridge: f64,
    /// pin the fitted value at a point, as "x1,...,xd:v1,...,vm"
    #[arg(long)]
    anchor: Option<String>,
    /// write the model here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// fitted model JSON file
    #[arg(long)]
    model: PathBuf,
    /// points CSV file with header x_1,...,x_d
    #[arg(long)]
    data: PathBuf,
    /// write the evaluations here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// seed shared by every suite
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tol: ToleranceArgs,
    /// write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// deliberately corrupt an internal computation so that failure
    /// reporting can be exercised
    #[arg(long, hide = true, value_enum)]
    inject_fault: Option<FaultArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    /// break the symmetry of the assembled Gram matrix
    AsymmetricGram,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Fault {
        match f {
            FaultArg::AsymmetricGram => Fault::AsymmetricGram,
        }
    }
}

#[derive(Args)]
struct SipCheckArgs {
    /// exponent of the l^p space, 1 < p < infinity
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// dimension of the sampled vectors
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// number of random samples per axiom
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// seed for the sample stream
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tol: ToleranceArgs,
    /// write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Positivity report, reduced to the fields of interest to pipelines.
#[derive(Serialize)]
struct CheckPsdReport {
    is_psd: bool,
    min_eigenvalue: f64,
    n: usize,
    m: usize,
}

/// Evaluations of a model at a list of points, in input order.
#[derive(Serialize)]
struct EvalReport {
    points: Vec<Vec<f64>>,
    values: Vec<Vec<JsonComplex>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_for_error(&err))
        }
    }
}

/// Maps library failures onto the published exit codes; anything else is an
/// input error.
fn exit_for_error(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<rrkhs::Error>() {
        Some(rrkhs::Error::SingularSystem { .. }) => EXIT_INFEASIBLE,
        Some(rrkhs::Error::NonHermitian { .. }) => EXIT_NOT_PSD,
        _ => EXIT_INPUT,
    }
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::CheckPsd(args) => cmd_check_psd(args),
        Command::FitValues(args) => cmd_fit_values(args),
        Command::FitDifferences(args) => cmd_fit_differences(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Verify(args) => cmd_verify(args),
        Command::SipCheck(args) => cmd_sip_check(args),
    }
}

fn cmd_check_psd(args: CheckPsdArgs) -> anyhow::Result<u8> {
    let kernel = load_kernel(&args.kernel)?;
    let points = read_points_file(&args.data)
        .with_context(|| format!("reading points from {}", args.data.display()))?;
    let tol = args.tol.build()?;
    let report = check_psd(&kernel, &points, &tol)?;
    let out = CheckPsdReport {
        is_psd: report.is_psd,
        min_eigenvalue: report.min_eigenvalue,
        n: points.len(),
        m: kernel.spec().m,
    };
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&out)?)?;
    if report.is_psd {
        Ok(0)
    } else {
        eprintln!(
            "gram matrix is not positive semidefinite: smallest eigenvalue {:.6e} is below \
             the floor {:.6e}",
            report.min_eigenvalue, report.eig_floor
        );
        Ok(EXIT_NOT_PSD)
    }
}

fn cmd_fit_values(args: FitValuesArgs) -> anyhow::Result<u8> {
    let kernel = load_kernel(&args.kernel)?;
    let constraints = read_value_constraints_file(&args.data)
        .with_context(|| format!("reading values from {}", args.data.display()))?;
    let fit = fit_values(&kernel, &constraints, args.ridge)?;
    let model = ModelFile::from_value_fit(&fit);
    emit(args.out.as_deref(), &model.to_json()?)?;
    let value_norm = stacked_norm(constraints.iter().map(|c| &c.value));
    if fit.is_consistent(value_norm) {
        Ok(0)
    } else {
        eprintln!(
            "value constraints could not be interpolated: residual {:.6e}",
            fit.residual
        );
        Ok(EXIT_INFEASIBLE)
    }
}

fn cmd_fit_differences(args: FitDifferencesArgs) -> anyhow::Result<u8> {
    let kernel = load_kernel(&args.kernel)?;
    let constraints = read_difference_constraints_file(&args.data)
        .with_context(|| format!("reading differences from {}", args.data.display()))?;
    let fit = fit_differences(&kernel, &constraints, args.ridge)?;
    let anchor = args
        .anchor
        .as_deref()
        .map(parse_anchor)
        .transpose()
        .context("parsing --anchor")?;
    let model = ModelFile::from_difference_fit(&fit, anchor.as_ref().map(|(x, v)| (x, v)))?;
    emit(args.out.as_deref(), &model.to_json()?)?;
    let delta_norm = stacked_norm(constraints.iter().map(|c| &c.delta));
    if fit.is_consistent(delta_norm) {
        Ok(0)
    } else {
        eprintln!(
            "difference constraints are inconsistent: least-squares residual {:.6e}",
            fit.residual
        );
        Ok(EXIT_INFEASIBLE)
    }
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<u8> {
    let file = ModelFile::load(&args.model)
        .with_context(|| format!("reading model from {}", args.model.display()))?;
    let model = file.instantiate()?;
    let points = read_points_file(&args.data)
        .with_context(|| format!("reading points from {}", args.data.display()))?;
    let mut values = Vec::with_capacity(points.len());
    for point in &points {
        let v = model.evaluate(point)?;
        values.push(v.entries().iter().map(|&z| JsonComplex(z)).collect());
    }
    let report = EvalReport {
        points: points.iter().map(|p| p.coords().to_vec()).collect(),
        values,
    };
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<u8> {
    let mut config = VerifyConfig::new(args.seed);
    config.tol = args.tol.build()?;
    config.fault = args.inject_fault.map(Fault::from);
    let report = run_verify(&config)?;
    emit(args.out.as_deref(), &report.to_json()?)?;
    match report.first_failure() {
        None => Ok(0),
        Some(suite) => {
            eprintln!(
                "verification failed: suite {} (max defect {:.6e}, threshold {:.6e})",
                suite.name, suite.max_defect, suite.threshold
            );
            Ok(EXIT_VERIFY)
        }
    }
}

fn cmd_sip_check(args: SipCheckArgs) -> anyhow::Result<u8> {
    let tol = args.tol.build()?;
    let space = SipSpace::new(args.p, args.dim)?;
    let report = sip_axiom_report(
        space,
        args.trials,
        args.seed,
        HomogeneityForm::RealScalars,
        &tol,
    )?;
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
    let pass = report.positivity_ok
        && report.cauchy_schwarz_violations == 0
        && report.linearity_defect <= tol.abs_tol
        && report.homogeneity_defect <= tol.abs_tol;
    if pass {
        Ok(0)
    } else {
        eprintln!(
            "semi-inner-product axiom audit failed: linearity defect {:.6e}, homogeneity \
             defect {:.6e}, {} Cauchy-Schwarz violations",
            report.linearity_defect, report.homogeneity_defect, report.cauchy_schwarz_violations
        );
        Ok(EXIT_VERIFY)
    }
}

fn load_kernel(path: &Path) -> anyhow::Result<Kernel> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading kernel spec {}", path.display()))?;
    let spec: KernelSpec = serde_json::from_str(&text)
        .with_context(|| format!("parsing kernel spec {}", path.display()))?;
    Ok(build_kernel(&spec)?)
}

/// Euclidean norm of the concatenation of the given vectors.
fn stacked_norm<'a>(vectors: impl Iterator<Item = &'a OutVector>) -> f64 {
    vectors.map(|v| v.norm().powi(2)).sum::<f64>().sqrt()
}

/// Parses "x1,...,xd:v1,...,vm" into an anchor point and value.
fn parse_anchor(text: &str) -> anyhow::Result<(Point, OutVector)> {
    let (coords, entries) = text.split_once(':').ok_or_else(|| {
        anyhow::anyhow!("expected \"x1,...,xd:v1,...,vm\", got {text:?}")
    })?;
    let coords = coords
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| anyhow::anyhow!("{c:?} is not a real coordinate"))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let entries = entries
        .split(',')
        .map(|e| Ok(parse_complex(e.trim())?))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((Point::new(coords)?, OutVector::new(entries)?))
}

/// Writes `text` with a trailing newline to `out`, or to standard output.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    let mut full = text.to_string();
    if !full.ends_with('\n') {
        full.push('\n');
    }
    match out {
        Some(path) => fs::write(path, full)
            .with_context(|| format!("writing report to {}", path.display()))?,
        None => print!("{full}"),
    }
    Ok(())
}
