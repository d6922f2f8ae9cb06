//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or validation error,
//! 3 solver did not converge, 4 verification refuted.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fixed_point::{ContractionKind, DEFAULT_TOL_LOG};
use crate::json::to_json;
use crate::maps::MapSpec;
use crate::problem::{
    lookup, registry, verify_distance_expr, verify_space, Problem, ProblemDefinition, TraceFile,
    PROBLEM_MAX_ITER,
};
use crate::sampler::{seeded_rng, PointSampler};
use crate::space::SpaceSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_REFUTED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "mulmetric",
    version,
    about = "Fixed points in multiplicative metric spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run Picard iteration and write a JSON trace.
    Solve(SolveArgs),
    /// Check metric axioms or a contraction hypothesis on sampled points.
    Verify(VerifyArgs),
    /// Estimate the contraction constant of a map.
    Estimate(EstimateArgs),
    /// List the built-in problems.
    Examples,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Registry problem id, or for `verify` a space name.
    pub target: Option<String>,
    /// TOML problem definition.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Space name: mul-abs, d-star, exp, line, segment, function, product.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Base `a` of d_a.
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub base: f64,
    /// Use the complex extension of d_a.
    #[arg(long)]
    pub complex: bool,
    /// Restrict mul-abs to `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    pub interval: Option<Vec<f64>>,
    /// Named map id.
    #[arg(long, conflicts_with = "expr")]
    pub map: Option<String>,
    /// Inline expression: in `x` a map, in `x` and `y` a candidate distance.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Contraction condition: banach, kannan or chatterjea
    #[arg(long)]
    pub kind: Option<ContractionKind>,
    /// Contraction constant
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Start point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Stop once ln d(x_n, z) is certified below this
    #[arg(long)]
    pub tol_log: Option<f64>,
    /// Iteration cap
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Seed for sampled points
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: ProblemArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: ProblemArgs,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: ProblemArgs,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load(args: &ProblemArgs, need_x0: bool) -> Result<Problem, Failure> {
    let text = match &args.problem {
        Some(path) => Some(
            fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    Ok(resolve_problem(args, text.as_deref(), need_x0)?.validate()?)
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Precondition { .. } | Error::InvariantBreach(_) | Error::LeftDomain { .. } => {
            EXIT_NO_CONVERGENCE
        }
        _ => EXIT_USAGE,
    }
}

enum Failure {
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Solve(a) => cmd_solve(&a.common, out, err),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Examples => {
            cmd_examples(out)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(args: &ProblemArgs, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match &args.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn space_from_flags(args: &ProblemArgs, name: &str) -> Result<SpaceSpec> {
    let mut spec = SpaceSpec::from_name(name, args.dim, args.base, args.complex)?;
    if let (SpaceSpec::MulAbs { interval }, Some(iv)) = (&mut spec, &args.interval) {
        *interval = Some([iv[0], iv[1]]);
    }
    Ok(spec)
}

/// Combines `--problem`, a registry id and individual flags, later sources
/// overriding earlier ones. With `need_x0` false a missing start point is
/// replaced by a sampled one.
/// `problem_text` is the contents of `--problem`, read by the caller.
pub fn resolve_problem(
    args: &ProblemArgs,
    problem_text: Option<&str>,
    need_x0: bool,
) -> Result<ProblemDefinition> {
    let base = if let Some(text) = problem_text {
        Some(ProblemDefinition::parse(text)?)
    } else if let Some(id) = &args.target {
        Some(lookup(id)?.definition)
    } else {
        None
    };

    let space = match (&args.space, &base) {
        (Some(name), _) => space_from_flags(args, name)?,
        (None, Some(b)) => b.space.clone(),
        (None, None) => space_from_flags(args, "mul-abs")?,
    };
    let map = match (&args.map, &args.expr, &base) {
        (Some(id), _, _) => MapSpec::Named(id.clone()),
        (None, Some(src), _) => MapSpec::Expr(Expr::parse(src)?),
        (None, None, Some(b)) => b.map.clone(),
        (None, None, None) => {
            return Err(Error::Input(
                "no map: pass --map, --expr or a problem".into(),
            ))
        }
    };
    let kind = args
        .kind
        .or(base.as_ref().map(|b| b.kind))
        .unwrap_or(ContractionKind::Banach);
    let lambda = match (args.lambda, &base) {
        (Some(l), _) => l,
        (None, Some(b)) => b.lambda,
        (None, None) => return Err(Error::Input("--lambda is required".into())),
    };
    let seed = args.seed.or(base.as_ref().map(|b| b.seed)).unwrap_or(0);
    let x0 = match (&args.x0, &base) {
        (Some(x0), _) => x0.clone(),
        (None, Some(b)) => b.x0.clone(),
        (None, None) if need_x0 => return Err(Error::Input("--x0 is required".into())),
        (None, None) => space
            .build()?
            .sampler()
            .sample(&mut seeded_rng(seed))
            .ok_or_else(|| Error::Input("cannot sample a start point".into()))?,
    };
    Ok(ProblemDefinition {
        id: base.as_ref().and_then(|b| b.id.clone()),
        kind,
        lambda,
        x0,
        tol_log: args
            .tol_log
            .or(base.as_ref().map(|b| b.tol_log))
            .unwrap_or(DEFAULT_TOL_LOG),
        max_iter: args
            .max_iter
            .or(base.as_ref().map(|b| b.max_iter))
            .unwrap_or(PROBLEM_MAX_ITER),
        seed,
        space,
        map,
    })
}

fn cmd_solve(args: &ProblemArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let problem = load(args, true)?;
    let report = problem.solve()?;
    let trace = TraceFile::from_report(&report);
    emit(args, &trace.to_json()?, out)?;
    writeln!(
        err,
        "{} after {} iterations: z = {:?}, ln d(fz, z) = {:e}, ln d(z, z*) <= {:e}",
        if report.converged {
            "converged"
        } else {
            "NOT converged"
        },
        report.iterations,
        report.fixed_point,
        report.residual_log,
        report.error_bound_log,
    )?;
    Ok(if report.converged {
        EXIT_OK
    } else {
        EXIT_NO_CONVERGENCE
    })
}

fn is_space_name(s: &str) -> bool {
    SpaceSpec::NAMES.contains(&s)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let args = &a.common;
    let seed = args.seed.unwrap_or(0);
    let target_space = args.target.as_deref().filter(|t| is_space_name(t));

    let candidate = match &args.expr {
        Some(src) => Some(Expr::parse(src)?).filter(Expr::is_binary),
        None => None,
    };
    if let Some(expr) = candidate {
        let name = args.space.as_deref().or(target_space).unwrap_or("line");
        let space = space_from_flags(args, name)?;
        let report = verify_distance_expr(&expr, &space, a.samples, seed)?;
        return finish_axioms(args, &report, out, err);
    }

    let contraction = args.problem.is_some()
        || args.map.is_some()
        || args.expr.is_some()
        || (args.target.is_some() && target_space.is_none());
    if contraction {
        let problem = load(args, false)?;
        let report = problem.verify_contraction(a.samples)?;
        emit(args, &to_json(&report)?, out)?;
        writeln!(
            err,
            "{} {}: {} of {} sampled pairs violate (min margin {:e}); {}",
            report.spec.kind(),
            report.spec.lambda(),
            report.violation_count,
            report.pairs_checked,
            report.min_margin_log,
            report.certificate,
        )?;
        return Ok(if report.holds { EXIT_OK } else { EXIT_REFUTED });
    }

    let name = args.space.as_deref().or(target_space).unwrap_or("mul-abs");
    let space = space_from_flags(args, name)?;
    let report = verify_space(&space, a.samples, seed)?;
    finish_axioms(args, &report, out, err)
}

fn finish_axioms<P: Serialize + std::fmt::Debug>(
    args: &ProblemArgs,
    report: &crate::verifier::AxiomReport<P>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    emit(args, &to_json(report)?, out)?;
    writeln!(
        err,
        "m1 {} m2 {} m3 {} reverse {} over {} samples; {}",
        report.m1_ok,
        report.m2_ok,
        report.m3_ok,
        report.reverse_ok,
        report.samples_used,
        report.certificate
    )?;
    if let Some(w) = report.witnesses.first() {
        writeln!(err, "first witness: {:?} at {:?}", w.axiom, w.points)?;
    }
    Ok(if report.all_ok() {
        EXIT_OK
    } else {
        EXIT_REFUTED
    })
}

fn cmd_estimate(a: &EstimateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let args = &a.common;
    let problem = load(args, false)?;
    let est = problem.estimate(a.pairs)?;
    if let Some(path) = &args.out {
        fs::write(path, to_json(&est)?)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    writeln!(out, "{}", est.lambda_hat)?;
    Ok(EXIT_OK)
}

fn format_point(p: &[f64]) -> String {
    match p {
        [x] => format!("{x}"),
        _ => {
            let parts: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            format!("({})", parts.join(","))
        }
    }
}

fn cmd_examples(out: &mut dyn Write) -> Result<(), Failure> {
    for e in registry() {
        let d = &e.definition;
        writeln!(
            out,
            "{:<20} {:<20} {:<28} {:<18} expected {}  [{}]",
            e.id,
            d.space.label(),
            d.map.label(),
            format!("{} {:.4}", d.kind, d.lambda),
            format_point(&e.expected),
            e.source,
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("mulmetric").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn examples_listing() {
        let (code, out, _) = run_str(&["examples"]);
        assert_eq!(code, 0);
        assert!(
            out.contains("paper-scalar") && out.contains("expected 0.7411317711"),
            "{out}"
        );
        assert!(out.contains("expected (1,1)"));
        assert!(out
            .lines()
            .any(|l| l.starts_with("sqrt-toy") && l.contains("expected 1 ")));
    }

    #[test]
    fn solve_inline_sqrt() {
        let (code, out, _) = run_str(&[
            "solve", "--expr", "sqrt(x)", "--lambda", "0.5", "--x0", "16",
        ]);
        assert_eq!(code, 0);
        let trace = TraceFile::parse(&out).unwrap();
        assert!((trace.footer.fixed_point[0] - 1.0).abs() < 1e-12);
        assert_eq!(trace.steps[0].point, vec![16.0]);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(
            run_str(&["solve", "--expr", "sqrt(", "--lambda", "0.5", "--x0", "16"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run_str(&["solve", "--expr", "sqrt(x)", "--x0", "16"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_str(&["solve", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(
            run_str(&["solve", "--kind", "picard", "--lambda", "0.5"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn non_convergence_exit_code() {
        let (code, _, _) = run_str(&["solve", "sqrt-toy", "--max-iter", "2"]);
        assert_eq!(code, EXIT_NO_CONVERGENCE);
        let (code, _, _) = run_str(&["solve", "--map", "square", "--lambda", "0.9", "--x0", "2"]);
        assert_eq!(code, EXIT_NO_CONVERGENCE);
    }

    #[test]
    fn verify_modes() {
        assert_eq!(
            run_str(&["verify", "d-star", "--dim", "3", "--samples", "500"]).0,
            EXIT_OK
        );
        let (code, out, _) = run_str(&["verify", "--expr", "e^((x-y)^2)", "--samples", "100"]);
        assert_eq!(code, EXIT_REFUTED);
        assert!(out.contains("\"m3\""));
        let (code, _, _) = run_str(&[
            "verify",
            "paper-scalar",
            "--kind",
            "banach",
            "--lambda",
            "0.997",
            "--samples",
            "500",
        ]);
        assert_eq!(code, EXIT_OK);
        let (code, _, _) = run_str(&[
            "verify",
            "--map",
            "square",
            "--lambda",
            "0.9",
            "--samples",
            "50",
        ]);
        assert_eq!(code, EXIT_REFUTED);
    }

    #[test]
    fn estimate_prints_lambda() {
        let (code, out, _) = run_str(&["estimate", "sqrt-toy", "--pairs", "200"]);
        assert_eq!(code, 0);
        assert!((out.trim().parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
        let (_, out, _) = run_str(&[
            "estimate", "--map", "constant", "--lambda", "0", "--pairs", "50",
        ]);
        assert_eq!(out.trim(), "0");
    }
}
