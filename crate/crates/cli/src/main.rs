//! Command-line front end: parse polynomials, expressions, and one-forms,
//! apply the differential and integral operators, and drive the law suites.
//!
//! Exit codes: 0 success (or law suites all passing), 1 law failure or a
//! not-closed verdict, 2 usage or parse error, 3 quadrature non-convergence.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::process::ExitCode;
use std::time::Instant;

use smoothcalc::expr::{self, EvalError, Expr};
use smoothcalc::laws::{self, GenConfig, LawReport, Mode, Suite, TrialConfig};
use smoothcalc::parse::{self, ParseError};
use smoothcalc::poly::{Poly, Rational};
use smoothcalc::poly_calculus as pc;
use smoothcalc::quad::QuadConfig;
use smoothcalc::smooth_calculus as sc;
use smoothcalc::{DegreeOp, InvertibleOp};

const EXIT_OK: i32 = 0;
const EXIT_LAW_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_NO_CONVERGE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "smoothcalc",
    version,
    about = "Differential and integral calculus on smooth expressions and exact polynomials"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Poly,
    Smooth,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpArg {
    L,
    K,
    J,
    #[value(name = "k-inverse", alias = "kinv")]
    KInverse,
    #[value(name = "j-inverse", alias = "jinv")]
    JInverse,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Ambient dimension (number of variables x1..xN).
    #[arg(short = 'n', long = "dim", default_value_t = 1)]
    dim: usize,
    /// Arithmetic backend.
    #[arg(long, value_enum, default_value_t = ModeArg::Smooth)]
    mode: ModeArg,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Args, Clone)]
struct QuadOpts {
    /// Gauss–Legendre order per panel.
    #[arg(long, default_value_t = 16)]
    quad_order: usize,
    /// Maximum bisection depth.
    #[arg(long, default_value_t = 12)]
    quad_depth: u32,
    /// Absolute tolerance per unit length.
    #[arg(long, default_value_t = 1e-11)]
    quad_atol: f64,
    /// Relative tolerance.
    #[arg(long, default_value_t = 1e-10)]
    quad_rtol: f64,
}

impl QuadOpts {
    fn config(&self) -> QuadConfig {
        QuadConfig {
            order: self.quad_order,
            max_depth: self.quad_depth,
            abs_tol: self.quad_atol,
            rel_tol: self.quad_rtol,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Differentiate: print the gradient one-form of a function.
    Diff {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        quad: QuadOpts,
        /// The function, e.g. "x1^2*x2^5".
        expr: String,
    },
    /// Evaluate the gradient of a function at a point.
    Grad {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        quad: QuadOpts,
        /// The function.
        expr: String,
        /// Evaluation point, comma-separated coordinates.
        #[arg(long)]
        at: String,
    },
    /// Line integral from the origin: apply the integral transformation to
    /// a one-form.
    Lineint {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        quad: QuadOpts,
        /// One-form components, comma-separated, e.g. "x1^2*x2^5, x1^3".
        form: String,
        /// Optional evaluation point for the resulting function.
        #[arg(long)]
        at: Option<String>,
    },
    /// Apply a degree-style operator (L, K, J) or an inverse (k-inverse,
    /// j-inverse) to a function.
    Apply {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        quad: QuadOpts,
        /// Operator to apply.
        #[arg(long, value_enum)]
        op: OpArg,
        /// The function.
        expr: String,
    },
    /// Gradient at the origin of a function.
    Epsilon {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        quad: QuadOpts,
        /// The function.
        expr: String,
    },
    /// Decide whether a one-form is closed.  Exits 1 when it is not.
    Closed {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        quad: QuadOpts,
        /// One-form components, comma-separated.
        form: String,
        /// Sample points for the numeric check (smooth mode).
        #[arg(long, default_value_t = 25)]
        points: usize,
        /// Asymmetry tolerance (smooth mode).
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for the sample points (smooth mode).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover a potential function for a closed one-form.  Exits 1 when
    /// the form is not closed.
    Potential {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        quad: QuadOpts,
        /// One-form components, comma-separated.
        form: String,
        /// Sample points for the closedness check (smooth mode).
        #[arg(long, default_value_t = 25)]
        points: usize,
        /// Asymmetry tolerance (smooth mode).
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for the sample points (smooth mode).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Apply the averaging (Rota–Baxter) operator attached to a vector.
    RotaBaxter {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        quad: QuadOpts,
        /// The function.
        expr: String,
        /// The vector attached to the operator, comma-separated.
        #[arg(long)]
        vector: String,
        /// Optional evaluation point for the resulting function.
        #[arg(long)]
        at: Option<String>,
    },
    /// Run law suites and report pass/fail per suite.
    Check {
        #[command(flatten)]
        quad: QuadOpts,
        /// Suite identifier, or "all" for every suite available in the mode.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Arithmetic backend.
        #[arg(long, value_enum, default_value_t = ModeArg::Smooth)]
        mode: ModeArg,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Base seed for the trial streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials per suite.
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// Sample points per trial (smooth mode).
        #[arg(long, default_value_t = 10)]
        points: usize,
        /// Comparison tolerance override.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Replay the worked examples with expected against computed values.
    Demo {
        #[command(flatten)]
        quad: QuadOpts,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli) as u8)
}

/// An error that already knows its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn no_converge(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_NO_CONVERGE,
            message: message.into(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        match e {
            EvalError::Quad(_) => Failure::no_converge(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> i32 {
    let result = match cli.cmd {
        Cmd::Diff { common, quad, expr } => cmd_diff(&common, &quad, &expr),
        Cmd::Grad {
            common,
            quad,
            expr,
            at,
        } => cmd_grad(&common, &quad, &expr, &at),
        Cmd::Lineint {
            common,
            quad,
            form,
            at,
        } => cmd_lineint(&common, &quad, &form, at.as_deref()),
        Cmd::Apply {
            common,
            quad,
            op,
            expr,
        } => cmd_apply(&common, &quad, op, &expr),
        Cmd::Epsilon { common, quad, expr } => cmd_epsilon(&common, &quad, &expr),
        Cmd::Closed {
            common,
            quad,
            form,
            points,
            tol,
            seed,
        } => cmd_closed(&common, &quad, &form, points, tol, seed),
        Cmd::Potential {
            common,
            quad,
            form,
            points,
            tol,
            seed,
        } => cmd_potential(&common, &quad, &form, points, tol, seed),
        Cmd::RotaBaxter {
            common,
            quad,
            expr,
            vector,
            at,
        } => cmd_rota_baxter(&common, &quad, &expr, &vector, at.as_deref()),
        Cmd::Check {
            quad,
            suite,
            mode,
            format,
            seed,
            trials,
            points,
            tol,
        } => cmd_check(&quad, &suite, mode, format, seed, trials, points, tol),
        Cmd::Demo { quad, format } => cmd_demo(&quad, format),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

// ---------------------------------------------------------------------------
// Argument helpers
// ---------------------------------------------------------------------------

fn parse_f64_vector(text: &str, expected: usize, what: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != expected {
        return Err(Failure::usage(format!(
            "{what} must have {expected} comma-separated coordinates, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Failure::usage(format!("invalid coordinate '{p}' in {what}")))
        })
        .collect()
}

/// Parses one coordinate of an exact vector; accepts integers, ratios like
/// `1/2`, and decimals, all read exactly.
fn parse_rational(text: &str, what: &str) -> Result<Rational, Failure> {
    let p = parse::parse_poly(text, 0)
        .map_err(|e| Failure::usage(format!("invalid coordinate '{text}' in {what}: {e}")))?;
    if p.degree() > 0 {
        return Err(Failure::usage(format!(
            "coordinate '{text}' in {what} must be a number"
        )));
    }
    Ok(p.constant_term())
}

fn parse_rational_vector(text: &str, expected: usize, what: &str) -> Result<Vec<Rational>, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != expected {
        return Err(Failure::usage(format!(
            "{what} must have {expected} comma-separated coordinates, got {}",
            parts.len()
        )));
    }
    parts.iter().map(|p| parse_rational(p, what)).collect()
}

fn parse_poly_form(text: &str, dim: usize) -> Result<Vec<Poly>, Failure> {
    let comps = parse::parse_poly_components(text, dim)?;
    if comps.len() != dim {
        return Err(Failure::usage(format!(
            "a one-form in dimension {dim} needs {dim} components, got {}",
            comps.len()
        )));
    }
    Ok(comps)
}

fn parse_expr_form(text: &str, dim: usize) -> Result<Vec<Expr>, Failure> {
    let comps = parse::parse_expr_components(text, dim)?;
    if comps.len() != dim {
        return Err(Failure::usage(format!(
            "a one-form in dimension {dim} needs {dim} components, got {}",
            comps.len()
        )));
    }
    Ok(comps)
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_components(format: FormatArg, components: &[String]) {
    match format {
        FormatArg::Text => println!("{}", components.join(", ")),
        FormatArg::Json => println!("{}", json!({ "components": components })),
    }
}

fn print_result(format: FormatArg, result: &str) {
    match format {
        FormatArg::Text => println!("{result}"),
        FormatArg::Json => println!("{}", json!({ "result": result })),
    }
}

fn print_values(format: FormatArg, values: &[String]) {
    match format {
        FormatArg::Text => println!("{}", values.join(", ")),
        FormatArg::Json => println!("{}", json!({ "values": values })),
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_diff(common: &CommonOpts, _quad: &QuadOpts, text: &str) -> Result<i32, Failure> {
    let components = match common.mode {
        ModeArg::Poly => {
            let p = parse::parse_poly(text, common.dim)?;
            pc::d(&p)
                .components()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        }
        ModeArg::Smooth => {
            let f = parse::parse_expr(text, common.dim)?;
            sc::d(&f, common.dim)
                .components()
                .iter()
                .map(|c| expr::simplify(c).to_string())
                .collect::<Vec<_>>()
        }
    };
    print_components(common.format, &components);
    Ok(EXIT_OK)
}

fn cmd_grad(common: &CommonOpts, quad: &QuadOpts, text: &str, at: &str) -> Result<i32, Failure> {
    let values = match common.mode {
        ModeArg::Poly => {
            let p = parse::parse_poly(text, common.dim)?;
            let point = parse_rational_vector(at, common.dim, "--at")?;
            (0..common.dim)
                .map(|i| {
                    p.partial(i)
                        .expect("index in range")
                        .eval(&point)
                        .expect("point has the right arity")
                        .to_string()
                })
                .collect::<Vec<_>>()
        }
        ModeArg::Smooth => {
            let f = parse::parse_expr(text, common.dim)?;
            let point = parse_f64_vector(at, common.dim, "--at")?;
            let cfg = quad.config();
            (0..common.dim)
                .map(|i| expr::eval(&expr::partial(&f, i), &point, &cfg))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::from)?
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        }
    };
    print_values(common.format, &values);
    Ok(EXIT_OK)
}

fn cmd_lineint(
    common: &CommonOpts,
    quad: &QuadOpts,
    form: &str,
    at: Option<&str>,
) -> Result<i32, Failure> {
    match common.mode {
        ModeArg::Poly => {
            let comps = parse_poly_form(form, common.dim)?;
            let result = pc::s(&pc::PolyOneForm::new(common.dim, comps));
            match at {
                None => print_result(common.format, &result.to_string()),
                Some(at) => {
                    let point = parse_rational_vector(at, common.dim, "--at")?;
                    let value = result.eval(&point).expect("point has the right arity");
                    print_result(common.format, &value.to_string());
                }
            }
        }
        ModeArg::Smooth => {
            let comps = parse_expr_form(form, common.dim)?;
            let result = sc::s(&sc::SmoothOneForm::new(common.dim, comps));
            match at {
                None => print_result(common.format, &expr::simplify(&result).to_string()),
                Some(at) => {
                    let point = parse_f64_vector(at, common.dim, "--at")?;
                    let value = expr::eval(&result, &point, &quad.config())?;
                    print_result(common.format, &value.to_string());
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_apply(common: &CommonOpts, quad: &QuadOpts, op: OpArg, text: &str) -> Result<i32, Failure> {
    let result = match common.mode {
        ModeArg::Poly => {
            let p = parse::parse_poly(text, common.dim)?;
            let out = match op {
                OpArg::L => pc::degree_op(DegreeOp::L, &p),
                OpArg::K => pc::degree_op(DegreeOp::K, &p),
                OpArg::J => pc::degree_op(DegreeOp::J, &p),
                OpArg::KInverse => pc::degree_op_inverse(InvertibleOp::K, &p),
                OpArg::JInverse => pc::degree_op_inverse(InvertibleOp::J, &p),
            };
            out.to_string()
        }
        ModeArg::Smooth => {
            let f = parse::parse_expr(text, common.dim)?;
            let cfg = quad.config();
            let out = match op {
                OpArg::L => sc::degree_op(DegreeOp::L, &f, common.dim, &cfg),
                OpArg::K => sc::degree_op(DegreeOp::K, &f, common.dim, &cfg),
                OpArg::J => sc::degree_op(DegreeOp::J, &f, common.dim, &cfg),
                OpArg::KInverse => sc::degree_op_inverse(InvertibleOp::K, &f, common.dim, &cfg),
                OpArg::JInverse => sc::degree_op_inverse(InvertibleOp::J, &f, common.dim, &cfg),
            }?;
            expr::simplify(&out).to_string()
        }
    };
    print_result(common.format, &result);
    Ok(EXIT_OK)
}

fn cmd_epsilon(common: &CommonOpts, quad: &QuadOpts, text: &str) -> Result<i32, Failure> {
    let values = match common.mode {
        ModeArg::Poly => {
            let p = parse::parse_poly(text, common.dim)?;
            (0..common.dim)
                .map(|i| {
                    p.partial(i)
                        .expect("index in range")
                        .constant_term()
                        .to_string()
                })
                .collect::<Vec<_>>()
        }
        ModeArg::Smooth => {
            let f = parse::parse_expr(text, common.dim)?;
            sc::epsilon(&f, common.dim, &quad.config())
                .map_err(Failure::from)?
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        }
    };
    print_values(common.format, &values);
    Ok(EXIT_OK)
}

/// Shared closedness decision used by `closed` and `potential`.
fn closedness(
    common: &CommonOpts,
    quad: &QuadOpts,
    form: &str,
    points: usize,
    tol: Option<f64>,
    seed: u64,
) -> Result<(bool, f64), Failure> {
    match common.mode {
        ModeArg::Poly => {
            let comps = parse_poly_form(form, common.dim)?;
            let w = pc::PolyOneForm::new(common.dim, comps);
            let mut worst = 0.0f64;
            for i in 0..common.dim {
                for j in (i + 1)..common.dim {
                    let gap = &w.component(i).partial(j).expect("index in range")
                        - &w.component(j).partial(i).expect("index in range");
                    worst = worst.max(gap.max_coefficient_abs());
                }
            }
            Ok((pc::is_closed_exact(&w), worst))
        }
        ModeArg::Smooth => {
            let comps = parse_expr_form(form, common.dim)?;
            let w = sc::SmoothOneForm::new(common.dim, comps);
            let check = sc::is_closed(&w, points, tol.unwrap_or(1e-9), &quad.config(), seed)?;
            Ok((check.closed, check.worst_asymmetry))
        }
    }
}

fn cmd_closed(
    common: &CommonOpts,
    quad: &QuadOpts,
    form: &str,
    points: usize,
    tol: Option<f64>,
    seed: u64,
) -> Result<i32, Failure> {
    let (closed, worst) = closedness(common, quad, form, points, tol, seed)?;
    match common.format {
        FormatArg::Text => {
            if closed {
                println!("closed (worst asymmetry {worst})");
            } else {
                println!("not closed (worst asymmetry {worst})");
            }
        }
        FormatArg::Json => {
            println!("{}", json!({ "closed": closed, "worst_asymmetry": worst }));
        }
    }
    Ok(if closed { EXIT_OK } else { EXIT_LAW_FAIL })
}

fn cmd_potential(
    common: &CommonOpts,
    quad: &QuadOpts,
    form: &str,
    points: usize,
    tol: Option<f64>,
    seed: u64,
) -> Result<i32, Failure> {
    let (closed, worst) = closedness(common, quad, form, points, tol, seed)?;
    if !closed {
        eprintln!("error: the one-form is not closed (worst asymmetry {worst}); no potential exists");
        return Ok(EXIT_LAW_FAIL);
    }
    let result = match common.mode {
        ModeArg::Poly => {
            let comps = parse_poly_form(form, common.dim)?;
            pc::s(&pc::PolyOneForm::new(common.dim, comps)).to_string()
        }
        ModeArg::Smooth => {
            let comps = parse_expr_form(form, common.dim)?;
            expr::simplify(&sc::s(&sc::SmoothOneForm::new(common.dim, comps))).to_string()
        }
    };
    print_result(common.format, &result);
    Ok(EXIT_OK)
}

fn cmd_rota_baxter(
    common: &CommonOpts,
    quad: &QuadOpts,
    text: &str,
    vector: &str,
    at: Option<&str>,
) -> Result<i32, Failure> {
    match common.mode {
        ModeArg::Poly => {
            let p = parse::parse_poly(text, common.dim)?;
            let v = parse_rational_vector(vector, common.dim, "--vector")?;
            let result = pc::rota_baxter(&p, &v).expect("vector length was checked");
            match at {
                None => print_result(common.format, &result.to_string()),
                Some(at) => {
                    let point = parse_rational_vector(at, common.dim, "--at")?;
                    let value = result.eval(&point).expect("point has the right arity");
                    print_result(common.format, &value.to_string());
                }
            }
        }
        ModeArg::Smooth => {
            let f = parse::parse_expr(text, common.dim)?;
            let v = parse_f64_vector(vector, common.dim, "--vector")?;
            let result = sc::rota_baxter(&f, &v);
            match at {
                None => print_result(common.format, &expr::simplify(&result).to_string()),
                Some(at) => {
                    let point = parse_f64_vector(at, common.dim, "--at")?;
                    let value = expr::eval(&result, &point, &quad.config())?;
                    print_result(common.format, &value.to_string());
                }
            }
        }
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    quad: &QuadOpts,
    suite: &str,
    mode: ModeArg,
    format: FormatArg,
    seed: u64,
    trials: u32,
    points: usize,
    tol: Option<f64>,
) -> Result<i32, Failure> {
    let mode = match mode {
        ModeArg::Poly => Mode::Poly,
        ModeArg::Smooth => Mode::Smooth,
    };
    let suites: Vec<Suite> = if suite == "all" {
        Suite::all_for(mode)
    } else {
        let s = Suite::from_id(suite).ok_or_else(|| {
            Failure::usage(format!(
                "unknown suite '{suite}'; expected one of: all, {}",
                Suite::all()
                    .iter()
                    .map(|s| s.id())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })?;
        if !s.available_in(mode) {
            return Err(Failure::usage(format!(
                "suite '{suite}' is not available in {} mode",
                mode.as_str()
            )));
        }
        vec![s]
    };

    let trial = TrialConfig {
        seed,
        trials,
        points,
        tol,
        quad: quad.config(),
    };
    let gen = GenConfig::default();
    let mut reports: Vec<LawReport> = Vec::new();
    let mut elapsed: Vec<u128> = Vec::new();
    for s in suites {
        let start = Instant::now();
        let report = laws::run_suite(s, mode, &trial, &gen)
            .expect("availability was checked before running");
        elapsed.push(start.elapsed().as_millis());
        reports.push(report);
    }

    match format {
        FormatArg::Text => {
            for (report, ms) in reports.iter().zip(&elapsed) {
                let verdict = if report.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{verdict} {} [{}] trials={} failures={} inconclusive={} worst_error={:e} ({} ms)",
                    report.law,
                    report.mode,
                    report.trials,
                    report.failures,
                    report.inconclusive,
                    report.worst_error,
                    ms
                );
            }
        }
        FormatArg::Json => println!("{}", laws::reports_json(&reports)),
    }

    // A suite that only exceeded the inconclusive budget signals numeric
    // exhaustion, not a law violation.
    let mut code = EXIT_OK;
    for report in &reports {
        if report.passed() {
            continue;
        }
        let law_violation = if report.law == Suite::NegativeControl.id() {
            report.failures == 0
        } else {
            report.failures > 0
        };
        if law_violation {
            code = EXIT_LAW_FAIL;
            break;
        }
        code = EXIT_NO_CONVERGE;
    }
    Ok(code)
}

// ---------------------------------------------------------------------------
// Demo
// ---------------------------------------------------------------------------

struct DemoLine {
    name: &'static str,
    expected: String,
    computed: String,
    ok: bool,
}

fn demo_lines(cfg: &QuadConfig) -> Vec<DemoLine> {
    let mut lines = Vec::new();

    // Gradient one-form of a monomial.
    let p = parse::parse_poly("x1^3*x2^2", 2).expect("demo input parses");
    let grad = pc::d(&p);
    let computed = join(grad.components());
    lines.push(DemoLine {
        name: "gradient one-form of x1^3*x2^2",
        expected: "3*x1^2*x2^2, 2*x1^3*x2".to_string(),
        computed: computed.clone(),
        ok: computed == "3*x1^2*x2^2, 2*x1^3*x2",
    });

    // Exact line integral of a polynomial one-form.
    let comps = parse::parse_poly_components("x1^2*x2^5, x1^3", 2).expect("demo input parses");
    let s = pc::s(&pc::PolyOneForm::new(2, comps));
    let computed = s.to_string();
    lines.push(DemoLine {
        name: "line integral of x1^2*x2^5 dx1 + x1^3 dx2",
        expected: "1/8*x1^3*x2^5 + 1/4*x1^3*x2".to_string(),
        computed: computed.clone(),
        ok: computed == "1/8*x1^3*x2^5 + 1/4*x1^3*x2",
    });

    // The averaging rule on a single monomial tensor: divide by one plus
    // the total degree.
    let comps = parse::parse_poly_components("0, x1^2*x2^3", 2).expect("demo input parses");
    let s = pc::s(&pc::PolyOneForm::new(2, comps));
    let computed = s.to_string();
    lines.push(DemoLine {
        name: "averaging x1^2*x2^3 dx2",
        expected: "1/6*x1^2*x2^4".to_string(),
        computed: computed.clone(),
        ok: computed == "1/6*x1^2*x2^4",
    });

    // Antiderivative from the origin: averaging cos on the line gives sin.
    let f = parse::parse_expr("cos(x1)", 1).expect("demo input parses");
    let pf = sc::rota_baxter(&f, &[1.0]);
    let mut worst = 0.0f64;
    let mut all_ok = true;
    for k in 0..=10 {
        let x = -1.0 + 0.2 * f64::from(k);
        match expr::eval(&pf, &[x], cfg) {
            Ok(v) => worst = worst.max((v - x.sin()).abs()),
            Err(_) => all_ok = false,
        }
    }
    lines.push(DemoLine {
        name: "averaging cos on the line",
        expected: "sin within 1e-9 on [-1, 1]".to_string(),
        computed: format!("largest deviation {worst:.3e}"),
        ok: all_ok && worst <= 1e-9,
    });

    // The per-exponent averaging rule breaks the product rule in
    // dimension two; the total-degree rule satisfies it.
    let w = pc::PolyOneForm::new(
        2,
        parse::parse_poly_components("x2, 0", 2).expect("demo input parses"),
    );
    let v = pc::PolyOneForm::new(
        2,
        parse::parse_poly_components("0, 1", 2).expect("demo input parses"),
    );
    let product_rule_gap = |s: fn(&pc::PolyOneForm) -> Poly| -> Poly {
        let sw = s(&w);
        let sv = s(&v);
        let lhs = &sw * &sv;
        let rhs = &s(&pc::scale_form(&sv, &w)) + &s(&pc::scale_form(&sw, &v));
        &lhs - &rhs
    };
    let correct_gap = product_rule_gap(pc::s);
    let naive_gap = product_rule_gap(pc::s_naive);
    lines.push(DemoLine {
        name: "product rule gap on x2 dx1 and dx2, total-degree vs per-exponent rule",
        expected: "0 and a nonzero polynomial".to_string(),
        computed: format!("{correct_gap} and {naive_gap}"),
        ok: correct_gap.is_zero() && !naive_gap.is_zero(),
    });

    lines
}

fn cmd_demo(quad: &QuadOpts, format: FormatArg) -> Result<i32, Failure> {
    let lines = demo_lines(&quad.config());
    let all_ok = lines.iter().all(|l| l.ok);
    match format {
        FormatArg::Text => {
            for l in &lines {
                let verdict = if l.ok { "OK " } else { "FAIL" };
                println!("[{verdict}] {}", l.name);
                println!("       expected: {}", l.expected);
                println!("       computed: {}", l.computed);
            }
        }
        FormatArg::Json => {
            let objs: Vec<_> = lines
                .iter()
                .map(|l| {
                    json!({
                        "name": l.name,
                        "expected": l.expected,
                        "computed": l.computed,
                        "ok": l.ok,
                    })
                })
                .collect();
            println!("{}", serde_json::Value::Array(objs));
        }
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_LAW_FAIL })
}
