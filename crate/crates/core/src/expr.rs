//! Smooth-function expressions: a closed term language over variables,
//! bound integration parameters, and a fixed primitive set, with symbolic
//! differentiation, substitution, and quadrature-backed evaluation.
//!
//! The primitive set {sin, cos, exp, tanh, atan} together with sums, products,
//! powers, negation, and unit-interval integral nodes is closed under
//! differentiation: tanh' = 1 − tanh², and atan' = cos(atan(·))². Integral
//! nodes always range over [0, 1]; general bounds are expressed by
//! substitution before integration.
//!
//! Binding discipline: every integration parameter is introduced by exactly
//! one `Integral` node, and along any root-to-leaf path each parameter id is
//! bound at most once. Substitution of expressions for variables renames the
//! bound parameters of the inserted images so the discipline survives
//! composition.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::poly::{rational_to_f64, Poly};
use crate::quad::{self, QuadConfig, QuadError};

/// Identifier for a bound integration parameter.
pub type ParamId = u32;

/// The primitive functions the language is closed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prim {
    Sin,
    Cos,
    Exp,
    Tanh,
    Atan,
}

impl Prim {
    pub fn name(self) -> &'static str {
        match self {
            Prim::Sin => "sin",
            Prim::Cos => "cos",
            Prim::Exp => "exp",
            Prim::Tanh => "tanh",
            Prim::Atan => "atan",
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Prim::Sin => x.sin(),
            Prim::Cos => x.cos(),
            Prim::Exp => x.exp(),
            Prim::Tanh => x.tanh(),
            Prim::Atan => x.atan(),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Prim::Sin,
            "cos" => Prim::Cos,
            "exp" => Prim::Exp,
            "tanh" => Prim::Tanh,
            "atan" => Prim::Atan,
            _ => return None,
        })
    }
}

/// Expression tree. Variables are 0-indexed internally (`x1` in text is
/// `Var(0)`).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(usize),
    Param(ParamId),
    Const(f64),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, u32),
    Negate(Box<Expr>),
    Prim(Prim, Box<Expr>),
    /// ∫₀¹ body d(param).
    Integral(ParamId, Box<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn param(id: ParamId) -> Expr {
        Expr::Param(id)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Sum(terms)
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        Expr::Product(factors)
    }

    pub fn power(base: Expr, exponent: u32) -> Expr {
        Expr::Power(Box::new(base), exponent)
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Negate(Box::new(e))
    }

    pub fn prim(p: Prim, arg: Expr) -> Expr {
        Expr::Prim(p, Box::new(arg))
    }

    pub fn integral(param: ParamId, body: Expr) -> Expr {
        Expr::Integral(param, Box::new(body))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("variable x{} out of range for dimension {dimension}", index + 1)]
    VariableOutOfRange { index: usize, dimension: usize },
    #[error("parameter {param} is already used in the expression")]
    ParamInUse { param: ParamId },
    #[error("parameter {param} is not bound by an enclosing integral")]
    UnboundParam { param: ParamId },
    #[error("parameter {param} is bound twice along one path")]
    DuplicateParam { param: ParamId },
    #[error("expected {expected} entries, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("matrix rows have unequal lengths")]
    RaggedMatrix,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable x{} evaluated with a point of dimension {dimension}", index + 1)]
    VariableOutOfRange { index: usize, dimension: usize },
    #[error("parameter {param} has no value (not under its integral?)")]
    UnboundParam { param: ParamId },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Evaluates at a point, resolving every integral node by adaptive quadrature
/// with `cfg`. Fails on dimension mismatch, on a parameter evaluated outside
/// its binder, or when some integral fails to converge.
pub fn eval(e: &Expr, point: &[f64], cfg: &QuadConfig) -> Result<f64, EvalError> {
    let mut env: Vec<(ParamId, f64)> = Vec::new();
    eval_with(e, point, &mut env, cfg)
}

fn eval_with(
    e: &Expr,
    point: &[f64],
    env: &mut Vec<(ParamId, f64)>,
    cfg: &QuadConfig,
) -> Result<f64, EvalError> {
    match e {
        Expr::Var(i) => {
            if *i >= point.len() {
                return Err(EvalError::VariableOutOfRange { index: *i, dimension: point.len() });
            }
            Ok(point[*i])
        }
        Expr::Param(p) => env
            .iter()
            .rev()
            .find(|(id, _)| id == p)
            .map(|(_, v)| *v)
            .ok_or(EvalError::UnboundParam { param: *p }),
        Expr::Const(c) => Ok(*c),
        Expr::Sum(terms) => {
            let mut acc = 0.0;
            for t in terms {
                acc += eval_with(t, point, env, cfg)?;
            }
            Ok(acc)
        }
        Expr::Product(factors) => {
            let mut acc = 1.0;
            for t in factors {
                acc *= eval_with(t, point, env, cfg)?;
            }
            Ok(acc)
        }
        Expr::Power(base, k) => Ok(eval_with(base, point, env, cfg)?.powi(*k as i32)),
        Expr::Negate(inner) => Ok(-eval_with(inner, point, env, cfg)?),
        Expr::Prim(p, arg) => Ok(p.apply(eval_with(arg, point, env, cfg)?)),
        Expr::Integral(param, body) => {
            // The quadrature driver needs a plain Fn closure, so the inner
            // environment and the first inner error travel through cells.
            let inner_env = RefCell::new(env.clone());
            let first_error: RefCell<Option<EvalError>> = RefCell::new(None);
            let outcome = quad::integrate_unit_fn(
                |t| {
                    if first_error.borrow().is_some() {
                        return f64::NAN;
                    }
                    let mut scoped = inner_env.borrow_mut();
                    scoped.push((*param, t));
                    let r = eval_with(body, point, &mut scoped, cfg);
                    scoped.pop();
                    match r {
                        Ok(v) => v,
                        Err(err) => {
                            *first_error.borrow_mut() = Some(err);
                            f64::NAN
                        }
                    }
                },
                cfg,
            );
            if let Some(err) = first_error.into_inner() {
                return Err(err);
            }
            Ok(outcome?.value)
        }
    }
}

/// Symbolic partial derivative with respect to variable `i` (0-indexed).
/// Total and purely syntactic: unknown variables differentiate to zero, and
/// integral nodes are differentiated under the integral sign.
pub fn partial(e: &Expr, i: usize) -> Expr {
    match e {
        Expr::Var(j) => Expr::Const(if *j == i { 1.0 } else { 0.0 }),
        Expr::Param(_) | Expr::Const(_) => Expr::Const(0.0),
        Expr::Sum(terms) => Expr::Sum(terms.iter().map(|t| partial(t, i)).collect()),
        Expr::Product(factors) => {
            let mut terms = Vec::with_capacity(factors.len());
            for (k, _) in factors.iter().enumerate() {
                let mut prod: Vec<Expr> = factors.to_vec();
                prod[k] = partial(&factors[k], i);
                terms.push(Expr::Product(prod));
            }
            Expr::Sum(terms)
        }
        Expr::Power(base, k) => {
            if *k == 0 {
                Expr::Const(0.0)
            } else {
                Expr::product(vec![
                    Expr::Const(f64::from(*k)),
                    Expr::power((**base).clone(), *k - 1),
                    partial(base, i),
                ])
            }
        }
        Expr::Negate(inner) => Expr::negate(partial(inner, i)),
        Expr::Prim(p, arg) => {
            let du = partial(arg, i);
            let outer = match p {
                Prim::Sin => Expr::prim(Prim::Cos, (**arg).clone()),
                Prim::Cos => Expr::negate(Expr::prim(Prim::Sin, (**arg).clone())),
                Prim::Exp => Expr::prim(Prim::Exp, (**arg).clone()),
                // tanh' = 1 - tanh^2.
                Prim::Tanh => Expr::sum(vec![
                    Expr::Const(1.0),
                    Expr::negate(Expr::power(Expr::prim(Prim::Tanh, (**arg).clone()), 2)),
                ]),
                // atan' = 1/(1+x^2) = cos(atan(x))^2, keeping closure.
                Prim::Atan => {
                    Expr::power(Expr::prim(Prim::Cos, Expr::prim(Prim::Atan, (**arg).clone())), 2)
                }
            };
            Expr::product(vec![outer, du])
        }
        Expr::Integral(param, body) => Expr::integral(*param, partial(body, i)),
    }
}

/// Collects every parameter id appearing in `e`, whether as a binder or a
/// reference.
pub fn params_used(e: &Expr) -> BTreeSet<ParamId> {
    fn walk(e: &Expr, out: &mut BTreeSet<ParamId>) {
        match e {
            Expr::Var(_) | Expr::Const(_) => {}
            Expr::Param(p) => {
                out.insert(*p);
            }
            Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|t| walk(t, out)),
            Expr::Power(b, _) => walk(b, out),
            Expr::Negate(b) | Expr::Prim(_, b) => walk(b, out),
            Expr::Integral(p, b) => {
                out.insert(*p);
                walk(b, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(e, &mut out);
    out
}

/// Smallest parameter id not used anywhere in `e`.
pub fn fresh_param(e: &Expr) -> ParamId {
    params_used(e).iter().next_back().map(|p| p + 1).unwrap_or(0)
}

/// Checks the structural invariants against an ambient dimension: variable
/// indices in range, every parameter reference bound by an enclosing
/// integral, and no parameter bound twice along one path.
pub fn validate(e: &Expr, dimension: usize) -> Result<(), ExprError> {
    fn walk(e: &Expr, dimension: usize, bound: &mut Vec<ParamId>) -> Result<(), ExprError> {
        match e {
            Expr::Var(i) => {
                if *i >= dimension {
                    return Err(ExprError::VariableOutOfRange { index: *i, dimension });
                }
                Ok(())
            }
            Expr::Param(p) => {
                if bound.contains(p) {
                    Ok(())
                } else {
                    Err(ExprError::UnboundParam { param: *p })
                }
            }
            Expr::Const(_) => Ok(()),
            Expr::Sum(v) | Expr::Product(v) => {
                v.iter().try_for_each(|t| walk(t, dimension, bound))
            }
            Expr::Power(b, _) => walk(b, dimension, bound),
            Expr::Negate(b) | Expr::Prim(_, b) => walk(b, dimension, bound),
            Expr::Integral(p, b) => {
                if bound.contains(p) {
                    return Err(ExprError::DuplicateParam { param: *p });
                }
                bound.push(*p);
                let r = walk(b, dimension, bound);
                bound.pop();
                r
            }
        }
    }
    walk(e, dimension, &mut Vec::new())
}

/// Gives every binder in `e` a fresh id drawn from `next`, rewriting bound
/// references to match; unbound references are left alone.
fn rename_bound_params(e: &Expr, next: &mut ParamId, env: &mut Vec<(ParamId, ParamId)>) -> Expr {
    match e {
        Expr::Var(_) | Expr::Const(_) => e.clone(),
        Expr::Param(p) => {
            let mapped = env.iter().rev().find(|(old, _)| old == p).map(|(_, new)| *new);
            Expr::Param(mapped.unwrap_or(*p))
        }
        Expr::Sum(v) => Expr::Sum(v.iter().map(|t| rename_bound_params(t, next, env)).collect()),
        Expr::Product(v) => {
            Expr::Product(v.iter().map(|t| rename_bound_params(t, next, env)).collect())
        }
        Expr::Power(b, k) => Expr::power(rename_bound_params(b, next, env), *k),
        Expr::Negate(b) => Expr::negate(rename_bound_params(b, next, env)),
        Expr::Prim(p, b) => Expr::prim(*p, rename_bound_params(b, next, env)),
        Expr::Integral(p, b) => {
            let fresh = *next;
            *next += 1;
            env.push((*p, fresh));
            let body = rename_bound_params(b, next, env);
            env.pop();
            Expr::integral(fresh, body)
        }
    }
}

/// Substitutes `images[j]` for variable `j`. The images' bound parameters are
/// renamed first so no parameter ends up bound twice along a path of the
/// result. Fails if `g` mentions a variable with no image.
pub fn subst_vector(g: &Expr, images: &[Expr]) -> Result<Expr, ExprError> {
    let mut next: ParamId = {
        let mut ids = params_used(g);
        for im in images {
            ids.extend(params_used(im));
        }
        ids.iter().next_back().map(|p| p + 1).unwrap_or(0)
    };
    let renamed: Vec<Expr> = images
        .iter()
        .map(|im| rename_bound_params(im, &mut next, &mut Vec::new()))
        .collect();

    fn walk(e: &Expr, images: &[Expr]) -> Result<Expr, ExprError> {
        match e {
            Expr::Var(j) => images
                .get(*j)
                .cloned()
                .ok_or(ExprError::VariableOutOfRange { index: *j, dimension: images.len() }),
            Expr::Param(_) | Expr::Const(_) => Ok(e.clone()),
            Expr::Sum(v) => Ok(Expr::Sum(
                v.iter().map(|t| walk(t, images)).collect::<Result<_, _>>()?,
            )),
            Expr::Product(v) => Ok(Expr::Product(
                v.iter().map(|t| walk(t, images)).collect::<Result<_, _>>()?,
            )),
            Expr::Power(b, k) => Ok(Expr::power(walk(b, images)?, *k)),
            Expr::Negate(b) => Ok(Expr::negate(walk(b, images)?)),
            Expr::Prim(p, b) => Ok(Expr::prim(*p, walk(b, images)?)),
            Expr::Integral(p, b) => Ok(Expr::integral(*p, walk(b, images)?)),
        }
    }
    walk(g, &renamed)
}

/// Precomposition with a linear map given as a matrix: variable `j` of `g` is
/// replaced by `Σ_k h[k][j] · x_{k+1}`, so `h` has one row per new variable
/// and one column per old variable.
pub fn subst_linear(g: &Expr, h: &[Vec<f64>]) -> Result<Expr, ExprError> {
    let old_dim = h.first().map(Vec::len).unwrap_or(0);
    if h.iter().any(|row| row.len() != old_dim) {
        return Err(ExprError::RaggedMatrix);
    }
    let images: Vec<Expr> = (0..old_dim)
        .map(|j| {
            Expr::Sum(
                h.iter()
                    .enumerate()
                    .map(|(k, row)| Expr::product(vec![Expr::Const(row[j]), Expr::Var(k)]))
                    .collect(),
            )
        })
        .collect();
    subst_vector(g, &images)
}

/// Replaces every variable `x_i` by `param · x_i` — the scaling substitution
/// `f(t·x)` used to build line integrals. Fails if `param` already occurs.
pub fn scale_vars(f: &Expr, param: ParamId) -> Result<Expr, ExprError> {
    if params_used(f).contains(&param) {
        return Err(ExprError::ParamInUse { param });
    }
    fn walk(e: &Expr, param: ParamId) -> Expr {
        match e {
            Expr::Var(i) => Expr::product(vec![Expr::Param(param), Expr::Var(*i)]),
            Expr::Param(_) | Expr::Const(_) => e.clone(),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|t| walk(t, param)).collect()),
            Expr::Product(v) => Expr::Product(v.iter().map(|t| walk(t, param)).collect()),
            Expr::Power(b, k) => Expr::power(walk(b, param), *k),
            Expr::Negate(b) => Expr::negate(walk(b, param)),
            Expr::Prim(p, b) => Expr::prim(*p, walk(b, param)),
            Expr::Integral(p, b) => Expr::integral(*p, walk(b, param)),
        }
    }
    Ok(walk(f, param))
}

/// Embeds an exact polynomial as an expression (coefficients become f64
/// constants), with terms in descending graded-lex order.
pub fn from_poly(p: &Poly) -> Expr {
    let mut terms: Vec<Expr> = Vec::new();
    for (m, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
        let coeff = rational_to_f64(c);
        let mut factors: Vec<Expr> = Vec::new();
        if coeff.abs() != 1.0 || m.is_unit() {
            factors.push(Expr::Const(coeff.abs()));
        }
        for (i, e) in m.exponents() {
            factors.push(if e == 1 {
                Expr::Var(i)
            } else {
                Expr::power(Expr::Var(i), e)
            });
        }
        let magnitude = if factors.len() == 1 {
            factors.pop().expect("nonempty")
        } else {
            Expr::Product(factors)
        };
        terms.push(if coeff < 0.0 { Expr::negate(magnitude) } else { magnitude });
    }
    match terms.len() {
        0 => Expr::Const(0.0),
        1 => terms.pop().expect("nonempty"),
        _ => Expr::Sum(terms),
    }
}

/// Structural cleanup: flattens nested sums/products, folds constants
/// (including primitives of constants), strips units (`+0`, `*1`, `^1`,
/// double negation), and collapses integrals of constants. Keeps term order;
/// never combines like terms. Idempotent.
pub fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Var(_) | Expr::Param(_) => e.clone(),
        Expr::Const(c) => Expr::Const(if *c == 0.0 { 0.0 } else { *c }),
        Expr::Sum(terms) => {
            let mut flat: Vec<Expr> = Vec::new();
            let mut constant = 0.0;
            for t in terms {
                match simplify(t) {
                    Expr::Sum(inner) => {
                        for u in inner {
                            match u {
                                Expr::Const(c) => constant += c,
                                other => flat.push(other),
                            }
                        }
                    }
                    Expr::Const(c) => constant += c,
                    other => flat.push(other),
                }
            }
            if constant != 0.0 || flat.is_empty() {
                flat.push(Expr::Const(constant));
            }
            if flat.len() == 1 {
                flat.pop().expect("nonempty")
            } else {
                Expr::Sum(flat)
            }
        }
        Expr::Product(factors) => {
            let mut flat: Vec<Expr> = Vec::new();
            let mut coeff = 1.0;
            for t in factors {
                match simplify(t) {
                    Expr::Product(inner) => {
                        for u in inner {
                            match u {
                                Expr::Const(c) => coeff *= c,
                                other => flat.push(other),
                            }
                        }
                    }
                    Expr::Const(c) => coeff *= c,
                    other => flat.push(other),
                }
            }
            if coeff == 0.0 {
                return Expr::Const(0.0);
            }
            if flat.is_empty() {
                return Expr::Const(coeff);
            }
            if coeff != 1.0 {
                flat.insert(0, Expr::Const(coeff));
            }
            if flat.len() == 1 {
                flat.pop().expect("nonempty")
            } else {
                Expr::Product(flat)
            }
        }
        Expr::Power(base, k) => {
            let b = simplify(base);
            match (*k, b) {
                (0, _) => Expr::Const(1.0),
                (1, b) => b,
                (k, Expr::Const(c)) => Expr::Const(c.powi(k as i32)),
                (k, b) => Expr::power(b, k),
            }
        }
        Expr::Negate(inner) => match simplify(inner) {
            Expr::Negate(twice) => *twice,
            Expr::Const(c) => Expr::Const(if c == 0.0 { 0.0 } else { -c }),
            other => Expr::negate(other),
        },
        Expr::Prim(p, arg) => match simplify(arg) {
            Expr::Const(c) => Expr::Const(p.apply(c)),
            other => Expr::prim(*p, other),
        },
        Expr::Integral(param, body) => match simplify(body) {
            // ∫₀¹ c dt = c.
            Expr::Const(c) => Expr::Const(c),
            other => Expr::integral(*param, other),
        },
    }
}

/// Display name for a parameter id: `t`, `s`, `u`, then `p3`, `p4`, …
pub fn param_name(id: ParamId) -> String {
    match id {
        0 => "t".to_string(),
        1 => "s".to_string(),
        2 => "u".to_string(),
        k => format!("p{k}"),
    }
}

/// Precedence contexts for printing, from loosest to tightest: a sum may
/// appear bare only at `Sum` level, a product at `Term` level or looser, a
/// power at `Factor` level or looser; `Atom` admits only grammar atoms.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Ctx {
    Sum,
    Term,
    Factor,
    Atom,
}

fn fmt_expr(e: &Expr, f: &mut fmt::Formatter<'_>, ctx: Ctx) -> fmt::Result {
    match e {
        Expr::Var(i) => write!(f, "x{}", i + 1),
        Expr::Param(p) => write!(f, "{}", param_name(*p)),
        Expr::Const(c) => write!(f, "{c}"),
        Expr::Sum(terms) => {
            if ctx > Ctx::Sum || terms.is_empty() {
                write!(f, "(")?;
                fmt_sum(terms, f)?;
                return write!(f, ")");
            }
            fmt_sum(terms, f)
        }
        Expr::Product(factors) => {
            if ctx > Ctx::Term || factors.is_empty() {
                write!(f, "(")?;
                fmt_product(factors, f)?;
                return write!(f, ")");
            }
            fmt_product(factors, f)
        }
        Expr::Power(base, k) => {
            if ctx > Ctx::Factor {
                write!(f, "(")?;
                fmt_expr(base, f, Ctx::Atom)?;
                write!(f, "^{k}")?;
                return write!(f, ")");
            }
            fmt_expr(base, f, Ctx::Atom)?;
            write!(f, "^{k}")
        }
        // '-' atom is itself an atom in the grammar, so no parens are needed
        // around the minus — only around a non-atomic operand.
        Expr::Negate(inner) => {
            write!(f, "-")?;
            fmt_expr(inner, f, Ctx::Atom)
        }
        Expr::Prim(p, arg) => {
            write!(f, "{}(", p.name())?;
            fmt_expr(arg, f, Ctx::Sum)?;
            write!(f, ")")
        }
        Expr::Integral(param, body) => {
            write!(f, "int[{}](", param_name(*param))?;
            fmt_expr(body, f, Ctx::Sum)?;
            write!(f, ")")
        }
    }
}

fn fmt_sum(terms: &[Expr], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (idx, t) in terms.iter().enumerate() {
        if idx == 0 {
            fmt_expr(t, f, Ctx::Term)?;
            continue;
        }
        match t {
            Expr::Negate(inner) => {
                write!(f, " - ")?;
                fmt_expr(inner, f, Ctx::Term)?;
            }
            Expr::Const(c) if *c < 0.0 => {
                write!(f, " - {}", -c)?;
            }
            _ => {
                write!(f, " + ")?;
                fmt_expr(t, f, Ctx::Term)?;
            }
        }
    }
    Ok(())
}

fn fmt_product(factors: &[Expr], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if factors.is_empty() {
        return write!(f, "1");
    }
    for (idx, t) in factors.iter().enumerate() {
        if idx > 0 {
            write!(f, "*")?;
        }
        fmt_expr(t, f, Ctx::Factor)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, f, Ctx::Sum)
    }
}
