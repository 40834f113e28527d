//! Pointwise trials for the expression backend.
//!
//! Checks evaluate both sides of an identity at random points of
//! `[-1, 1]^n` and compare deviations scaled by the magnitude of the values
//! involved: `|a - b| / max(1, |a|, |b|)`.  Quadrature that does not
//! converge, or evaluation that overflows, marks the trial inconclusive.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::generators::{
    gen_expr, gen_matrix, gen_poly, gen_poly_one_form, sample_dimension, sample_points,
};
use super::{GenConfig, Outcome, SmoothCtx, Suite};
use crate::expr::{self, EvalError, Expr};
use crate::poly_calculus as pc;
use crate::smooth_calculus::{self as sc, DualElement, SmoothOneForm, SmoothTwoTensor};
use crate::{DegreeOp, InvertibleOp};

enum Val {
    Num(f64),
    Inconclusive,
}

fn eval_val(e: &Expr, point: &[f64], ctx: &SmoothCtx) -> Val {
    match expr::eval(e, point, ctx.quad) {
        Ok(v) if v.is_finite() => Val::Num(v),
        Ok(_) => Val::Inconclusive,
        Err(EvalError::Quad(_)) => Val::Inconclusive,
        Err(err) => panic!("law suite generated an invalid expression: {err}"),
    }
}

fn scalar_outcome(a: f64, b: f64, tol: f64) -> Outcome {
    if !a.is_finite() || !b.is_finite() {
        return Outcome::inconclusive();
    }
    let dev = (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    if dev <= tol {
        Outcome::pass(dev)
    } else {
        Outcome::fail(dev)
    }
}

/// Compares two expressions at every sample point.
fn check_pointwise(a: &Expr, b: &Expr, points: &[Vec<f64>], ctx: &SmoothCtx) -> Outcome {
    let mut out = Outcome::pass(0.0);
    for point in points {
        let va = match eval_val(a, point, ctx) {
            Val::Num(v) => v,
            Val::Inconclusive => return out.merge(Outcome::inconclusive()),
        };
        let vb = match eval_val(b, point, ctx) {
            Val::Num(v) => v,
            Val::Inconclusive => return out.merge(Outcome::inconclusive()),
        };
        out = out.merge(scalar_outcome(va, vb, ctx.tol));
    }
    out
}

/// Multiplies every component of a one-form by a fixed function.
fn scale_smooth_form(f: &Expr, w: &SmoothOneForm) -> SmoothOneForm {
    SmoothOneForm::new(
        w.dimension(),
        w.components()
            .iter()
            .map(|c| Expr::product(vec![f.clone(), c.clone()]))
            .collect(),
    )
}

/// Shape bounds for inputs that end up inside nested integrals.
fn shallow(gen: &GenConfig) -> GenConfig {
    GenConfig {
        max_depth: gen.max_depth.min(2),
        ..gen.clone()
    }
}

/// Constants, Leibniz via two symbolic routes, and symmetric second
/// partials.
fn d_axioms(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let dim = sample_dimension(rng, ctx.gen);
    let f = gen_expr(rng, dim, ctx.gen);
    let g = gen_expr(rng, dim, ctx.gen);
    let points = sample_points(rng, dim, ctx.points);
    let mut out = Outcome::pass(0.0);

    let c = Expr::constant(rng.gen_range(-4.0..=4.0));
    for comp in sc::d(&c, dim).components() {
        out = out.merge(check_pointwise(comp, &Expr::constant(0.0), &points, ctx));
    }

    let product = Expr::product(vec![f.clone(), g.clone()]);
    for i in 0..dim {
        let lhs = expr::partial(&product, i);
        let rhs = Expr::sum(vec![
            Expr::product(vec![f.clone(), expr::partial(&g, i)]),
            Expr::product(vec![g.clone(), expr::partial(&f, i)]),
        ]);
        out = out.merge(check_pointwise(&lhs, &rhs, &points, ctx));
    }

    for i in 0..dim {
        for j in (i + 1)..dim {
            let ij = expr::partial(&expr::partial(&f, i), j);
            let ji = expr::partial(&expr::partial(&f, j), i);
            out = out.merge(check_pointwise(&ij, &ji, &points, ctx));
        }
    }
    out
}

/// Chain rule for `d` under composition with a tuple of expressions.
fn chain(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let n = sample_dimension(rng, ctx.gen);
    let k = sample_dimension(rng, ctx.gen);
    let inner = shallow(ctx.gen);
    let g = gen_expr(rng, k, &inner);
    let alpha: Vec<Expr> = (0..k).map(|_| gen_expr(rng, n, &inner)).collect();
    let composite = expr::subst_vector(&g, &alpha).expect("arity matches");
    let points = sample_points(rng, n, ctx.points);

    let mut out = Outcome::pass(0.0);
    for i in 0..n {
        let lhs = expr::partial(&composite, i);
        let rhs = Expr::sum(
            (0..k)
                .map(|j| {
                    let outer = expr::subst_vector(&expr::partial(&g, j), &alpha)
                        .expect("arity matches");
                    Expr::product(vec![outer, expr::partial(&alpha[j], i)])
                })
                .collect(),
        );
        out = out.merge(check_pointwise(&lhs, &rhs, &points, ctx));
    }
    out
}

/// Generator normalization and the product rule of the integral
/// transformation.
fn s_axioms(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let dim = sample_dimension(rng, ctx.gen);
    let points = sample_points(rng, dim, ctx.points);
    let mut out = Outcome::pass(0.0);

    let consts: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    let constant_form = SmoothOneForm::new(
        dim,
        consts.iter().map(|&c| Expr::constant(c)).collect(),
    );
    let linear = Expr::sum(
        consts
            .iter()
            .enumerate()
            .map(|(i, &c)| Expr::product(vec![Expr::constant(c), Expr::var(i)]))
            .collect(),
    );
    out = out.merge(check_pointwise(&sc::s(&constant_form), &linear, &points, ctx));

    let inner = shallow(ctx.gen);
    let w = SmoothOneForm::new(dim, (0..dim).map(|_| gen_expr(rng, dim, &inner)).collect());
    let v = SmoothOneForm::new(dim, (0..dim).map(|_| gen_expr(rng, dim, &inner)).collect());
    let sw = sc::s(&w);
    let sv = sc::s(&v);
    let lhs = Expr::product(vec![sw.clone(), sv.clone()]);
    let rhs = Expr::sum(vec![
        sc::s(&scale_smooth_form(&sv, &w)),
        sc::s(&scale_smooth_form(&sw, &v)),
    ]);
    out.merge(check_pointwise(&lhs, &rhs, &points, ctx))
}

/// The fundamental identity `s(df)(v) + f(0) = f(v)` and recovery of a
/// differential from its potential.
fn calculus(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let dim = sample_dimension(rng, ctx.gen);
    let f = gen_expr(rng, dim, ctx.gen);
    let points = sample_points(rng, dim, ctx.points);

    let f0 = match sc::counit(&f, dim, ctx.quad) {
        Ok(v) if v.is_finite() => v,
        Ok(_) => return Outcome::inconclusive(),
        Err(EvalError::Quad(_)) => return Outcome::inconclusive(),
        Err(err) => panic!("law suite generated an invalid expression: {err}"),
    };
    let w = sc::d(&f, dim);
    let recovered = Expr::sum(vec![sc::s(&w), Expr::constant(f0)]);
    let mut out = check_pointwise(&recovered, &f, &points, ctx);

    let sigma = sc::s(&w);
    let d_sigma = sc::d(&sigma, dim);
    for i in 0..dim {
        out = out.merge(check_pointwise(d_sigma.component(i), w.component(i), &points, ctx));
    }
    out
}

/// Slot order independence for two-tensors of expressions.
fn interchange(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let dim = sample_dimension(rng, ctx.gen);
    let inner = shallow(ctx.gen);
    let entries: Vec<Vec<Expr>> = (0..dim)
        .map(|_| (0..dim).map(|_| gen_expr(rng, dim, &inner)).collect())
        .collect();
    let t = SmoothTwoTensor::new(dim, entries);
    let points = sample_points(rng, dim, ctx.points);
    check_pointwise(
        &sc::s_first_slots(&t),
        &sc::s_first_slots(&t.transpose()),
        &points,
        ctx,
    )
}

/// The origin-gradient functional: vanishing on constants, product rule,
/// coordinate normalization, and the chain rule.
fn epsilon(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let dim = sample_dimension(rng, ctx.gen);
    let f = gen_expr(rng, dim, ctx.gen);
    let g = gen_expr(rng, dim, ctx.gen);
    let mut out = Outcome::pass(0.0);

    let eps = |e: &Expr, d: usize| -> Result<Vec<f64>, Outcome> {
        match sc::epsilon(e, d, ctx.quad) {
            Ok(v) if v.iter().all(|x| x.is_finite()) => Ok(v),
            Ok(_) => Err(Outcome::inconclusive()),
            Err(EvalError::Quad(_)) => Err(Outcome::inconclusive()),
            Err(err) => panic!("law suite generated an invalid expression: {err}"),
        }
    };
    let origin_value = |e: &Expr, d: usize| -> Result<f64, Outcome> {
        match sc::counit(e, d, ctx.quad) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(Outcome::inconclusive()),
            Err(EvalError::Quad(_)) => Err(Outcome::inconclusive()),
            Err(err) => panic!("law suite generated an invalid expression: {err}"),
        }
    };

    let c = Expr::constant(rng.gen_range(-4.0..=4.0));
    match eps(&c, dim) {
        Ok(v) => {
            for x in v {
                out = out.merge(scalar_outcome(x, 0.0, ctx.tol));
            }
        }
        Err(o) => return out.merge(o),
    }

    for i in 0..dim {
        match eps(&Expr::var(i), dim) {
            Ok(v) => {
                for (j, x) in v.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    out = out.merge(scalar_outcome(*x, expected, ctx.tol));
                }
            }
            Err(o) => return out.merge(o),
        }
    }

    let (f0, g0, ef, eg, epg) = match (
        origin_value(&f, dim),
        origin_value(&g, dim),
        eps(&f, dim),
        eps(&g, dim),
        eps(&Expr::product(vec![f.clone(), g.clone()]), dim),
    ) {
        (Ok(a), Ok(b), Ok(c1), Ok(c2), Ok(c3)) => (a, b, c1, c2, c3),
        _ => return out.merge(Outcome::inconclusive()),
    };
    for i in 0..dim {
        out = out.merge(scalar_outcome(epg[i], f0 * eg[i] + g0 * ef[i], ctx.tol));
    }

    let k = sample_dimension(rng, ctx.gen);
    let inner = shallow(ctx.gen);
    let gk = gen_expr(rng, k, &inner);
    let alpha: Vec<Expr> = (0..k).map(|_| gen_expr(rng, dim, &inner)).collect();
    let composite = expr::subst_vector(&gk, &alpha).expect("arity matches");
    let a0: Vec<f64> = match alpha
        .iter()
        .map(|aj| origin_value(aj, dim))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(v) => v,
        Err(o) => return out.merge(o),
    };
    let e_comp = match eps(&composite, dim) {
        Ok(v) => v,
        Err(o) => return out.merge(o),
    };
    let e_alpha: Vec<Vec<f64>> = match alpha
        .iter()
        .map(|aj| eps(aj, dim))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(v) => v,
        Err(o) => return out.merge(o),
    };
    for i in 0..dim {
        let mut expected = 0.0;
        for j in 0..k {
            let dgj = match expr::eval(&expr::partial(&gk, j), &a0, ctx.quad) {
                Ok(v) => v,
                Err(EvalError::Quad(_)) => return out.merge(Outcome::inconclusive()),
                Err(err) => panic!("law suite generated an invalid expression: {err}"),
            };
            expected += dgj * e_alpha[j][i];
        }
        out = out.merge(scalar_outcome(e_comp[i], expected, ctx.tol));
    }
    out
}

/// Compatibility of `d` and `s` with substitution along linear maps.
fn naturality(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let n = sample_dimension(rng, ctx.gen);
    let m = sample_dimension(rng, ctx.gen);
    // h[k][j] is the coefficient of the new variable y_k in the image of x_j.
    let h = gen_matrix(rng, m, n);
    let push = |e: &Expr| expr::subst_linear(e, &h).expect("matrix is rectangular");
    let points = sample_points(rng, m, ctx.points);
    let mut out = Outcome::pass(0.0);

    let f = gen_expr(rng, n, ctx.gen);
    let pushed = push(&f);
    for (k, row) in h.iter().enumerate() {
        let lhs = expr::partial(&pushed, k);
        let rhs = Expr::sum(
            row.iter()
                .enumerate()
                .map(|(j, &hkj)| {
                    Expr::product(vec![Expr::constant(hkj), push(&expr::partial(&f, j))])
                })
                .collect(),
        );
        out = out.merge(check_pointwise(&lhs, &rhs, &points, ctx));
    }

    let inner = shallow(ctx.gen);
    let w = SmoothOneForm::new(n, (0..n).map(|_| gen_expr(rng, n, &inner)).collect());
    let transformed = SmoothOneForm::new(
        m,
        h.iter()
            .map(|row| {
                Expr::sum(
                    row.iter()
                        .enumerate()
                        .map(|(j, &hkj)| {
                            Expr::product(vec![Expr::constant(hkj), push(w.component(j))])
                        })
                        .collect(),
                )
            })
            .collect(),
    );
    out.merge(check_pointwise(&sc::s(&transformed), &push(&sc::s(&w)), &points, ctx))
}

/// The expression backend agrees with the exact polynomial backend on
/// embedded polynomials.
fn lambda_compat(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let dim = sample_dimension(rng, ctx.gen);
    let points = sample_points(rng, dim, ctx.points);
    let mut out = Outcome::pass(0.0);

    let p = gen_poly(rng, dim, ctx.gen);
    let f = expr::from_poly(&p);
    for i in 0..dim {
        let exact = expr::from_poly(&p.partial(i).expect("index in range"));
        out = out.merge(check_pointwise(&expr::partial(&f, i), &exact, &points, ctx));
    }

    let pw = gen_poly_one_form(rng, dim, ctx.gen);
    let sw_exact = expr::from_poly(&pc::s(&pw));
    let smooth_form = SmoothOneForm::new(
        dim,
        pw.components().iter().map(expr::from_poly).collect(),
    );
    out = out.merge(check_pointwise(&sc::s(&smooth_form), &sw_exact, &points, ctx));

    let k_exact = expr::from_poly(&pc::degree_op(DegreeOp::K, &p));
    match sc::degree_op(DegreeOp::K, &f, dim, ctx.quad) {
        Ok(k_smooth) => out.merge(check_pointwise(&k_smooth, &k_exact, &points, ctx)),
        Err(EvalError::Quad(_)) => out.merge(Outcome::inconclusive()),
        Err(err) => panic!("law suite generated an invalid expression: {err}"),
    }
}

/// Two-sided invertibility of the degree-style operators.
fn inverses(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let dim = sample_dimension(rng, ctx.gen);
    let f = gen_expr(rng, dim, ctx.gen);
    let points = sample_points(rng, dim, ctx.points);
    let mut out = Outcome::pass(0.0);

    for op in [InvertibleOp::K, InvertibleOp::J] {
        let forward = match op {
            InvertibleOp::K => DegreeOp::K,
            InvertibleOp::J => DegreeOp::J,
        };
        let round_one = sc::degree_op_inverse(op, &f, dim, ctx.quad)
            .and_then(|inv| sc::degree_op(forward, &inv, dim, ctx.quad));
        match round_one {
            Ok(back) => out = out.merge(check_pointwise(&back, &f, &points, ctx)),
            Err(EvalError::Quad(_)) => return out.merge(Outcome::inconclusive()),
            Err(err) => panic!("law suite generated an invalid expression: {err}"),
        }
        let round_two = sc::degree_op(forward, &f, dim, ctx.quad)
            .and_then(|fwd| sc::degree_op_inverse(op, &fwd, dim, ctx.quad));
        match round_two {
            Ok(back) => out = out.merge(check_pointwise(&back, &f, &points, ctx)),
            Err(EvalError::Quad(_)) => return out.merge(Outcome::inconclusive()),
            Err(err) => panic!("law suite generated an invalid expression: {err}"),
        }
    }
    out
}

/// Rota–Baxter identity of weight zero for the averaging operator, and
/// symmetry of the induced double product.
fn rota_baxter(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let dim = sample_dimension(rng, ctx.gen);
    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let inner = shallow(ctx.gen);
    let f = gen_expr(rng, dim, &inner);
    let g = gen_expr(rng, dim, &inner);
    let points = sample_points(rng, dim, ctx.points);

    let p = |e: &Expr| sc::rota_baxter(e, &v);
    let lhs = Expr::product(vec![p(&f), p(&g)]);
    let rhs = Expr::sum(vec![
        p(&Expr::product(vec![f.clone(), p(&g)])),
        p(&Expr::product(vec![p(&f), g.clone()])),
    ]);
    let out = check_pointwise(&lhs, &rhs, &points, ctx);

    let fg = sc::double_product(&f, &g, &v);
    let gf = sc::double_product(&g, &f, &v);
    out.merge(check_pointwise(&fg, &gf, &points, ctx))
}

/// Square-zero extension: the induced map implements the chain rule and is
/// multiplicative.
fn derivation(rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    let n = sample_dimension(rng, ctx.gen);
    let k = sample_dimension(rng, ctx.gen);
    let inner = shallow(ctx.gen);
    let g = gen_expr(rng, k, &inner);
    let alpha: Vec<Expr> = (0..k).map(|_| gen_expr(rng, n, &inner)).collect();
    let points = sample_points(rng, n, ctx.points);

    let duals: Vec<DualElement> = alpha
        .iter()
        .map(|aj| DualElement {
            base: aj.clone(),
            tangent: (0..n).map(|i| expr::partial(aj, i)).collect(),
        })
        .collect();
    let composite = expr::subst_vector(&g, &alpha).expect("arity matches");
    let res = sc::square_zero_apply(&g, &duals).expect("dual elements are rectangular");

    let mut out = check_pointwise(&res.base, &composite, &points, ctx);
    for i in 0..n {
        out = out.merge(check_pointwise(
            &res.tangent[i],
            &expr::partial(&composite, i),
            &points,
            ctx,
        ));
    }

    let h = gen_expr(rng, k, &inner);
    let res_h = sc::square_zero_apply(&h, &duals).expect("dual elements are rectangular");
    let res_gh = sc::square_zero_apply(&Expr::product(vec![g.clone(), h.clone()]), &duals)
        .expect("dual elements are rectangular");
    out = out.merge(check_pointwise(
        &res_gh.base,
        &Expr::product(vec![res.base.clone(), res_h.base.clone()]),
        &points,
        ctx,
    ));
    for i in 0..n {
        let expected = Expr::sum(vec![
            Expr::product(vec![res.base.clone(), res_h.tangent[i].clone()]),
            Expr::product(vec![res_h.base.clone(), res.tangent[i].clone()]),
        ]);
        out = out.merge(check_pointwise(&res_gh.tangent[i], &expected, &points, ctx));
    }
    out
}

pub(crate) fn run_trial(suite: Suite, rng: &mut ChaCha8Rng, ctx: &SmoothCtx) -> Outcome {
    match suite {
        Suite::DAxioms => d_axioms(rng, ctx),
        Suite::Chain => chain(rng, ctx),
        Suite::SAxioms => s_axioms(rng, ctx),
        Suite::Calculus => calculus(rng, ctx),
        Suite::Interchange => interchange(rng, ctx),
        Suite::Epsilon => epsilon(rng, ctx),
        Suite::Naturality => naturality(rng, ctx),
        Suite::LambdaCompat => lambda_compat(rng, ctx),
        Suite::Inverses => inverses(rng, ctx),
        Suite::RotaBaxter => rota_baxter(rng, ctx),
        Suite::Derivation => derivation(rng, ctx),
        Suite::NegativeControl => unreachable!("suite availability is checked before dispatch"),
    }
}
