//! Exact-arithmetic trials for the polynomial backend.
//!
//! Every check compares polynomials coefficient-by-coefficient; the error
//! reported on a failure is the largest coefficient of the difference.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::generators::{
    gen_poly, gen_poly_one_form, gen_rational_matrix, sample_dimension,
};
use super::{GenConfig, Outcome, Suite};
use crate::poly::{Poly, Rational};
use crate::poly_calculus::{self as pc, PolyOneForm, PolyTwoTensor};
use crate::{DegreeOp, InvertibleOp};

fn exact_eq(lhs: &Poly, rhs: &Poly) -> Outcome {
    let diff = lhs.try_sub(rhs).expect("suite compares equal dimensions");
    if diff.is_zero() {
        Outcome::pass(0.0)
    } else {
        Outcome::fail(diff.max_coefficient_abs())
    }
}

fn exact_form_eq(lhs: &PolyOneForm, rhs: &PolyOneForm) -> Outcome {
    lhs.components()
        .iter()
        .zip(rhs.components())
        .map(|(a, b)| exact_eq(a, b))
        .fold(Outcome::pass(0.0), Outcome::merge)
}

fn add_forms(a: &PolyOneForm, b: &PolyOneForm) -> PolyOneForm {
    PolyOneForm::new(
        a.dimension(),
        a.components()
            .iter()
            .zip(b.components())
            .map(|(x, y)| x + y)
            .collect(),
    )
}

fn scale_form_rational(c: &Rational, w: &PolyOneForm) -> PolyOneForm {
    PolyOneForm::new(
        w.dimension(),
        w.components().iter().map(|p| p.scale(c)).collect(),
    )
}

/// Constants, Leibniz, linearity, and symmetric second derivatives.
fn d_axioms(rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    let dim = sample_dimension(rng, gen);
    let p = gen_poly(rng, dim, gen);
    let q = gen_poly(rng, dim, gen);
    let c = Poly::constant(dim, crate::poly::rat(rng.gen_range(-9i64..=9), 1));
    let a = crate::poly::rat(rng.gen_range(-3i64..=3), 1);
    let b = crate::poly::rat(rng.gen_range(-3i64..=3), 2);

    let mut out = exact_form_eq(&pc::d(&c), &PolyOneForm::zero(dim));

    let product = &p * &q;
    let leibniz = add_forms(&pc::scale_form(&p, &pc::d(&q)), &pc::scale_form(&q, &pc::d(&p)));
    out = out.merge(exact_form_eq(&pc::d(&product), &leibniz));

    let combo = &p.scale(&a) + &q.scale(&b);
    let linear = add_forms(
        &scale_form_rational(&a, &pc::d(&p)),
        &scale_form_rational(&b, &pc::d(&q)),
    );
    out = out.merge(exact_form_eq(&pc::d(&combo), &linear));

    let hess = pc::second_derivative(&p);
    for i in 0..dim {
        for j in (i + 1)..dim {
            out = out.merge(exact_eq(hess.entry(i, j), hess.entry(j, i)));
        }
    }
    out
}

/// Chain rule for `d` under polynomial substitution.
fn chain(rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    // Composites multiply degrees, so keep both layers small.
    let inner_gen = GenConfig {
        max_degree: gen.max_degree.min(3),
        max_terms: gen.max_terms.min(4),
        ..gen.clone()
    };
    let n = sample_dimension(rng, gen);
    let k = sample_dimension(rng, gen);
    let g = gen_poly(rng, k, &inner_gen);
    let alpha: Vec<Poly> = (0..k).map(|_| gen_poly(rng, n, &inner_gen)).collect();
    let composite = g.substitute(&alpha).expect("arity matches");

    let lhs = pc::d(&composite);
    let mut out = Outcome::pass(0.0);
    for i in 0..n {
        let mut rhs = Poly::zero(n);
        for (j, alpha_j) in alpha.iter().enumerate() {
            let outer = g
                .partial(j)
                .expect("index in range")
                .substitute(&alpha)
                .expect("arity matches");
            rhs = &rhs + &(&outer * &alpha_j.partial(i).expect("index in range"));
        }
        out = out.merge(exact_eq(lhs.component(i), &rhs));
    }
    out
}

/// Generator normalization and the product rule of the integral
/// transformation.
fn s_axioms(rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    let dim = sample_dimension(rng, gen);
    let mut out = Outcome::pass(0.0);

    // s maps the i-th generator differential to the i-th coordinate.
    for i in 0..dim {
        let mut comps = vec![Poly::zero(dim); dim];
        comps[i] = Poly::one(dim);
        out = out.merge(exact_eq(&pc::s(&PolyOneForm::new(dim, comps)), &Poly::var(dim, i)));
    }

    let w = gen_poly_one_form(rng, dim, gen);
    let v = gen_poly_one_form(rng, dim, gen);
    let sw = pc::s(&w);
    let sv = pc::s(&v);
    let lhs = &sw * &sv;
    let rhs = &pc::s(&pc::scale_form(&sv, &w)) + &pc::s(&pc::scale_form(&sw, &v));
    out.merge(exact_eq(&lhs, &rhs))
}

/// The fundamental identity and exactness of differentials.
fn calculus(rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    let dim = sample_dimension(rng, gen);
    let p = gen_poly(rng, dim, gen);

    let recovered = &pc::s(&pc::d(&p)) + &Poly::constant(dim, p.constant_term());
    let mut out = exact_eq(&recovered, &p);

    let w = pc::d(&p);
    if !pc::is_closed_exact(&w) {
        out = out.merge(Outcome::fail(f64::INFINITY));
    }
    out = out.merge(exact_form_eq(&pc::d(&pc::s(&w)), &w));
    out
}

/// Slot order independence for two-tensors.
fn interchange(rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    let dim = sample_dimension(rng, gen);
    let entries: Vec<Vec<Poly>> = (0..dim)
        .map(|_| (0..dim).map(|_| gen_poly(rng, dim, gen)).collect())
        .collect();
    let t = PolyTwoTensor::new(dim, entries);
    exact_eq(&pc::s_first_slots(&t), &pc::s_first_slots(&t.transpose()))
}

/// Two-sided invertibility of the degree-style operators and the
/// factorizations of `s` through them.
fn inverses(rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    let dim = sample_dimension(rng, gen);
    let p = gen_poly(rng, dim, gen);
    let mut out = Outcome::pass(0.0);

    for op in [InvertibleOp::K, InvertibleOp::J] {
        let forward = match op {
            InvertibleOp::K => DegreeOp::K,
            InvertibleOp::J => DegreeOp::J,
        };
        out = out.merge(exact_eq(
            &pc::degree_op(forward, &pc::degree_op_inverse(op, &p)),
            &p,
        ));
        out = out.merge(exact_eq(
            &pc::degree_op_inverse(op, &pc::degree_op(forward, &p)),
            &p,
        ));
    }

    let w = gen_poly_one_form(rng, dim, gen);
    let s_direct = pc::s(&w);
    let via_k = pc::degree_op_inverse(InvertibleOp::K, &pc::coderiving(&w));
    let via_j = pc::coderiving(&PolyOneForm::new(
        dim,
        w.components()
            .iter()
            .map(|c| pc::degree_op_inverse(InvertibleOp::J, c))
            .collect(),
    ));
    out = out.merge(exact_eq(&s_direct, &via_k));
    out.merge(exact_eq(&s_direct, &via_j))
}

/// The averaging operator satisfies the Rota–Baxter identity of weight
/// zero, equivalently multiplicativity on the double product.
fn rota_baxter(rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    let dim = sample_dimension(rng, gen);
    let v: Vec<Rational> = gen_rational_matrix(rng, 1, dim).remove(0);
    let p = gen_poly(rng, dim, gen);
    let q = gen_poly(rng, dim, gen);

    let pv = |f: &Poly| pc::rota_baxter(f, &v).expect("vector arity matches");
    let lhs = &pv(&p) * &pv(&q);
    let rhs = &pv(&(&p * &pv(&q))) + &pv(&(&pv(&p) * &q));
    let out = exact_eq(&lhs, &rhs);

    let dp = pc::double_product(&p, &q, &v).expect("vector arity matches");
    out.merge(exact_eq(&pv(&dp), &lhs))
}

/// Compatibility of `d` and `s` with substitution along linear maps.
fn naturality(rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    let n = sample_dimension(rng, gen);
    let m = sample_dimension(rng, gen);
    // h[k][j] is the coefficient of the new variable y_k in the image of x_j.
    let h = gen_rational_matrix(rng, m, n);
    let images: Vec<Poly> = (0..n)
        .map(|j| {
            let mut img = Poly::zero(m);
            for (k, row) in h.iter().enumerate() {
                img = &img + &Poly::var(m, k).scale(&row[j]);
            }
            img
        })
        .collect();
    let push = |p: &Poly| p.substitute(&images).expect("arity matches");

    let p = gen_poly(rng, n, gen);
    let lhs = pc::d(&push(&p));
    let mut out = Outcome::pass(0.0);
    for (k, row) in h.iter().enumerate() {
        let mut rhs = Poly::zero(m);
        for (j, hkj) in row.iter().enumerate() {
            rhs = &rhs + &push(&p.partial(j).expect("index in range")).scale(hkj);
        }
        out = out.merge(exact_eq(lhs.component(k), &rhs));
    }

    let w = gen_poly_one_form(rng, n, gen);
    let transformed = PolyOneForm::new(
        m,
        h.iter()
            .map(|row| {
                let mut comp = Poly::zero(m);
                for (j, hkj) in row.iter().enumerate() {
                    comp = &comp + &push(w.component(j)).scale(hkj);
                }
                comp
            })
            .collect(),
    );
    out.merge(exact_eq(&pc::s(&transformed), &push(&pc::s(&w))))
}

/// Replays the product rule with the per-variable averaging rule that
/// ignores cross-variable degree; trials at dimension ≥ 2 must expose it.
fn negative_control(rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    let dim = sample_dimension(rng, gen).max(2);
    let w = gen_poly_one_form(rng, dim, gen);
    let v = gen_poly_one_form(rng, dim, gen);
    let sw = pc::s_naive(&w);
    let sv = pc::s_naive(&v);
    let lhs = &sw * &sv;
    let rhs = &pc::s_naive(&pc::scale_form(&sv, &w)) + &pc::s_naive(&pc::scale_form(&sw, &v));
    exact_eq(&lhs, &rhs)
}

pub(crate) fn run_trial(suite: Suite, rng: &mut ChaCha8Rng, gen: &GenConfig) -> Outcome {
    match suite {
        Suite::DAxioms => d_axioms(rng, gen),
        Suite::Chain => chain(rng, gen),
        Suite::SAxioms => s_axioms(rng, gen),
        Suite::Calculus => calculus(rng, gen),
        Suite::Interchange => interchange(rng, gen),
        Suite::Inverses => inverses(rng, gen),
        Suite::RotaBaxter => rota_baxter(rng, gen),
        Suite::Naturality => naturality(rng, gen),
        Suite::NegativeControl => negative_control(rng, gen),
        Suite::Epsilon | Suite::Derivation | Suite::LambdaCompat => {
            unreachable!("suite availability is checked before dispatch")
        }
    }
}
