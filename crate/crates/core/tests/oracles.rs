//! Oracle tests: every expected value here was derived independently of the
//! implementation — by hand expansion, by a closed-form antiderivative, or by
//! central finite differences computed inline — and then frozen.

use approx::assert_abs_diff_eq;
use smoothcalc::expr::{self, Expr};
use smoothcalc::laws::{self, GenConfig, Mode, Suite, TrialConfig};
use smoothcalc::parse::{parse_expr, parse_expr_components, parse_poly, parse_poly_components};
use smoothcalc::poly::{rat, Monomial, Poly, Rational};
use smoothcalc::poly_calculus as pc;
use smoothcalc::quad::{self, QuadConfig};
use smoothcalc::smooth_calculus as sc;
use smoothcalc::{DegreeOp, InvertibleOp};

fn q() -> QuadConfig {
    QuadConfig::default()
}

/// Independent derivative oracle: central difference with step `h`.
fn central_diff(f: impl Fn(&[f64]) -> f64, point: &[f64], i: usize, h: f64) -> f64 {
    let mut hi = point.to_vec();
    let mut lo = point.to_vec();
    hi[i] += h;
    lo[i] -= h;
    (f(&hi) - f(&lo)) / (2.0 * h)
}

fn eval_at(e: &Expr, point: &[f64]) -> f64 {
    expr::eval(e, point, &q()).unwrap()
}

// ---------------------------------------------------------------------------
// Polynomial ring arithmetic
// ---------------------------------------------------------------------------

#[test]
fn poly_product_difference_of_squares() {
    // (x1 + x2)(x1 - x2) = x1^2 - x2^2, expanded by hand.
    let p = parse_poly("x1 + x2", 2).unwrap();
    let r = parse_poly("x1 - x2", 2).unwrap();
    assert_eq!(&p * &r, parse_poly("x1^2 - x2^2", 2).unwrap());
}

#[test]
fn poly_product_with_rational_coefficients() {
    // (1/2 x1 + 1/3)(3 x1) = 3/2 x1^2 + x1, by hand.
    let p = parse_poly("1/2*x1 + 1/3", 1).unwrap();
    let r = parse_poly("3*x1", 1).unwrap();
    assert_eq!(&p * &r, parse_poly("3/2*x1^2 + x1", 1).unwrap());
}

#[test]
fn poly_square_of_sum() {
    let p = parse_poly("x1 + x2", 2).unwrap();
    assert_eq!(
        &p * &p,
        parse_poly("x1^2 + 2*x1*x2 + x2^2", 2).unwrap()
    );
}

#[test]
fn poly_eval_exact_rational_points() {
    // x1^2 x2 at (2, 3) = 12; at (1/2, 2/3) = 1/6.
    let p = parse_poly("x1^2*x2", 2).unwrap();
    assert_eq!(p.eval(&[rat(2, 1), rat(3, 1)]).unwrap(), rat(12, 1));
    assert_eq!(p.eval(&[rat(1, 2), rat(2, 3)]).unwrap(), rat(1, 6));
}

#[test]
fn poly_eval_f64_matches_rational() {
    let p = parse_poly("x1^2*x2 - 1/4*x1 + 3", 2).unwrap();
    let exact = p.eval(&[rat(1, 2), rat(-3, 4)]).unwrap();
    let approx_val = p.eval_f64(&[0.5, -0.75]).unwrap();
    assert_abs_diff_eq!(approx_val, rational_to_f64(&exact), epsilon = 1e-15);
}

fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap()
}

#[test]
fn poly_partial_derivative_by_hand() {
    // d/dx1 (x1^2 x2) = 2 x1 x2 ; d/dx2 (x1^2 x2) = x1^2.
    let p = parse_poly("x1^2*x2", 2).unwrap();
    assert_eq!(p.partial(0).unwrap(), parse_poly("2*x1*x2", 2).unwrap());
    assert_eq!(p.partial(1).unwrap(), parse_poly("x1^2", 2).unwrap());
}

#[test]
fn poly_substitute_expands_square() {
    // Y1^2 with Y1 := x1 + x2 gives x1^2 + 2 x1 x2 + x2^2.
    let outer = parse_poly("x1^2", 1).unwrap();
    let image = parse_poly("x1 + x2", 2).unwrap();
    assert_eq!(
        outer.substitute(&[image]).unwrap(),
        parse_poly("x1^2 + 2*x1*x2 + x2^2", 2).unwrap()
    );
}

#[test]
fn poly_homogeneous_components_split() {
    let p = parse_poly("x1^2 + x2", 2).unwrap();
    let comps = p.homogeneous_components();
    assert_eq!(comps.len(), 2);
    assert_eq!(comps[&2], parse_poly("x1^2", 2).unwrap());
    assert_eq!(comps[&1], parse_poly("x2", 2).unwrap());
}

#[test]
fn poly_display_graded_lex_descending() {
    // Degree first, then earlier variables dominate: x1^2 > x1*x2 > x2^2 > x1 > x2 > const.
    let p = parse_poly("3 + x2 + x1 + x2^2 + x1*x2 + x1^2", 2).unwrap();
    assert_eq!(p.to_string(), "x1^2 + x1*x2 + x2^2 + x1 + x2 + 3");
}

#[test]
fn poly_display_coefficients_and_signs() {
    let p = parse_poly("-x1^2 + 1/8*x1*x2 - 5", 2).unwrap();
    assert_eq!(p.to_string(), "-x1^2 + 1/8*x1*x2 - 5");
    assert_eq!(Poly::zero(2).to_string(), "0");
}

#[test]
fn poly_dimension_zero_is_legal() {
    let c = Poly::constant(0, rat(7, 2));
    assert_eq!(c.eval(&[]).unwrap(), rat(7, 2));
    assert_eq!((&c + &c).constant_term(), rat(7, 1));
    assert_eq!(c.degree(), 0);
}

#[test]
fn monomial_graded_lex_order() {
    let x1sq = Monomial::from_exponents(&[(0, 2)]);
    let x1x2 = Monomial::from_exponents(&[(0, 1), (1, 1)]);
    let x2sq = Monomial::from_exponents(&[(1, 2)]);
    let x1 = Monomial::from_exponents(&[(0, 1)]);
    assert!(x1sq > x1x2);
    assert!(x1x2 > x2sq);
    assert!(x2sq > x1);
    assert!(x1 > Monomial::unit());
}

// ---------------------------------------------------------------------------
// Polynomial differential / integral operators
// ---------------------------------------------------------------------------

#[test]
fn poly_d_of_monomial() {
    // d(x1^3 x2) = 3 x1^2 x2 dx1 + x1^3 dx2.
    let p = parse_poly("x1^3*x2", 2).unwrap();
    let w = pc::d(&p);
    assert_eq!(w.components()[0], parse_poly("3*x1^2*x2", 2).unwrap());
    assert_eq!(w.components()[1], parse_poly("x1^3", 2).unwrap());
}

#[test]
fn poly_d_of_constant_is_zero() {
    let w = pc::d(&parse_poly("5/3", 2).unwrap());
    assert!(w.components().iter().all(|c| c.is_zero()));
}

#[test]
fn poly_coderiving_multiplies_by_coordinates() {
    // x2 dx1 -> x1 x2 ; dx1 + dx2 -> x1 + x2.
    let w = parse_poly_one_form("x2, 0", 2);
    assert_eq!(pc::coderiving(&w), parse_poly("x1*x2", 2).unwrap());
    let u = parse_poly_one_form("1, 1", 2);
    assert_eq!(pc::coderiving(&u), parse_poly("x1 + x2", 2).unwrap());
}

fn parse_poly_one_form(text: &str, dim: usize) -> pc::PolyOneForm {
    pc::PolyOneForm::new(dim, parse_poly_components(text, dim).unwrap())
}

#[test]
fn poly_degree_operators_scale_homogeneous_parts() {
    // L(x1^2) = 2 x1^2 ; K fixes constants and scales degree n by n;
    // J scales degree n by n + 1.
    let x1sq = parse_poly("x1^2", 1).unwrap();
    assert_eq!(pc::degree_op(DegreeOp::L, &x1sq), parse_poly("2*x1^2", 1).unwrap());

    let p = parse_poly("x1^2*x2", 2).unwrap();
    assert_eq!(pc::degree_op(DegreeOp::K, &p), parse_poly("3*x1^2*x2", 2).unwrap());
    assert_eq!(pc::degree_op(DegreeOp::J, &p), parse_poly("4*x1^2*x2", 2).unwrap());

    let five = parse_poly("5", 2).unwrap();
    assert_eq!(pc::degree_op(DegreeOp::K, &five), five);

    // Mixed degrees: K(x1^2 + x2 + 7) = 2 x1^2 + x2 + 7, J adds one more copy.
    let mixed = parse_poly("x1^2 + x2 + 7", 2).unwrap();
    assert_eq!(
        pc::degree_op(DegreeOp::K, &mixed),
        parse_poly("2*x1^2 + x2 + 7", 2).unwrap()
    );
    assert_eq!(
        pc::degree_op(DegreeOp::J, &mixed),
        parse_poly("3*x1^2 + 2*x2 + 7", 2).unwrap()
    );
}

#[test]
fn poly_degree_operator_inverses_round_trip() {
    let p = parse_poly("x1^2*x2 - 1/3*x1 + 9", 2).unwrap();
    for op in [InvertibleOp::K, InvertibleOp::J] {
        let fwd = |q: &Poly| match op {
            InvertibleOp::K => pc::degree_op(DegreeOp::K, q),
            InvertibleOp::J => pc::degree_op(DegreeOp::J, q),
        };
        assert_eq!(pc::degree_op_inverse(op, &fwd(&p)), p);
        assert_eq!(fwd(&pc::degree_op_inverse(op, &p)), p);
    }
    assert_eq!(
        pc::degree_op_inverse(InvertibleOp::K, &parse_poly("3*x1^2*x2", 2).unwrap()),
        parse_poly("x1^2*x2", 2).unwrap()
    );
}

#[test]
fn poly_line_integral_on_generators() {
    // Integrating dx_i recovers x_i.
    let w = parse_poly_one_form("1, 0", 2);
    assert_eq!(pc::s(&w), parse_poly("x1", 2).unwrap());
    let u = parse_poly_one_form("0, 1", 2);
    assert_eq!(pc::s(&u), parse_poly("x2", 2).unwrap());
}

#[test]
fn poly_line_integral_exact_example() {
    // s(x1^2 x2^5 dx1 + x1^3 dx2) = 1/8 x1^3 x2^5 + 1/4 x1^3 x2:
    // each term x^a dx_i maps to x^a * x_i / (1 + total degree of x^a).
    //   x1^2 x2^5 dx1 -> x1^3 x2^5 / 8 ; x1^3 dx2 -> x1^3 x2 / 4.
    let w = parse_poly_one_form("x1^2*x2^5, x1^3", 2);
    let got = pc::s(&w);
    assert_eq!(got, parse_poly("1/8*x1^3*x2^5 + 1/4*x1^3*x2", 2).unwrap());
    assert_eq!(got.to_string(), "1/8*x1^3*x2^5 + 1/4*x1^3*x2");
}

#[test]
fn poly_line_integral_merges_overlapping_targets() {
    // s(x2 dx1 + x1 dx2) = x1 x2 (the two halves each contribute x1 x2 / 2).
    let w = parse_poly_one_form("x2, x1", 2);
    assert_eq!(pc::s(&w), parse_poly("x1*x2", 2).unwrap());
}

#[test]
fn poly_line_integral_one_dimension() {
    // s(x dx) = x^2 / 2.
    let w = parse_poly_one_form("x1", 1);
    assert_eq!(pc::s(&w), parse_poly("1/2*x1^2", 1).unwrap());
}

#[test]
fn poly_fundamental_identity_integral_of_differential() {
    // s(d p) + p(0) = p for p = x1^3 + 2 x1 x2 + 5, verified by hand:
    //   d p = (3 x1^2 + 2 x2) dx1 + 2 x1 dx2
    //   s(d p) = x1^3 + x1 x2 + x1 x2 = x1^3 + 2 x1 x2.
    let p = parse_poly("x1^3 + 2*x1*x2 + 5", 2).unwrap();
    let recovered = &pc::s(&pc::d(&p)) + &Poly::constant(2, p.constant_term());
    assert_eq!(recovered, p);
}

#[test]
fn poly_integral_routes_through_inverse_operators_agree() {
    // s = K^{-1} after coderiving = coderiving after J^{-1} on coefficients.
    let w = parse_poly_one_form("x1^2*x2^5 - x2, x1^3 + 1/2", 2);
    let direct = pc::s(&w);
    let via_k = pc::degree_op_inverse(InvertibleOp::K, &pc::coderiving(&w));
    let via_j = pc::coderiving(&pc::PolyOneForm::new(
        2,
        w.components()
            .iter()
            .map(|c| pc::degree_op_inverse(InvertibleOp::J, c))
            .collect(),
    ));
    assert_eq!(direct, via_k);
    assert_eq!(direct, via_j);
}

#[test]
fn poly_rota_baxter_operator_one_dimension() {
    // P(x^a) = x^{a+1}/(a+1); P(x)P(x) = x^4/4 = P(x P(x)) + P(P(x) x).
    let x = parse_poly("x1", 1).unwrap();
    let px = pc::rota_baxter(&x, &[rat(1, 1)]).unwrap();
    assert_eq!(px, parse_poly("1/2*x1^2", 1).unwrap());
    let lhs = &px * &px;
    assert_eq!(lhs, parse_poly("1/4*x1^4", 1).unwrap());
    let rhs = &pc::rota_baxter(&(&x * &px), &[rat(1, 1)]).unwrap()
        + &pc::rota_baxter(&(&px * &x), &[rat(1, 1)]).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn poly_rota_baxter_identity_two_dimensions() {
    // p = x1, q = x2, v = (1,1), all three sides expanded by hand:
    //   P(p) = x1^2/2 + x1 x2/2, P(q) = x1 x2/2 + x2^2/2,
    //   P(p)P(q) = x1^3 x2/4 + x1^2 x2^2/2 + x1 x2^3/4.
    let v = [rat(1, 1), rat(1, 1)];
    let p = parse_poly("x1", 2).unwrap();
    let qq = parse_poly("x2", 2).unwrap();
    let pp = pc::rota_baxter(&p, &v).unwrap();
    let pq = pc::rota_baxter(&qq, &v).unwrap();
    assert_eq!(pp, parse_poly("1/2*x1^2 + 1/2*x1*x2", 2).unwrap());
    assert_eq!(pq, parse_poly("1/2*x1*x2 + 1/2*x2^2", 2).unwrap());
    let lhs = &pp * &pq;
    assert_eq!(
        lhs,
        parse_poly("1/4*x1^3*x2 + 1/2*x1^2*x2^2 + 1/4*x1*x2^3", 2).unwrap()
    );
    let rhs = &pc::rota_baxter(&(&p * &pq), &v).unwrap()
        + &pc::rota_baxter(&(&pp * &qq), &v).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn poly_double_product_one_dimension() {
    // x * x under the double product is x * P(x) + P(x) * x = x^3.
    let x = parse_poly("x1", 1).unwrap();
    let v = [rat(1, 1)];
    let dp = pc::double_product(&x, &x, &v).unwrap();
    assert_eq!(dp, parse_poly("x1^3", 1).unwrap());
    // P is multiplicative from the double product to the ordinary product.
    let left = pc::rota_baxter(&dp, &v).unwrap();
    let px = pc::rota_baxter(&x, &v).unwrap();
    assert_eq!(left, &px * &px);
}

#[test]
fn poly_naive_integration_rule_breaks_rota_baxter() {
    // With the per-variable rule (divide by that variable's new exponent),
    // omega = x2 dx1 and nu = dx2 give
    //   naive(omega) = x1 x2, naive(nu) = x2,
    //   LHS = x1 x2^2 but RHS = x1 x2^2 + x1 x2^2 / 2.
    // The total-degree rule gives s(omega) = x1 x2 / 2, s(nu) = x2 and both
    // sides equal x1 x2^2 / 2.
    let omega = parse_poly_one_form("x2, 0", 2);
    let nu = parse_poly_one_form("0, 1", 2);

    let scale = |f: &Poly, w: &pc::PolyOneForm| pc::scale_form(f, w);

    // Correct rule satisfies the identity.
    let s_o = pc::s(&omega);
    let s_n = pc::s(&nu);
    assert_eq!(s_o, parse_poly("1/2*x1*x2", 2).unwrap());
    assert_eq!(s_n, parse_poly("x2", 2).unwrap());
    let lhs = &s_o * &s_n;
    let rhs = &pc::s(&scale(&s_n, &omega)) + &pc::s(&scale(&s_o, &nu));
    assert_eq!(lhs, rhs);

    // Naive rule violates it on the same input.
    let n_o = pc::s_naive(&omega);
    let n_n = pc::s_naive(&nu);
    assert_eq!(n_o, parse_poly("x1*x2", 2).unwrap());
    assert_eq!(n_n, parse_poly("x2", 2).unwrap());
    let nlhs = &n_o * &n_n;
    let nrhs = &pc::s_naive(&scale(&n_n, &omega)) + &pc::s_naive(&scale(&n_o, &nu));
    assert_eq!(nlhs, parse_poly("x1*x2^2", 2).unwrap());
    assert_eq!(nrhs, parse_poly("3/2*x1*x2^2", 2).unwrap());
    assert_ne!(nlhs, nrhs);
}

#[test]
fn poly_naive_rule_agrees_in_one_dimension() {
    // In one variable the per-variable and total-degree rules coincide.
    let w = parse_poly_one_form("x1^3 - 2*x1", 1);
    assert_eq!(pc::s(&w), pc::s_naive(&w));
}

#[test]
fn poly_second_derivative_tensor_is_symmetric() {
    let p = parse_poly("x1^3*x2 + x2^2*x3 - x1*x3", 3).unwrap();
    let t = pc::second_derivative(&p);
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(t.entry(i, j), t.entry(j, i));
        }
    }
    // Spot value: d^2/dx1 dx2 (x1^3 x2) = 3 x1^2.
    assert_eq!(
        t.entry(0, 1),
        &parse_poly("3*x1^2", 3).unwrap()
    );
}

#[test]
fn poly_two_slot_integral_interchange_by_hand() {
    // Tensor x1 (x e1 tensor e2 slot): both slot orders integrate to x1^2 x2 / 6.
    let zero = Poly::zero(2);
    let x1 = parse_poly("x1", 2).unwrap();
    let t = pc::PolyTwoTensor::new(
        2,
        vec![vec![zero.clone(), x1.clone()], vec![zero.clone(), zero.clone()]],
    );
    let direct = pc::s_first_slots(&t);
    let swapped = pc::s_first_slots(&t.transpose());
    let expected = parse_poly("1/6*x1^2*x2", 2).unwrap();
    assert_eq!(direct, expected);
    assert_eq!(swapped, expected);
}

#[test]
fn poly_closedness_exact() {
    assert!(pc::is_closed_exact(&parse_poly_one_form("x2, x1", 2)));
    assert!(!pc::is_closed_exact(&parse_poly_one_form("x2, -x1", 2)));
    let grad = pc::d(&parse_poly("x1^4*x2 - 3*x2^2", 2).unwrap());
    assert!(pc::is_closed_exact(&grad));
}

#[test]
fn poly_closed_form_recovers_potential() {
    // Poincare route: for closed omega = d(p), integrating gives back the
    // origin-normalized potential.
    let p = parse_poly("x1^4*x2 - 3*x2^2 + 1/2*x1", 2).unwrap();
    let omega = pc::d(&p);
    let potential = pc::s(&omega);
    assert_eq!(potential, p); // p already vanishes at the origin
    let shifted = &p + &Poly::constant(2, rat(11, 3));
    let pot2 = pc::s(&pc::d(&shifted));
    assert_eq!(pot2, p); // constant is lost, rest is recovered
    assert_eq!(pc::d(&pot2), pc::d(&shifted));
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

#[test]
fn quadrature_polynomial_exactness() {
    // Gauss-Legendre of order k integrates monomials up to degree 2k-1 exactly.
    for k in [0u32, 3, 7, 15, 31] {
        let exact = 1.0 / (k as f64 + 1.0);
        let r = quad::integrate_unit_fn(|t| t.powi(k as i32), &q()).unwrap();
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-13);
    }
}

#[test]
fn quadrature_closed_forms() {
    let r = quad::integrate_unit_fn(|t| t.exp(), &q()).unwrap();
    assert_abs_diff_eq!(r.value, std::f64::consts::E - 1.0, epsilon = 1e-12);

    let r = quad::integrate_unit_fn(|t| t.sin(), &q()).unwrap();
    assert_abs_diff_eq!(r.value, 1.0 - 1f64.cos(), epsilon = 1e-12);

    // cos(atan(t))^2 = 1/(1+t^2), whose antiderivative is atan.
    let r = quad::integrate_unit_fn(|t| t.atan().cos().powi(2), &q()).unwrap();
    assert_abs_diff_eq!(r.value, std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
}

#[test]
fn quadrature_nested_double_integral() {
    // Integral over the unit square of s*t is 1/4; of sin(s)exp(t) it is
    // (1 - cos 1)(e - 1). Nesting depth two must hold 1e-9.
    let cfg = q();
    let r = quad::integrate_unit_fn(
        |s| {
            quad::integrate_unit_fn(|t| s * t, &cfg).unwrap().value
        },
        &cfg,
    )
    .unwrap();
    assert_abs_diff_eq!(r.value, 0.25, epsilon = 1e-12);

    let r = quad::integrate_unit_fn(
        |s| {
            quad::integrate_unit_fn(|t| s.sin() * t.exp(), &cfg)
                .unwrap()
                .value
        },
        &cfg,
    )
    .unwrap();
    let truth = (1.0 - 1f64.cos()) * (std::f64::consts::E - 1.0);
    assert_abs_diff_eq!(r.value, truth, epsilon = 1e-9);
}

#[test]
fn quadrature_reports_non_convergence_with_best_estimate() {
    let cfg = QuadConfig {
        max_depth: 0,
        abs_tol: 0.0,
        rel_tol: 0.0,
        ..q()
    };
    let err = quad::integrate_unit_fn(|t| (5.0 * t).tanh(), &cfg).unwrap_err();
    let quad::QuadError::DidNotConverge { best } = err;
    // Best estimate is still close to the closed form ln(cosh(5))/5.
    let truth = 5f64.cosh().ln() / 5.0;
    assert_abs_diff_eq!(best.value, truth, epsilon = 1e-6);
}

#[test]
fn quadrature_is_deterministic() {
    let a = quad::integrate_unit_fn(|t| (3.1 * t).sin() * t.exp(), &q()).unwrap();
    let b = quad::integrate_unit_fn(|t| (3.1 * t).sin() * t.exp(), &q()).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
}

// ---------------------------------------------------------------------------
// Smooth expressions: evaluation, differentiation, substitution
// ---------------------------------------------------------------------------

#[test]
fn expr_eval_basic() {
    let e = parse_expr("sin(x1)", 1).unwrap();
    assert_abs_diff_eq!(
        eval_at(&e, &[std::f64::consts::FRAC_PI_2]),
        1.0,
        epsilon = 1e-15
    );
    let e = parse_expr("x1^2*x2 - 3", 2).unwrap();
    assert_abs_diff_eq!(eval_at(&e, &[2.0, 3.0]), 9.0, epsilon = 1e-12);
}

#[test]
fn expr_eval_integral_nodes() {
    // int[t](exp(t)) = e - 1 regardless of the outer point.
    let e = parse_expr("int[t](exp(t))", 1).unwrap();
    assert_abs_diff_eq!(
        eval_at(&e, &[0.3]),
        std::f64::consts::E - 1.0,
        epsilon = 1e-11
    );
    // int[t](t * x1) at x1 = 2 is 1.
    let e = parse_expr("int[t](t*x1)", 1).unwrap();
    assert_abs_diff_eq!(eval_at(&e, &[2.0]), 1.0, epsilon = 1e-12);
    // Nested: int[t](int[s](s*t)) = 1/4.
    let e = parse_expr("int[t](int[s](s*t))", 1).unwrap();
    assert_abs_diff_eq!(eval_at(&e, &[0.0]), 0.25, epsilon = 1e-11);
}

#[test]
fn expr_partial_matches_closed_forms() {
    let pts = [[0.3, -0.7], [0.9, 0.2], [-0.5, 0.5]];
    // d/dx1 sin(x1 x2) = x2 cos(x1 x2).
    let e = parse_expr("sin(x1*x2)", 2).unwrap();
    let de = expr::partial(&e, 0);
    for p in pts {
        assert_abs_diff_eq!(
            eval_at(&de, &p),
            p[1] * (p[0] * p[1]).cos(),
            epsilon = 1e-13
        );
    }
}

#[test]
fn expr_partial_tanh_uses_square_identity() {
    // d/dx tanh(x) = 1 - tanh(x)^2 = sech(x)^2; compare against 1/cosh^2.
    let e = parse_expr("tanh(x1)", 1).unwrap();
    let de = expr::partial(&e, 0);
    for x in [-0.9, -0.2, 0.0, 0.4, 1.0] {
        assert_abs_diff_eq!(
            eval_at(&de, &[x]),
            1.0 / (x.cosh() * x.cosh()),
            epsilon = 1e-14
        );
    }
}

#[test]
fn expr_partial_atan_closed_under_primitives() {
    // d/dx atan(x) = 1/(1+x^2), expressible as cos(atan(x))^2.
    let e = parse_expr("atan(x1)", 1).unwrap();
    let de = expr::partial(&e, 0);
    for x in [-1.0, -0.3, 0.0, 0.5, 0.9] {
        assert_abs_diff_eq!(eval_at(&de, &[x]), 1.0 / (1.0 + x * x), epsilon = 1e-14);
    }
}

#[test]
fn expr_partial_under_integral_sign() {
    // d/dx1 int[t](t * x1^2) = int[t](2 t x1) = x1.
    let e = parse_expr("int[t](t*x1^2)", 1).unwrap();
    let de = expr::partial(&e, 0);
    for x in [-0.8, 0.1, 0.7] {
        assert_abs_diff_eq!(eval_at(&de, &[x]), x, epsilon = 1e-11);
    }
}

#[test]
fn expr_partial_matches_central_differences() {
    let exprs = [
        "exp(tanh(x1) + x2^2)",
        "sin(x1*x2) * atan(x2) + x1^3",
        "cos(x1)^3 - x2*x1",
    ];
    let pts = [[0.25, -0.5], [-0.75, 0.3], [0.6, 0.6]];
    for text in exprs {
        let e = parse_expr(text, 2).unwrap();
        for i in 0..2 {
            let de = expr::partial(&e, i);
            for p in pts {
                let fd = central_diff(|v| eval_at(&e, v), &p, i, 1e-5);
                let sym = eval_at(&de, &p);
                let scale = sym.abs().max(1.0);
                assert!(
                    (sym - fd).abs() <= 1e-5 * scale,
                    "{text} d/dx{} at {p:?}: sym={sym} fd={fd}",
                    i + 1
                );
            }
        }
    }
}

#[test]
fn expr_linear_substitution() {
    // g = x1^2 precomposed with the transpose of the 2x1 matrix [1; 2]
    // becomes (y1 + 2 y2)^2.
    let g = parse_expr("x1^2", 1).unwrap();
    let h = vec![vec![1.0], vec![2.0]];
    let sub = expr::subst_linear(&g, &h).unwrap();
    for p in [[0.5f64, 0.25], [-0.3, 0.8]] {
        let expected = (p[0] + 2.0 * p[1]).powi(2);
        assert_abs_diff_eq!(eval_at(&sub, &p), expected, epsilon = 1e-13);
    }
}

#[test]
fn expr_linear_substitution_is_functorial() {
    // Substituting along h1 then h2 equals substituting along the composite.
    let g = parse_expr("sin(x1) + x1*x2", 2).unwrap();
    let h1 = vec![vec![0.5, -1.0], vec![2.0, 0.25], vec![1.0, 1.0]]; // 3x2
    let h2 = vec![vec![1.0, 0.0, -0.5], vec![0.0, 2.0, 1.0]]; // 2x3
    let step = expr::subst_linear(&expr::subst_linear(&g, &h1).unwrap(), &h2).unwrap();
    // composite = h1 * h2 as maps R^2 <- R^2 going through R^3: entry (i,j) =
    // sum_k h1[k][j] * h2[i][k] ... computed here directly.
    let mut comp = vec![vec![0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..3 {
                comp[i][j] += h2[i][k] * h1[k][j];
            }
        }
    }
    let direct = expr::subst_linear(&g, &comp).unwrap();
    for p in [[0.3, 0.4], [-0.6, 0.1]] {
        assert_abs_diff_eq!(eval_at(&step, &p), eval_at(&direct, &p), epsilon = 1e-12);
    }
}

#[test]
fn expr_vector_substitution() {
    // g = y1 * y2 with images (x1^2, sin(x1)) gives x1^2 sin(x1).
    let g = parse_expr("x1*x2", 2).unwrap();
    let images = vec![
        parse_expr("x1^2", 1).unwrap(),
        parse_expr("sin(x1)", 1).unwrap(),
    ];
    let sub = expr::subst_vector(&g, &images).unwrap();
    for x in [-0.7, 0.2, 0.9] {
        assert_abs_diff_eq!(eval_at(&sub, &[x]), x * x * x.sin(), epsilon = 1e-13);
    }
}

#[test]
fn expr_vector_substitution_renames_bound_parameters() {
    // Outer integral binds t; the image also uses an integral. After
    // substitution both integrals must stay independently bound:
    // int[t](t * y1) with y1 := int[u](u * x1) evaluates to 1/2 * x1/2 = x1/4.
    let g = parse_expr("int[t](t*x1)", 1).unwrap();
    let image = parse_expr("int[u](u*x1)", 1).unwrap();
    let sub = expr::subst_vector(&g, &[image]).unwrap();
    assert_abs_diff_eq!(eval_at(&sub, &[1.0]), 0.25, epsilon = 1e-11);
    assert_abs_diff_eq!(eval_at(&sub, &[2.0]), 0.5, epsilon = 1e-11);
}

#[test]
fn expr_scaling_substitution() {
    // Scaling the arguments by a fresh parameter and integrating it over
    // [0,1]: int[t](f(t x)) with f = x1 + x2 at (1,1) is 1.
    let f = parse_expr("x1 + x2", 2).unwrap();
    let t = expr::fresh_param(&f);
    let scaled = expr::scale_vars(&f, t).unwrap();
    let integral = Expr::integral(t, scaled);
    assert_abs_diff_eq!(eval_at(&integral, &[1.0, 1.0]), 1.0, epsilon = 1e-12);
}

#[test]
fn expr_scaling_rejects_bound_parameter_reuse() {
    let f = parse_expr("int[t](t*x1)", 1).unwrap();
    assert!(expr::scale_vars(&f, 0).is_err());
    assert!(expr::scale_vars(&f, expr::fresh_param(&f)).is_ok());
}

#[test]
fn expr_from_poly_agrees_with_exact_evaluation() {
    let p = parse_poly("1/8*x1^3*x2^5 + 1/4*x1^3*x2", 2).unwrap();
    let e = expr::from_poly(&p);
    assert_eq!(e.to_string(), "0.125*x1^3*x2^5 + 0.25*x1^3*x2");
    for pt in [[0.5, -0.5], [1.0, 1.0], [-0.25, 0.75]] {
        let exact = p.eval_f64(&pt).unwrap();
        assert_abs_diff_eq!(eval_at(&e, &pt), exact, epsilon = 1e-14);
    }
}

#[test]
fn expr_from_poly_is_multiplicative() {
    let p = parse_poly("x1 + 2*x2", 2).unwrap();
    let r = parse_poly("x1^2 - 1/3*x2", 2).unwrap();
    let lhs = expr::from_poly(&(&p * &r));
    let rhs = Expr::product(vec![expr::from_poly(&p), expr::from_poly(&r)]);
    for pt in [[0.4, -0.9], [-0.2, 0.3]] {
        assert_abs_diff_eq!(eval_at(&lhs, &pt), eval_at(&rhs, &pt), epsilon = 1e-13);
    }
}

#[test]
fn expr_simplify_normal_forms() {
    let cases = [
        ("0 + x1", "x1"),
        ("1 * x1", "x1"),
        ("0 * sin(x1)", "0"),
        ("x1^0", "1"),
        ("x1^1", "x1"),
        ("2 + 3", "5"),
        ("2 * x1 * 3", "6*x1"),
        ("-(-x1)", "x1"),
        ("(x1 + (x2 + x1))", "x1 + x2 + x1"),
    ];
    for (input, expected) in cases {
        let e = expr::simplify(&parse_expr(input, 2).unwrap());
        assert_eq!(e.to_string(), expected, "simplifying {input}");
    }
}

#[test]
fn expr_simplify_is_idempotent_on_samples() {
    for text in [
        "sin(x1*x2) + 0*x2 + exp(0)",
        "2*(x1 + 0)^3 - -x2",
        "int[t](t*(x1 + 0))",
    ] {
        let once = expr::simplify(&parse_expr(text, 2).unwrap());
        let twice = expr::simplify(&once);
        assert_eq!(once, twice, "idempotence for {text}");
    }
}

#[test]
fn expr_print_parse_round_trip_on_canonical_corpus() {
    let corpus = [
        "x1",
        "x1 + x2",
        "x1 - x2",
        "2*x1*x2^5",
        "sin(x1)",
        "cos(x1*x2) + tanh(x2)",
        "exp(x1)^2 - atan(x2)",
        "x1^2*x2 + 1/2*x1",
        "-(x1^2) + x2",
        "int[t](t*x1)",
        "int[t](int[s](s*t*x1))",
        "(x1 + x2)^3",
        "0.5*x1 + 0.25",
    ];
    for text in corpus {
        let e = parse_expr(text, 2).unwrap();
        let printed = e.to_string();
        let reparsed = parse_expr(&printed, 2).unwrap();
        assert_eq!(
            expr::simplify(&reparsed),
            expr::simplify(&e),
            "round trip through {printed:?} for {text:?}"
        );
    }
}

#[test]
fn expr_unary_minus_binds_tighter_than_power() {
    // Per the grammar, -x1^2 parses as (-x1)^2.
    let e = parse_expr("-x1^2", 1).unwrap();
    assert_abs_diff_eq!(eval_at(&e, &[2.0]), 4.0, epsilon = 1e-15);
    // The printer therefore parenthesizes negated powers.
    let neg = Expr::negate(Expr::power(Expr::var(0), 2));
    let printed = neg.to_string();
    let back = parse_expr(&printed, 1).unwrap();
    assert_abs_diff_eq!(eval_at(&back, &[2.0]), -4.0, epsilon = 1e-15);
}

#[test]
fn expr_parse_errors_carry_positions() {
    let err = parse_expr("x3", 2).unwrap_err();
    assert!(err.to_string().contains("x3"), "{err}");
    let err = parse_expr("sin(x1", 2).unwrap_err();
    assert_eq!(err.line, 1);
    let err = parse_expr("x1 +\n* x2", 2).unwrap_err();
    assert_eq!(err.line, 2);
    assert!(parse_expr("y1", 2).is_err());
    assert!(parse_expr("x1 $ x2", 2).is_err());
    assert!(parse_poly("sin(x1)", 2).is_err());
}

#[test]
fn expr_components_parse_comma_separated() {
    let comps = parse_expr_components("x2, -x1", 2).unwrap();
    assert_eq!(comps.len(), 2);
    assert_abs_diff_eq!(eval_at(&comps[1], &[3.0, 0.0]), -3.0, epsilon = 1e-15);
}

// ---------------------------------------------------------------------------
// Smooth differential / integral operators
// ---------------------------------------------------------------------------

#[test]
fn smooth_degree_operators_on_polynomials() {
    let cfg = q();
    // L(x1^2) = 2 x1^2.
    let f = parse_expr("x1^2", 1).unwrap();
    let lf = sc::degree_op(DegreeOp::L, &f, 1, &cfg).unwrap();
    for x in [-0.8, 0.3, 1.0] {
        assert_abs_diff_eq!(eval_at(&lf, &[x]), 2.0 * x * x, epsilon = 1e-13);
    }
    // K(x1^2 x2) = 3 x1^2 x2 and K fixes constants.
    let g = parse_expr("x1^2*x2", 2).unwrap();
    let kg = sc::degree_op(DegreeOp::K, &g, 2, &cfg).unwrap();
    for p in [[0.5, -0.5], [0.9, 0.1]] {
        assert_abs_diff_eq!(eval_at(&kg, &p), 3.0 * p[0] * p[0] * p[1], epsilon = 1e-13);
    }
    let c = parse_expr("5", 2).unwrap();
    let kc = sc::degree_op(DegreeOp::K, &c, 2, &cfg).unwrap();
    assert_abs_diff_eq!(eval_at(&kc, &[0.7, -0.2]), 5.0, epsilon = 1e-13);
    // J(x1^2 x2) = 4 x1^2 x2.
    let jg = sc::degree_op(DegreeOp::J, &g, 2, &cfg).unwrap();
    assert_abs_diff_eq!(eval_at(&jg, &[0.5, 1.0]), 1.0, epsilon = 1e-12);
}

#[test]
fn smooth_inverse_operators_closed_forms() {
    let cfg = q();
    // K*(2 x1^2) = x1^2: double integral of grad f(st v) . v plus f(0).
    let f = parse_expr("2*x1^2", 1).unwrap();
    let kf = sc::degree_op_inverse(InvertibleOp::K, &f, 1, &cfg).unwrap();
    for x in [-0.9, 0.4, 1.0] {
        assert_abs_diff_eq!(eval_at(&kf, &[x]), x * x, epsilon = 1e-10);
    }
    // J*(x1^2) = x1^2 / 3: average of f along the segment to the origin.
    let g = parse_expr("x1^2", 1).unwrap();
    let jg = sc::degree_op_inverse(InvertibleOp::J, &g, 1, &cfg).unwrap();
    for x in [-0.9, 0.4, 1.0] {
        assert_abs_diff_eq!(eval_at(&jg, &[x]), x * x / 3.0, epsilon = 1e-10);
    }
}

#[test]
fn smooth_inverse_round_trips_pointwise() {
    let cfg = q();
    let f = parse_expr("x1^2*x2 + sin(x2)", 2).unwrap();
    let pts = [[0.5, -0.5], [-0.3, 0.8], [0.9, 0.9]];

    let kf = sc::degree_op(DegreeOp::K, &f, 2, &cfg).unwrap();
    let back = sc::degree_op_inverse(InvertibleOp::K, &kf, 2, &cfg).unwrap();
    for p in pts {
        assert_abs_diff_eq!(eval_at(&back, &p), eval_at(&f, &p), epsilon = 1e-8);
    }

    let jf = sc::degree_op(DegreeOp::J, &f, 2, &cfg).unwrap();
    let back = sc::degree_op_inverse(InvertibleOp::J, &jf, 2, &cfg).unwrap();
    for p in pts {
        assert_abs_diff_eq!(eval_at(&back, &p), eval_at(&f, &p), epsilon = 1e-8);
    }
}

#[test]
fn smooth_line_integral_of_cosine_is_sine() {
    // s(cos(x) dx) on the line: integral of cos(t v) v dt from 0 to 1 = sin(v).
    let w = sc::SmoothOneForm::new(1, vec![parse_expr("cos(x1)", 1).unwrap()]);
    let s = sc::s(&w);
    for v in [-1.0, -0.4, 0.2, 0.9] {
        assert_abs_diff_eq!(eval_at(&s, &[v]), v.sin(), epsilon = 1e-11);
    }
}

#[test]
fn smooth_line_integral_matches_exact_polynomial_route() {
    // Same one-form through the exact route and the quadrature route.
    let comps = parse_poly_components("x1^2*x2^5, x1^3", 2).unwrap();
    let exact = pc::s(&pc::PolyOneForm::new(2, comps.clone()));
    let smooth_form = sc::SmoothOneForm::new(
        2,
        comps.iter().map(|c| expr::from_poly(c)).collect(),
    );
    let s = sc::s(&smooth_form);
    for p in [[0.5, -0.5], [1.0, 1.0], [-0.75, 0.25], [0.1, 0.9]] {
        let want = exact.eval_f64(&p).unwrap();
        assert_abs_diff_eq!(eval_at(&s, &p), want, epsilon = 1e-9);
    }
}

#[test]
fn smooth_fundamental_identity_along_segment() {
    // Integrating the differential along the segment from the origin:
    // s(d f)(v) = f(v) - f(0) for f = x1^2 x2 + 3.
    let cfg = q();
    let f = parse_expr("x1^2*x2 + 3", 2).unwrap();
    let s = sc::s(&sc::d(&f, 2));
    let f0 = sc::counit(&f, 2, &cfg).unwrap();
    assert_abs_diff_eq!(f0, 3.0, epsilon = 1e-14);
    for p in [[0.5, 0.25], [-0.8, 0.6]] {
        assert_abs_diff_eq!(
            eval_at(&s, &p) + f0,
            eval_at(&f, &p),
            epsilon = 1e-10
        );
    }
}

#[test]
fn smooth_gradient_at_origin() {
    let cfg = q();
    let f = parse_expr("sin(x1) + x1*x2", 2).unwrap();
    let eps = sc::epsilon(&f, 2, &cfg).unwrap();
    assert_abs_diff_eq!(eps[0], 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(eps[1], 0.0, epsilon = 1e-14);

    // Coordinate functions hit the standard basis exactly.
    for i in 0..2 {
        let xi = expr::simplify(&Expr::var(i));
        let v = sc::epsilon(&xi, 2, &cfg).unwrap();
        for (j, coord) in v.iter().enumerate() {
            assert_eq!(*coord, if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn smooth_gradient_at_origin_product_rule() {
    // eps(fg) = f(0) eps(g) + eps(f) g(0).
    let cfg = q();
    let f = parse_expr("exp(x1) + x2", 2).unwrap();
    let g = parse_expr("cos(x2) - 2*x1", 2).unwrap();
    let fg = Expr::product(vec![f.clone(), g.clone()]);
    let lhs = sc::epsilon(&fg, 2, &cfg).unwrap();
    let f0 = sc::counit(&f, 2, &cfg).unwrap();
    let g0 = sc::counit(&g, 2, &cfg).unwrap();
    let ef = sc::epsilon(&f, 2, &cfg).unwrap();
    let eg = sc::epsilon(&g, 2, &cfg).unwrap();
    for i in 0..2 {
        assert_abs_diff_eq!(lhs[i], f0 * eg[i] + ef[i] * g0, epsilon = 1e-12);
    }
}

#[test]
fn smooth_gradient_at_origin_chain_rule() {
    // eps(g o alpha) = sum_j dg/dy_j(alpha(0)) eps(alpha_j).
    let cfg = q();
    let g = parse_expr("x1*x2 + sin(x1)", 2).unwrap();
    let alpha = vec![
        parse_expr("exp(x1) - 1 + x2", 2).unwrap(),
        parse_expr("x2 + 1/2", 2).unwrap(),
    ];
    let comp = expr::subst_vector(&g, &alpha).unwrap();
    let lhs = sc::epsilon(&comp, 2, &cfg).unwrap();
    let a0: Vec<f64> = alpha
        .iter()
        .map(|a| sc::counit(a, 2, &cfg).unwrap())
        .collect();
    let mut rhs = vec![0.0; 2];
    for (j, aj) in alpha.iter().enumerate() {
        let dg = expr::partial(&g, j);
        let coeff = expr::eval(&dg, &a0, &cfg).unwrap();
        let ea = sc::epsilon(aj, 2, &cfg).unwrap();
        for i in 0..2 {
            rhs[i] += coeff * ea[i];
        }
    }
    for i in 0..2 {
        assert_abs_diff_eq!(lhs[i], rhs[i], epsilon = 1e-11);
    }
}

#[test]
fn smooth_rota_baxter_antiderivative_from_origin() {
    // P along v=1 on the line sends cos to sin.
    let p = sc::rota_baxter(&parse_expr("cos(x1)", 1).unwrap(), &[1.0]);
    for x in [0.1, 0.7, 1.0, -0.6] {
        assert_abs_diff_eq!(eval_at(&p, &[x]), x.sin(), epsilon = 1e-11);
    }
}

#[test]
fn smooth_rota_baxter_identity_pointwise() {
    let f = parse_expr("exp(x1)", 1).unwrap();
    let g = parse_expr("x1^2", 1).unwrap();
    let v = [1.0];
    let pf = sc::rota_baxter(&f, &v);
    let pg = sc::rota_baxter(&g, &v);
    let lhs = Expr::product(vec![pf.clone(), pg.clone()]);
    let rhs = Expr::sum(vec![
        sc::rota_baxter(&Expr::product(vec![f.clone(), pg]), &v),
        sc::rota_baxter(&Expr::product(vec![pf, g.clone()]), &v),
    ]);
    for x in [0.3, 0.8, -0.5] {
        assert_abs_diff_eq!(eval_at(&lhs, &[x]), eval_at(&rhs, &[x]), epsilon = 1e-9);
    }
    // Closed form check of the double product: exp * x^2 with P(exp)(x)=e^x-1,
    // P(x^2)=x^3/3: dbl = exp(x) x^3/3 + (e^x - 1) x^2.
    let dbl = sc::double_product(&f, &g, &v);
    for x in [0.4f64, -0.9] {
        let truth = x.exp() * x.powi(3) / 3.0 + (x.exp() - 1.0) * x * x;
        assert_abs_diff_eq!(eval_at(&dbl, &[x]), truth, epsilon = 1e-10);
    }
}

#[test]
fn smooth_square_zero_extension_forward_derivative() {
    let cfg = q();
    // g = y1^2 pushed through (x1, [1]) gives (x1^2, [2 x1]).
    let g = parse_expr("x1^2", 1).unwrap();
    let dual = sc::DualElement {
        base: parse_expr("x1", 1).unwrap(),
        tangent: vec![parse_expr("1", 1).unwrap()],
    };
    let out = sc::square_zero_apply(&g, &[dual]).unwrap();
    for x in [0.3, -0.8] {
        assert_abs_diff_eq!(expr::eval(&out.base, &[x], &cfg).unwrap(), x * x, epsilon = 1e-13);
        assert_abs_diff_eq!(
            expr::eval(&out.tangent[0], &[x], &cfg).unwrap(),
            2.0 * x,
            epsilon = 1e-13
        );
    }

    // Two inputs: g = y1 y2 on (x1,[1,0]), (x2,[0,1]) gives tangent (x2, x1).
    let g = parse_expr("x1*x2", 2).unwrap();
    let duals = [
        sc::DualElement {
            base: parse_expr("x1", 2).unwrap(),
            tangent: vec![parse_expr("1", 2).unwrap(), parse_expr("0", 2).unwrap()],
        },
        sc::DualElement {
            base: parse_expr("x2", 2).unwrap(),
            tangent: vec![parse_expr("0", 2).unwrap(), parse_expr("1", 2).unwrap()],
        },
    ];
    let out = sc::square_zero_apply(&g, &duals).unwrap();
    for p in [[0.4, -0.7], [0.9, 0.2]] {
        assert_abs_diff_eq!(
            expr::eval(&out.tangent[0], &p, &cfg).unwrap(),
            p[1],
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            expr::eval(&out.tangent[1], &p, &cfg).unwrap(),
            p[0],
            epsilon = 1e-13
        );
    }
}

#[test]
fn smooth_square_zero_chain_rule_against_symbolic() {
    // Forward-mode through alpha matches the symbolic derivative of the
    // composite.
    let cfg = q();
    let g = parse_expr("sin(x1*x2)", 2).unwrap();
    let alpha = vec![
        parse_expr("x1^2 + x2", 2).unwrap(),
        parse_expr("cos(x1)", 2).unwrap(),
    ];
    // Differentiate along x1: tangents are the partials of alpha.
    let duals: Vec<sc::DualElement> = alpha
        .iter()
        .map(|a| sc::DualElement {
            base: a.clone(),
            tangent: vec![expr::partial(a, 0)],
        })
        .collect();
    let out = sc::square_zero_apply(&g, &duals).unwrap();
    let composite = expr::subst_vector(&g, &alpha).unwrap();
    let sym = expr::partial(&composite, 0);
    for p in [[0.3, 0.5], [-0.6, 0.8]] {
        assert_abs_diff_eq!(
            expr::eval(&out.tangent[0], &p, &cfg).unwrap(),
            expr::eval(&sym, &p, &cfg).unwrap(),
            epsilon = 1e-12
        );
    }
}

#[test]
fn smooth_closedness_probe() {
    let cfg = q();
    let pts = 25;
    // x2 dx1 + x1 dx2 is the differential of x1 x2: closed.
    let w = sc::SmoothOneForm::new(2, parse_expr_components("x2, x1", 2).unwrap());
    let r = sc::is_closed(&w, pts, 1e-9, &cfg, 42).unwrap();
    assert!(r.closed);
    assert!(r.worst_asymmetry <= 1e-12);

    // x2 dx1 - x1 dx2 has constant asymmetry 2.
    let w = sc::SmoothOneForm::new(2, parse_expr_components("x2, -x1", 2).unwrap());
    let r = sc::is_closed(&w, pts, 1e-9, &cfg, 42).unwrap();
    assert!(!r.closed);
    assert_abs_diff_eq!(r.worst_asymmetry, 2.0, epsilon = 1e-12);

    // Gradient of a transcendental function is closed.
    let f = parse_expr("exp(x1)*sin(x2)", 2).unwrap();
    let r = sc::is_closed(&sc::d(&f, 2), pts, 1e-9, &cfg, 7).unwrap();
    assert!(r.closed);
}

#[test]
fn smooth_poincare_round_trip_on_gradients() {
    let f = parse_expr("exp(x1)*sin(x2) - x1", 2).unwrap();
    let omega = sc::d(&f, 2);
    let potential = sc::s(&omega);
    let back = sc::d(&potential, 2);
    for p in [[0.5, -0.5], [-0.25, 0.75]] {
        for i in 0..2 {
            assert_abs_diff_eq!(
                eval_at(&back.components()[i], &p),
                eval_at(&omega.components()[i], &p),
                epsilon = 1e-8
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Law suites
// ---------------------------------------------------------------------------

fn quick_trials(seed: u64, trials: u32) -> TrialConfig {
    TrialConfig {
        seed,
        trials,
        points: 5,
        tol: None,
        quad: QuadConfig::default(),
    }
}

#[test]
fn laws_poly_suites_pass_exactly() {
    let gen = GenConfig::default();
    for suite in [
        Suite::DAxioms,
        Suite::Chain,
        Suite::Interchange,
        Suite::SAxioms,
        Suite::Calculus,
        Suite::Inverses,
        Suite::RotaBaxter,
        Suite::Naturality,
    ] {
        let r = laws::run_suite(suite, Mode::Poly, &quick_trials(11, 40), &gen).unwrap();
        assert!(r.passed(), "suite {} failed: {r:?}", r.law);
        assert_eq!(r.failures, 0);
        assert_eq!(r.worst_error, 0.0, "exact mode must report zero error");
    }
}

#[test]
fn laws_negative_control_catches_wrong_rule() {
    let gen = GenConfig::default();
    let r = laws::run_suite(
        Suite::NegativeControl,
        Mode::Poly,
        &quick_trials(5, 60),
        &gen,
    )
    .unwrap();
    assert!(r.failures > 0, "naive rule must break the identity: {r:?}");
    assert!(r.passed(), "control suite passes when the naive rule fails");
}

#[test]
fn laws_reports_are_deterministic() {
    let gen = GenConfig::default();
    let tc = quick_trials(99, 12);
    let a = laws::run_suite(Suite::DAxioms, Mode::Smooth, &tc, &gen).unwrap();
    let b = laws::run_suite(Suite::DAxioms, Mode::Smooth, &tc, &gen).unwrap();
    assert_eq!(laws::reports_json(&[a]), laws::reports_json(&[b]));
}

#[test]
fn laws_suite_availability() {
    let gen = GenConfig::default();
    let tc = quick_trials(1, 2);
    assert!(laws::run_suite(Suite::Epsilon, Mode::Poly, &tc, &gen).is_err());
    assert!(laws::run_suite(Suite::Derivation, Mode::Poly, &tc, &gen).is_err());
    assert!(laws::run_suite(Suite::LambdaCompat, Mode::Poly, &tc, &gen).is_err());
    assert!(laws::run_suite(Suite::Epsilon, Mode::Smooth, &tc, &gen).is_ok());
}

#[test]
fn laws_json_report_schema() {
    let gen = GenConfig::default();
    let r = laws::run_suite(Suite::Calculus, Mode::Poly, &quick_trials(3, 5), &gen).unwrap();
    let json = laws::reports_json(&[r]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let entry = &v.as_array().unwrap()[0];
    for key in [
        "law",
        "mode",
        "seed",
        "trials",
        "failures",
        "inconclusive",
        "worst_error",
        "elapsed_ms",
    ] {
        assert!(entry.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(entry["mode"], "poly-exact");
    assert_eq!(entry["elapsed_ms"], 0);
}

#[test]
fn laws_generators_are_in_bounds() {
    use rand::SeedableRng;
    let gen = GenConfig::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let dim = laws::sample_dimension(&mut rng, &gen);
        assert!((gen.dim_min..=gen.dim_max).contains(&dim));
        let p = laws::gen_poly(&mut rng, dim, &gen);
        assert!(p.degree() <= gen.max_degree);
        assert!(p.num_terms() <= gen.max_terms);
        let e = laws::gen_expr(&mut rng, dim, &gen);
        smoothcalc::expr::validate(&e, dim).unwrap();
        let pts = laws::sample_points(&mut rng, dim, 4);
        assert!(pts.iter().flatten().all(|c| (-1.0..=1.0).contains(c)));
    }
}
