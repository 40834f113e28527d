//! Random input generators shared by the law suites.
//!
//! All generators draw from a caller-supplied RNG so that suites remain
//! deterministic under seeding, and respect the shape bounds in
//! [`GenConfig`].

use rand::Rng;

use super::GenConfig;
use crate::expr::{Expr, Prim};
use crate::poly::{rat, Monomial, Poly, Rational};
use crate::poly_calculus::PolyOneForm;
use crate::smooth_calculus::SmoothOneForm;

/// Samples an ambient dimension in `[dim_min, dim_max]` (at least 1).
pub fn sample_dimension<R: Rng>(rng: &mut R, gen: &GenConfig) -> usize {
    let lo = gen.dim_min.max(1);
    let hi = gen.dim_max.max(lo);
    rng.gen_range(lo..=hi)
}

/// A nonzero rational with small numerator and denominator.
fn gen_coefficient<R: Rng>(rng: &mut R, gen: &GenConfig) -> Rational {
    let bound = gen.coeff_bound.max(1);
    let mut num = rng.gen_range(-bound..=bound);
    if num == 0 {
        num = 1;
    }
    let den = rng.gen_range(1..=3);
    rat(num, den)
}

/// A random polynomial in `dim` variables within the configured degree and
/// term bounds.
pub fn gen_poly<R: Rng>(rng: &mut R, dim: usize, gen: &GenConfig) -> Poly {
    let terms = rng.gen_range(1..=gen.max_terms.max(1));
    let mut p = Poly::zero(dim);
    for _ in 0..terms {
        let mut exponents = vec![0u32; dim];
        if dim > 0 {
            let total = rng.gen_range(0..=gen.max_degree);
            for _ in 0..total {
                exponents[rng.gen_range(0..dim)] += 1;
            }
        }
        let pairs: Vec<(usize, u32)> = exponents
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
            .collect();
        p.add_term(Monomial::from_exponents(&pairs), gen_coefficient(rng, gen));
    }
    p
}

/// A one-form whose components are random polynomials.
pub fn gen_poly_one_form<R: Rng>(rng: &mut R, dim: usize, gen: &GenConfig) -> PolyOneForm {
    PolyOneForm::new(dim, (0..dim).map(|_| gen_poly(rng, dim, gen)).collect())
}

/// A random expression over variables `x_1 … x_dim` within the configured
/// depth bound.
///
/// Generated expressions never contain integral nodes (those are introduced
/// only by the integral operators) and never nest `exp` inside `exp`, which
/// keeps values on `[-1, 1]^n` representable.
pub fn gen_expr<R: Rng>(rng: &mut R, dim: usize, gen: &GenConfig) -> Expr {
    gen_expr_at(rng, dim, gen.max_depth, true)
}

/// A one-form whose components are random expressions.
pub fn gen_smooth_one_form<R: Rng>(rng: &mut R, dim: usize, gen: &GenConfig) -> SmoothOneForm {
    SmoothOneForm::new(dim, (0..dim).map(|_| gen_expr(rng, dim, gen)).collect())
}

fn gen_leaf<R: Rng>(rng: &mut R, dim: usize) -> Expr {
    if dim > 0 && rng.gen_bool(0.7) {
        Expr::var(rng.gen_range(0..dim))
    } else {
        // Quarter-integer constants print compactly and round-trip exactly.
        Expr::constant(f64::from(rng.gen_range(-8i32..=8)) / 4.0)
    }
}

fn gen_expr_at<R: Rng>(rng: &mut R, dim: usize, depth: usize, exp_ok: bool) -> Expr {
    if depth == 0 {
        return gen_leaf(rng, dim);
    }
    match rng.gen_range(0u32..10) {
        0 | 1 => gen_leaf(rng, dim),
        2 | 3 => {
            let n = rng.gen_range(2..=3);
            Expr::sum(
                (0..n)
                    .map(|_| gen_expr_at(rng, dim, depth - 1, exp_ok))
                    .collect(),
            )
        }
        4 | 5 => Expr::product(vec![
            gen_expr_at(rng, dim, depth - 1, exp_ok),
            gen_expr_at(rng, dim, depth - 1, exp_ok),
        ]),
        6 => Expr::power(gen_expr_at(rng, dim, depth - 1, exp_ok), rng.gen_range(2..=3)),
        7 => Expr::negate(gen_expr_at(rng, dim, depth - 1, exp_ok)),
        8 => {
            let p = match rng.gen_range(0u32..4) {
                0 => Prim::Sin,
                1 => Prim::Cos,
                2 => Prim::Tanh,
                _ => Prim::Atan,
            };
            Expr::prim(p, gen_expr_at(rng, dim, depth - 1, exp_ok))
        }
        _ => {
            if exp_ok {
                Expr::prim(Prim::Exp, gen_expr_at(rng, dim, depth - 1, false))
            } else {
                Expr::prim(Prim::Tanh, gen_expr_at(rng, dim, depth - 1, false))
            }
        }
    }
}

/// `count` uniform sample points in `[-1, 1]^dim`.
pub fn sample_points<R: Rng>(rng: &mut R, dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect()
}

/// A `rows × cols` matrix with uniform entries in `[-1, 1]`.
pub fn gen_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect()
}

/// A `rows × cols` matrix with small rational entries.
pub fn gen_rational_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<Rational>> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| rat(rng.gen_range(-2..=2), rng.gen_range(1..=2)))
                .collect()
        })
        .collect()
}
