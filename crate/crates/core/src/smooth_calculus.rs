//! Differential and integral operators on smooth expressions.
//!
//! These mirror the exact polynomial operators, with line integrals realized
//! as unit-interval integral nodes (evaluated by quadrature only when a number
//! is requested): the differential `d`, coderiving map, degree operators L/K/J
//! with the integral formulas for the inverses of K and J, the integral
//! transformation `s` along the segment from the origin, evaluation and
//! gradient at the origin, Rota–Baxter operators with their double product,
//! and the forward-mode square-zero extension.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{self, EvalError, Expr, ExprError};
use crate::quad::QuadConfig;
use crate::{DegreeOp, InvertibleOp};

/// A smooth 1-form: one expression per coordinate direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothOneForm {
    dimension: usize,
    components: Vec<Expr>,
}

impl SmoothOneForm {
    /// Panics unless exactly `dimension` components are given.
    pub fn new(dimension: usize, components: Vec<Expr>) -> Self {
        assert_eq!(components.len(), dimension, "1-form needs one component per coordinate");
        SmoothOneForm { dimension, components }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.components[i]
    }
}

/// An expression-valued two-tensor: `entry(j, i)` is the coefficient of
/// `e_j ⊗ e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothTwoTensor {
    dimension: usize,
    entries: Vec<Vec<Expr>>,
}

impl SmoothTwoTensor {
    /// Panics unless `entries` is an n×n matrix.
    pub fn new(dimension: usize, entries: Vec<Vec<Expr>>) -> Self {
        assert_eq!(entries.len(), dimension, "two-tensor needs n rows");
        for row in &entries {
            assert_eq!(row.len(), dimension, "two-tensor needs n columns");
        }
        SmoothTwoTensor { dimension, entries }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entry(&self, j: usize, i: usize) -> &Expr {
        &self.entries[j][i]
    }

    /// Swaps the two vector slots.
    pub fn transpose(&self) -> Self {
        let n = self.dimension;
        let entries = (0..n)
            .map(|j| (0..n).map(|i| self.entries[i][j].clone()).collect())
            .collect();
        SmoothTwoTensor { dimension: n, entries }
    }
}

/// An element of the square-zero extension: a base function together with a
/// tangent vector of module entries over the same space.
#[derive(Debug, Clone, PartialEq)]
pub struct DualElement {
    pub base: Expr,
    pub tangent: Vec<Expr>,
}

/// Verdict of the numerical closedness probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedCheck {
    pub closed: bool,
    pub worst_asymmetry: f64,
}

/// The differential: `d(f) = Σ ∂f/∂x_i ⊗ e_i`.
pub fn d(f: &Expr, dimension: usize) -> SmoothOneForm {
    SmoothOneForm::new(dimension, (0..dimension).map(|i| expr::partial(f, i)).collect())
}

/// The coderiving map: `Σ ω_i · x_i`.
pub fn coderiving(w: &SmoothOneForm) -> Expr {
    Expr::Sum(
        w.components()
            .iter()
            .enumerate()
            .map(|(i, c)| Expr::product(vec![c.clone(), Expr::Var(i)]))
            .collect(),
    )
}

/// Degree operators: `L(f) = Σ ∂_i f · x_i`, `K(f) = L(f) + f(0)`,
/// `J(f) = L(f) + f`. Only K needs to evaluate (at the origin), which is
/// where quadrature — and hence failure — can enter.
pub fn degree_op(
    op: DegreeOp,
    f: &Expr,
    dimension: usize,
    cfg: &QuadConfig,
) -> Result<Expr, EvalError> {
    let l = coderiving(&d(f, dimension));
    Ok(match op {
        DegreeOp::L => l,
        DegreeOp::K => {
            let f0 = counit(f, dimension, cfg)?;
            Expr::sum(vec![l, Expr::Const(f0)])
        }
        DegreeOp::J => Expr::sum(vec![l, f.clone()]),
    })
}

/// Integral formulas for the inverses:
/// `K*(f)(v) = ∫₀¹∫₀¹ ∇f(s·t·v)·v ds dt + f(0)` and
/// `J*(f)(v) = ∫₀¹ f(t·v) dt`, built as integral nodes with fresh parameters.
pub fn degree_op_inverse(
    op: InvertibleOp,
    f: &Expr,
    dimension: usize,
    cfg: &QuadConfig,
) -> Result<Expr, EvalError> {
    match op {
        InvertibleOp::J => {
            let t = expr::fresh_param(f);
            let scaled = expr::scale_vars(f, t).expect("fresh parameter");
            Ok(Expr::integral(t, scaled))
        }
        InvertibleOp::K => {
            let t = expr::fresh_param(f);
            let s_param = t + 1;
            let terms = (0..dimension)
                .map(|i| {
                    let grad_i = expr::partial(f, i);
                    let once = expr::scale_vars(&grad_i, t).expect("fresh parameter");
                    let twice = expr::scale_vars(&once, s_param).expect("fresh parameter");
                    Expr::product(vec![twice, Expr::Var(i)])
                })
                .collect();
            let f0 = counit(f, dimension, cfg)?;
            Ok(Expr::sum(vec![
                Expr::integral(s_param, Expr::integral(t, Expr::Sum(terms))),
                Expr::Const(f0),
            ]))
        }
    }
}

/// The integral transformation: `s(ω)(v) = ∫₀¹ Σ ω_i(t·v) · v_i dt`, built as
/// a lazy integral node.
pub fn s(w: &SmoothOneForm) -> Expr {
    let t = w
        .components()
        .iter()
        .map(expr::fresh_param)
        .max()
        .unwrap_or(0);
    let body = Expr::Sum(
        w.components()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let scaled = expr::scale_vars(c, t).expect("fresh parameter");
                Expr::product(vec![scaled, Expr::Var(i)])
            })
            .collect(),
    );
    Expr::integral(t, body)
}

/// Applies `s` to the polynomial-and-first-vector slots, then to the
/// remaining slot; transposing the tensor first gives the same function.
pub fn s_first_slots(t: &SmoothTwoTensor) -> Expr {
    let n = t.dimension();
    let outer: Vec<Expr> = (0..n)
        .map(|i| {
            let column = SmoothOneForm::new(
                n,
                (0..n).map(|j| t.entry(j, i).clone()).collect(),
            );
            s(&column)
        })
        .collect();
    s(&SmoothOneForm::new(n, outer))
}

/// The counit: evaluation at the origin.
pub fn counit(f: &Expr, dimension: usize, cfg: &QuadConfig) -> Result<f64, EvalError> {
    expr::eval(f, &vec![0.0; dimension], cfg)
}

/// The quasi-codereliction: the gradient evaluated at the origin.
pub fn epsilon(f: &Expr, dimension: usize, cfg: &QuadConfig) -> Result<Vec<f64>, EvalError> {
    let origin = vec![0.0; dimension];
    (0..dimension)
        .map(|i| expr::eval(&expr::partial(f, i), &origin, cfg))
        .collect()
}

/// The Rota–Baxter operator attached to `v`: `P_v(f) = s(Σ v_i · f ⊗ e_i)`,
/// which on the line with `v = 1` is the antiderivative vanishing at 0.
pub fn rota_baxter(f: &Expr, v: &[f64]) -> Expr {
    let n = v.len();
    let components = v
        .iter()
        .map(|&vi| Expr::product(vec![Expr::Const(vi), f.clone()]))
        .collect();
    s(&SmoothOneForm::new(n, components))
}

/// The double product induced by `P_v`: `f ∗ g = f·P_v(g) + P_v(f)·g`.
pub fn double_product(f: &Expr, g: &Expr, v: &[f64]) -> Expr {
    Expr::sum(vec![
        Expr::product(vec![f.clone(), rota_baxter(g, v)]),
        Expr::product(vec![rota_baxter(f, v), g.clone()]),
    ])
}

/// Pushes a function through the square-zero extension: with inputs
/// `(a_j, m_j)` the base is `g(a⃗)` and each tangent slot is
/// `Σ_j (∂g/∂y_j)(a⃗) · m_j` — forward-mode differentiation.
pub fn square_zero_apply(g: &Expr, duals: &[DualElement]) -> Result<DualElement, ExprError> {
    let tangent_len = duals.first().map(|d| d.tangent.len()).unwrap_or(0);
    for dual in duals {
        if dual.tangent.len() != tangent_len {
            return Err(ExprError::ArityMismatch {
                expected: tangent_len,
                got: dual.tangent.len(),
            });
        }
    }
    let bases: Vec<Expr> = duals.iter().map(|d| d.base.clone()).collect();
    let base = expr::subst_vector(g, &bases)?;
    let mut tangent = Vec::with_capacity(tangent_len);
    for slot in 0..tangent_len {
        let mut terms = Vec::with_capacity(duals.len());
        for (j, dual) in duals.iter().enumerate() {
            let coeff = expr::subst_vector(&expr::partial(g, j), &bases)?;
            terms.push(Expr::product(vec![coeff, dual.tangent[slot].clone()]));
        }
        tangent.push(Expr::Sum(terms));
    }
    Ok(DualElement { base, tangent })
}

/// Numerical closedness probe: samples `points` points uniformly in
/// [-1, 1]^n (deterministically from `seed`) and reports the worst
/// cross-partial asymmetry `|∂_j ω_i − ∂_i ω_j|` over all pairs and points.
pub fn is_closed(
    w: &SmoothOneForm,
    points: usize,
    tol: f64,
    cfg: &QuadConfig,
    seed: u64,
) -> Result<ClosedCheck, EvalError> {
    let n = w.dimension();
    let mut asymmetries = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            asymmetries.push(Expr::sum(vec![
                expr::partial(w.component(i), j),
                Expr::negate(expr::partial(w.component(j), i)),
            ]));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let point: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        for a in &asymmetries {
            worst = worst.max(expr::eval(a, &point, cfg)?.abs());
        }
    }
    Ok(ClosedCheck { closed: worst <= tol, worst_asymmetry: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn projection_through_square_zero_is_identity() {
        let g = Expr::var(0);
        let dual = DualElement {
            base: parse_expr("sin(x1)", 1).unwrap(),
            tangent: vec![parse_expr("cos(x1)", 1).unwrap()],
        };
        let out = square_zero_apply(&g, &[dual.clone()]).unwrap();
        assert_eq!(out.base, dual.base);
        for x in [0.2, -0.7] {
            let got = expr::eval(&out.tangent[0], &[x], &cfg()).unwrap();
            let want = expr::eval(&dual.tangent[0], &[x], &cfg()).unwrap();
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn square_zero_rejects_ragged_tangents() {
        let g = parse_expr("x1*x2", 2).unwrap();
        let duals = [
            DualElement { base: Expr::var(0), tangent: vec![Expr::Const(1.0)] },
            DualElement { base: Expr::var(1), tangent: vec![] },
        ];
        assert!(matches!(
            square_zero_apply(&g, &duals),
            Err(ExprError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn one_dimensional_forms_are_always_closed() {
        let w = SmoothOneForm::new(1, vec![parse_expr("exp(x1)", 1).unwrap()]);
        let r = is_closed(&w, 10, 1e-9, &cfg(), 1).unwrap();
        assert!(r.closed);
        assert_eq!(r.worst_asymmetry, 0.0);
    }

    #[test]
    fn rota_baxter_of_zero_is_zero() {
        let p = rota_baxter(&Expr::Const(0.0), &[1.0, 2.0]);
        let v = expr::eval(&p, &[0.4, -0.3], &cfg()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn degree_op_l_matches_coderiving_of_differential() {
        let f = parse_expr("x1^2*x2", 2).unwrap();
        let l = degree_op(DegreeOp::L, &f, 2, &cfg()).unwrap();
        let alt = coderiving(&d(&f, 2));
        for p in [[0.3, 0.8], [-0.5, 0.2]] {
            let a = expr::eval(&l, &p, &cfg()).unwrap();
            let b = expr::eval(&alt, &p, &cfg()).unwrap();
            assert_eq!(a, b);
        }
    }
}
