//! Differential and integral operators on the polynomial algebra.
//!
//! Everything here is exact rational arithmetic. The central maps are the
//! differential `d` (gradient as a 1-form), the coderiving map `d°` (pair a
//! 1-form with the coordinate vector), the degree-scaling operators L/K/J and
//! their inverses, and the integral transformation `s`, which sends
//! `x^a ⊗ e_i` to `x^a · x_i / (1 + |a|)` where `|a|` is the *total* degree of
//! the source monomial. The per-variable variant [`s_naive`] (divide by the new
//! exponent of the target variable instead) is kept as a deliberate foil: it
//! agrees in one dimension but breaks the Rota–Baxter identity in two or more,
//! and the law suites use it as a negative control.

use crate::poly::{Poly, PolyError, Rational};
use crate::{DegreeOp, InvertibleOp};
use num_traits::One;

/// A polynomial 1-form: one polynomial coefficient per coordinate direction,
/// component `i` standing for the `dx_{i+1}` part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyOneForm {
    dimension: usize,
    components: Vec<Poly>,
}

impl PolyOneForm {
    /// Panics unless exactly `dimension` components are given, each living in
    /// that same dimension.
    pub fn new(dimension: usize, components: Vec<Poly>) -> Self {
        assert_eq!(components.len(), dimension, "1-form needs one component per coordinate");
        for c in &components {
            assert_eq!(c.dimension(), dimension, "component dimension mismatch");
        }
        PolyOneForm { dimension, components }
    }

    pub fn zero(dimension: usize) -> Self {
        PolyOneForm::new(dimension, vec![Poly::zero(dimension); dimension])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }
}

/// An element of (polynomials) ⊗ ℝⁿ ⊗ ℝⁿ: `entry(j, i)` is the polynomial
/// coefficient of `e_j ⊗ e_i` (first slot `j`, second slot `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTwoTensor {
    dimension: usize,
    entries: Vec<Vec<Poly>>,
}

impl PolyTwoTensor {
    /// Panics unless `entries` is an n×n matrix of polynomials in dimension n.
    pub fn new(dimension: usize, entries: Vec<Vec<Poly>>) -> Self {
        assert_eq!(entries.len(), dimension, "two-tensor needs n rows");
        for row in &entries {
            assert_eq!(row.len(), dimension, "two-tensor needs n columns");
            for p in row {
                assert_eq!(p.dimension(), dimension, "entry dimension mismatch");
            }
        }
        PolyTwoTensor { dimension, entries }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entry(&self, j: usize, i: usize) -> &Poly {
        &self.entries[j][i]
    }

    /// Swaps the two vector slots.
    pub fn transpose(&self) -> Self {
        let n = self.dimension;
        let entries = (0..n)
            .map(|j| (0..n).map(|i| self.entries[i][j].clone()).collect())
            .collect();
        PolyTwoTensor { dimension: n, entries }
    }
}

/// The differential: `d(p) = Σ ∂p/∂x_i ⊗ e_i`.
pub fn d(p: &Poly) -> PolyOneForm {
    let n = p.dimension();
    PolyOneForm::new(n, (0..n).map(|i| p.partial(i).expect("index in range")).collect())
}

/// The coderiving map `d°`: pairs a 1-form with the coordinate vector,
/// `Σ ω_i · x_i`.
pub fn coderiving(w: &PolyOneForm) -> Poly {
    let n = w.dimension();
    let mut acc = Poly::zero(n);
    for (i, c) in w.components().iter().enumerate() {
        acc = &acc + &(c * &Poly::var(n, i));
    }
    acc
}

/// Degree-scaling operators: on a homogeneous part of degree `n`, L multiplies
/// by `n` (killing constants), K by `n` except it fixes constants, and J by
/// `n + 1`.
pub fn degree_op(op: DegreeOp, p: &Poly) -> Poly {
    let factor = |deg: usize| -> Rational {
        let d = Rational::from_integer(deg.into());
        match op {
            DegreeOp::L => d,
            DegreeOp::K => {
                if deg == 0 {
                    Rational::one()
                } else {
                    d
                }
            }
            DegreeOp::J => d + Rational::one(),
        }
    };
    p.scale_by_degree(factor)
}

/// Exact inverses of K and J (L is not invertible: it kills constants).
pub fn degree_op_inverse(op: InvertibleOp, p: &Poly) -> Poly {
    let factor = |deg: usize| -> Rational {
        let d = Rational::from_integer(deg.into());
        match op {
            InvertibleOp::K => {
                if deg == 0 {
                    Rational::one()
                } else {
                    d.recip()
                }
            }
            InvertibleOp::J => (d + Rational::one()).recip(),
        }
    };
    p.scale_by_degree(factor)
}

/// The integral transformation: `x^a ⊗ e_i ↦ x^a · x_i / (1 + |a|)` with `|a|`
/// the total degree, extended linearly over all components.
pub fn s(w: &PolyOneForm) -> Poly {
    let n = w.dimension();
    let mut out = Poly::zero(n);
    for (i, comp) in w.components().iter().enumerate() {
        for (m, c) in comp.terms() {
            let divisor = Rational::from_integer((1 + m.total_degree()).into());
            out.add_term(m.mul_var(i), c / divisor);
        }
    }
    out
}

/// The per-variable foil: `x^a ⊗ e_i ↦ x^a · x_i / (a_i + 1)`, dividing by the
/// *new exponent of the target variable* only. Coincides with [`s`] in one
/// dimension; fails the Rota–Baxter identity in dimension ≥ 2.
pub fn s_naive(w: &PolyOneForm) -> Poly {
    let n = w.dimension();
    let mut out = Poly::zero(n);
    for (i, comp) in w.components().iter().enumerate() {
        for (m, c) in comp.terms() {
            let divisor = Rational::from_integer((m.exponent(i) + 1).into());
            out.add_term(m.mul_var(i), c / divisor);
        }
    }
    out
}

/// Module action: multiplies every component of a 1-form by a polynomial.
pub fn scale_form(f: &Poly, w: &PolyOneForm) -> PolyOneForm {
    PolyOneForm::new(
        w.dimension(),
        w.components().iter().map(|c| f * c).collect(),
    )
}

/// The Rota–Baxter operator attached to a vector `v`: integrate along the
/// segment to the origin, then pair with `⟨v, x⟩` — concretely
/// `P_v(p) = s(Σ_i v_i · p ⊗ e_i)`.
pub fn rota_baxter(p: &Poly, v: &[Rational]) -> Result<Poly, PolyError> {
    let n = p.dimension();
    if v.len() != n {
        return Err(PolyError::ArityMismatch { expected: n, got: v.len() });
    }
    let form = PolyOneForm::new(n, v.iter().map(|vi| p.scale(vi)).collect());
    Ok(s(&form))
}

/// The double product induced by `P_v`: `p ∗ q = p·P_v(q) + P_v(p)·q`. `P_v` is
/// then multiplicative from this product to the ordinary one.
pub fn double_product(p: &Poly, q: &Poly, v: &[Rational]) -> Result<Poly, PolyError> {
    let pq = rota_baxter(q, v)?;
    let pp = rota_baxter(p, v)?;
    p.try_mul(&pq)?.try_add(&pp.try_mul(q)?)
}

/// All second partials as a two-tensor: `entry(j, i) = ∂_j ∂_i p`. Symmetric
/// because partial derivatives commute.
pub fn second_derivative(p: &Poly) -> PolyTwoTensor {
    let n = p.dimension();
    let entries = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    p.partial(i)
                        .and_then(|q| q.partial(j))
                        .expect("indices in range")
                })
                .collect()
        })
        .collect();
    PolyTwoTensor::new(n, entries)
}

/// Applies the integral transformation to the polynomial-and-first-vector
/// slots, then again to the remaining slot: inner pass over the first slot
/// `j`, outer pass over the second slot `i`. Interchanging the two slots
/// (transposing) first yields the same polynomial.
pub fn s_first_slots(t: &PolyTwoTensor) -> Poly {
    let n = t.dimension();
    let outer_components: Vec<Poly> = (0..n)
        .map(|i| {
            let column = PolyOneForm::new(
                n,
                (0..n).map(|j| t.entry(j, i).clone()).collect(),
            );
            s(&column)
        })
        .collect();
    s(&PolyOneForm::new(n, outer_components))
}

/// Exact closedness: all cross-partials agree.
pub fn is_closed_exact(w: &PolyOneForm) -> bool {
    let n = w.dimension();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = w.component(i).partial(j).expect("index in range");
            let b = w.component(j).partial(i).expect("index in range");
            if a != b {
                return false;
            }
        }
    }
    true
}
