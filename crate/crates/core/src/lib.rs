//! Differential and integral structure on function algebras, twice over.
//!
//! This crate implements a differential `d`, an integral transformation `s`,
//! and the degree-style operators they factor through, on two backends:
//!
//! * **poly** — multivariate polynomials with exact rational coefficients
//!   ([`poly`], [`poly_calculus`]).  The averaging rule divides each monomial
//!   by one plus its *total* degree, which is what makes the operator a
//!   Rota–Baxter operator in every dimension.
//! * **smooth** — a closed expression language with primitive functions and
//!   explicit integral nodes ([`expr`], [`smooth_calculus`]), evaluated with
//!   adaptive Gauss–Legendre quadrature ([`quad`]).
//!
//! Every identity the operators satisfy is executable: [`laws`] hosts seeded
//! property suites over both backends, including a negative control that
//! replays the averaging rule with a deliberately wrong normalization and
//! must detect the discrepancy.
//!
//! [`parse`] provides a small text grammar for expressions and polynomials,
//! used by the command-line interface.

pub mod expr;
pub mod laws;
pub mod parse;
pub mod poly;
pub mod poly_calculus;
pub mod quad;
pub mod smooth_calculus;

/// The three degree-style operators built from the differential.
///
/// With `L(f) = Σ_i ∂_i f · x_i`:
/// `L` alone, `K(f) = L(f) + f(0)`, and `J(f) = L(f) + f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeOp {
    /// `Σ_i ∂_i f · x_i`; scales a homogeneous polynomial of degree `n` by
    /// `n` and therefore kills constants.
    L,
    /// `L(f) + f(0)`; scales degree `n > 0` by `n` and fixes constants.
    K,
    /// `L(f) + f`; scales degree `n` by `n + 1`.
    J,
}

/// The two degree-style operators that are invertible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvertibleOp {
    /// Inverse divides degree `n > 0` by `n` and fixes constants.
    K,
    /// Inverse divides degree `n` by `n + 1`; on the smooth side this is
    /// `f ↦ ∫₀¹ f(t·v) dt`.
    J,
}
