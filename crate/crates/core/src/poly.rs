//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Design notes:
//! - Coefficients are arbitrary-precision rationals ([`Rational`]); every
//!   operation here is exact, so structural equality is mathematical equality.
//! - A [`Monomial`] is a sparse exponent map ordered graded-lexicographically
//!   (total degree first, then earlier variables dominate), which fixes the
//!   canonical printing order.
//! - A [`Poly`] owns its ambient dimension; dimension 0 is legal and means
//!   "constants only". Stored terms never have zero coefficients and never
//!   mention variables outside the ambient dimension.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact scalar: arbitrary-precision rational, always reduced, denominator
/// positive (maintained by the underlying representation).
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Lossy conversion to `f64` (exact for the coefficient sizes produced here).
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },
}

/// Product of powers of variables, stored sparsely as index -> exponent with
/// all exponents positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(BTreeMap<usize, u32>);

impl Monomial {
    /// The empty product (the constant monomial 1).
    pub fn unit() -> Self {
        Monomial(BTreeMap::new())
    }

    /// The single variable `x_{i+1}`.
    pub fn var(i: usize) -> Self {
        Monomial(BTreeMap::from([(i, 1)]))
    }

    /// Builds from (variable index, exponent) pairs; zero exponents are dropped
    /// and repeated indices accumulate.
    pub fn from_exponents(pairs: &[(usize, u32)]) -> Self {
        let mut map = BTreeMap::new();
        for &(i, e) in pairs {
            if e > 0 {
                *map.entry(i).or_insert(0) += e;
            }
        }
        Monomial(map)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(&i).copied().unwrap_or(0)
    }

    /// Iterates (variable index, exponent) in increasing index order.
    pub fn exponents(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(&i, &e)| (i, e))
    }

    pub fn total_degree(&self) -> usize {
        self.0.values().map(|&e| e as usize).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest variable index mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut map = self.0.clone();
        for (&i, &e) in &other.0 {
            *map.entry(i).or_insert(0) += e;
        }
        Monomial(map)
    }

    /// Multiplies by a single variable.
    pub fn mul_var(&self, i: usize) -> Self {
        let mut map = self.0.clone();
        *map.entry(i).or_insert(0) += 1;
        Monomial(map)
    }

    /// Divides by one power of `x_{i+1}`; `None` if the exponent is zero.
    pub fn div_var(&self, i: usize) -> Option<Self> {
        let mut map = self.0.clone();
        match map.get_mut(&i) {
            Some(e) if *e > 1 => *e -= 1,
            Some(_) => {
                map.remove(&i);
            }
            None => return None,
        }
        Some(Monomial(map))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: higher total degree first; among equal degrees the
    /// monomial with the larger exponent on the earliest differing variable is
    /// greater (x1^2 > x1*x2 > x2^2).
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.0.iter().peekable();
        let mut b = other.0.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(&ia, &ea)), Some(&(&ib, &eb))) => {
                    // The side whose next variable comes earlier has a positive
                    // exponent where the other has zero: it is lex-greater.
                    match ia.cmp(&ib) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => match ea.cmp(&eb) {
                            Ordering::Equal => {
                                a.next();
                                b.next();
                            }
                            ord => return ord,
                        },
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over [`Rational`] in a fixed ambient dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    dimension: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(dimension: usize) -> Self {
        Poly { dimension, terms: BTreeMap::new() }
    }

    pub fn constant(dimension: usize, c: Rational) -> Self {
        let mut p = Poly::zero(dimension);
        p.add_term(Monomial::unit(), c);
        p
    }

    pub fn one(dimension: usize) -> Self {
        Poly::constant(dimension, Rational::one())
    }

    /// The coordinate polynomial `x_{i+1}`. Panics if `i >= dimension`.
    pub fn var(dimension: usize, i: usize) -> Self {
        assert!(i < dimension, "variable index {i} out of range for dimension {dimension}");
        let mut p = Poly::zero(dimension);
        p.add_term(Monomial::var(i), Rational::one());
        p
    }

    /// Single-term polynomial. Panics if the monomial mentions a variable
    /// outside the ambient dimension.
    pub fn monomial(dimension: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero(dimension);
        p.add_term(m, c);
        p
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::unit())
    }

    /// Adds `c * m`, keeping the no-zero-coefficient invariant. Panics if the
    /// monomial mentions a variable outside the ambient dimension.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if let Some(v) = m.max_var() {
            assert!(
                v < self.dimension,
                "monomial mentions x{} but dimension is {}",
                v + 1,
                self.dimension
            );
        }
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_dim(other)?;
        let mut out = Poly::zero(self.dimension);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Poly::zero(self.dimension);
        }
        Poly {
            dimension: self.dimension,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Multiplies the coefficient of every term by `f(total degree of term)`.
    pub fn scale_by_degree(&self, f: impl Fn(usize) -> Rational) -> Self {
        let mut out = Poly::zero(self.dimension);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * f(m.total_degree()));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Poly::one(self.dimension);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Exact evaluation at a rational point of matching length.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.dimension {
            return Err(PolyError::ArityMismatch { expected: self.dimension, got: point.len() });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, e) in m.exponents() {
                for _ in 0..e {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Floating-point evaluation at a point of matching length.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, PolyError> {
        if point.len() != self.dimension {
            return Err(PolyError::ArityMismatch { expected: self.dimension, got: point.len() });
        }
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut term = rational_to_f64(c);
            for (i, e) in m.exponents() {
                term *= point[i].powi(e as i32);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Partial derivative with respect to `x_{i+1}`.
    pub fn partial(&self, i: usize) -> Result<Self, PolyError> {
        if i >= self.dimension {
            return Err(PolyError::IndexOutOfRange { index: i, dimension: self.dimension });
        }
        let mut out = Poly::zero(self.dimension);
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e > 0 {
                let lowered = m.div_var(i).expect("positive exponent");
                out.add_term(lowered, c * Rational::from_integer(e.into()));
            }
        }
        Ok(out)
    }

    /// Substitutes `x_{j+1} := images[j]`; all images must share one target
    /// dimension. An empty image list (legal only when `self` has dimension 0)
    /// produces a dimension-0 constant.
    pub fn substitute(&self, images: &[Poly]) -> Result<Self, PolyError> {
        if images.len() != self.dimension {
            return Err(PolyError::ArityMismatch { expected: self.dimension, got: images.len() });
        }
        let target = images.first().map(Poly::dimension).unwrap_or(0);
        for im in images {
            if im.dimension != target {
                return Err(PolyError::DimensionMismatch { left: target, right: im.dimension });
            }
        }
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, e) in m.exponents() {
                term = &term * &images[i].pow(e);
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Splits into homogeneous parts, keyed by total degree; only nonzero
    /// parts appear.
    pub fn homogeneous_components(&self) -> BTreeMap<usize, Poly> {
        let mut out: BTreeMap<usize, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.total_degree())
                .or_insert_with(|| Poly::zero(self.dimension))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// The degree-`d` homogeneous part (possibly zero).
    pub fn homogeneous_component(&self, d: usize) -> Poly {
        let mut out = Poly::zero(self.dimension);
        for (m, c) in &self.terms {
            if m.total_degree() == d {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Largest coefficient magnitude, as f64 (0 for the zero polynomial).
    /// Used to quantify how far two supposedly equal polynomials diverge.
    pub fn max_coefficient_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| rational_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Self) -> Result<(), PolyError> {
        if self.dimension != other.dimension {
            return Err(PolyError::DimensionMismatch { left: self.dimension, right: other.dimension });
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("dimension mismatch in +")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("dimension mismatch in -")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("dimension mismatch in *")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            dimension: self.dimension,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, e) in m.exponents() {
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "x{}", i + 1)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    /// Canonical text form: terms in descending graded-lex order, `a/b`
    /// coefficients, unit coefficients elided, e.g.
    /// `1/8*x1^3*x2^5 + 1/4*x1^3*x2`. Parseable by the expression grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if m.is_unit() {
                write_rational(f, &mag)?;
            } else {
                if !mag.is_one() {
                    write_rational(f, &mag)?;
                    write!(f, "*")?;
                }
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}
