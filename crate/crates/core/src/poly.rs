//! Sparse multivariate polynomials over [`ExactScalar`] in the fixed
//! variables `x, y, z, t, u`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::{CoreError, ExactScalar, C64};

/// The five variables every polynomial in this crate lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    Z,
    T,
    U,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::X, Var::Y, Var::Z, Var::T, Var::U];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
            Var::T => "t",
            Var::U => "u",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector indexed by [`Var::index`].
pub type Monomial = [u32; 5];

/// A partial assignment of values to variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<S> {
    values: [Option<S>; 5],
}

impl<S> Default for Assignment<S> {
    fn default() -> Self {
        Self {
            values: [None, None, None, None, None],
        }
    }
}

impl<S: Clone> Assignment<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, value: S) -> Self {
        self.values[var.index()] = Some(value);
        self
    }

    pub fn set(&mut self, var: Var, value: S) {
        self.values[var.index()] = Some(value);
    }

    pub fn get(&self, var: Var) -> Option<&S> {
        self.values[var.index()].as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &S)> {
        Var::ALL
            .into_iter()
            .filter_map(|v| self.values[v.index()].as_ref().map(|s| (v, s)))
    }
}

/// Canonical sparse polynomial: a map from monomials to nonzero coefficients.
///
/// Every constructor and operation prunes zero coefficients, so the zero
/// polynomial is exactly the empty map and `==` decides polynomial equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(ExactScalar::one())
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::monomial([0; 5], c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(ExactScalar::from_int(n))
    }

    pub fn var(v: Var) -> Self {
        let mut m = [0; 5];
        m[v.index()] = 1;
        Self::monomial(m, ExactScalar::one())
    }

    pub fn monomial(m: Monomial, c: ExactScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, ExactScalar)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: &ExactScalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter()
    }

    /// Canonical form. Operations already keep polynomials canonical; this
    /// re-prunes in case terms were assembled by hand.
    pub fn normalize(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.clone())))
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m[v.index()]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Variables that actually occur.
    pub fn variables(&self) -> Vec<Var> {
        Var::ALL
            .into_iter()
            .filter(|v| self.degree_in(*v) > 0)
            .collect()
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self, v: Var) -> Self {
        let i = v.index();
        Self::from_terms(self.terms.iter().filter(|(m, _)| m[i] > 0).map(|(m, c)| {
            let mut m2 = *m;
            m2[i] -= 1;
            (m2, c * &ExactScalar::from_int(m[i] as i64))
        }))
    }

    /// Replaces `v` by the polynomial `q`.
    pub fn substitute(&self, v: Var, q: &MultiPoly) -> Self {
        let i = v.index();
        let max = self.degree_in(v);
        let mut powers = Vec::with_capacity(max as usize + 1);
        powers.push(Self::one());
        for k in 1..=max as usize {
            let next = &powers[k - 1] * q;
            powers.push(next);
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut rest = *m;
            rest[i] = 0;
            let piece = &powers[m[i] as usize] * &Self::monomial(rest, c.clone());
            out = &out + &piece;
        }
        out
    }

    /// Replaces `v` by an exact value.
    pub fn partial_eval(&self, v: Var, value: &ExactScalar) -> Self {
        self.substitute(v, &Self::constant(value.clone()))
    }

    /// `v^d * p(1/v)` with `d = degree_in(v)`: the polynomial in the chart at
    /// infinity for `v`.
    pub fn reciprocal_in(&self, v: Var) -> Self {
        self.reciprocal_in_with_degree(v, self.degree_in(v))
    }

    /// `v^d * p(1/v)` for a chosen `d >= degree_in(v)`.
    pub fn reciprocal_in_with_degree(&self, v: Var, d: u32) -> Self {
        assert!(d >= self.degree_in(v), "reciprocal degree below actual degree");
        let i = v.index();
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = *m;
                    m2[i] = d - m[i];
                    (m2, c.clone())
                })
                .collect(),
        }
    }

    /// Divides out the largest power of `v` that divides every term.
    pub fn strip_power_of(&self, v: Var) -> (Self, u32) {
        let i = v.index();
        let k = self.terms.keys().map(|m| m[i]).min().unwrap_or(0);
        let stripped = Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = *m;
                    m2[i] -= k;
                    (m2, c.clone())
                })
                .collect(),
        };
        (stripped, k)
    }

    /// Reduces modulo `y^2 = x(x-1)(x-t)` (in the symbols `x` and `t`).
    ///
    /// The result has `y`-degree at most one and agrees with `self` on the
    /// curve.
    pub fn reduce_mod_curve(&self) -> Self {
        let max = self.degree_in(Var::Y);
        if max < 2 {
            return self.clone();
        }
        let cubic = curve_cubic();
        let mut cubic_powers = Vec::with_capacity(max as usize / 2 + 1);
        cubic_powers.push(Self::one());
        for k in 1..=(max as usize / 2) {
            let next = &cubic_powers[k - 1] * &cubic;
            cubic_powers.push(next);
        }
        let y = Var::Y.index();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut rest = *m;
            rest[y] = m[y] % 2;
            let piece = &cubic_powers[(m[y] / 2) as usize] * &Self::monomial(rest, c.clone());
            out = &out + &piece;
        }
        out
    }

    /// Exact evaluation. Only variables that occur need to be assigned.
    pub fn eval_exact(&self, at: &Assignment<ExactScalar>) -> Result<ExactScalar, CoreError> {
        let vars = self.variables();
        let mut values = [ExactScalar::zero(), ExactScalar::zero(), ExactScalar::zero(), ExactScalar::zero(), ExactScalar::zero()];
        for v in vars {
            values[v.index()] = at.get(v).cloned().ok_or(CoreError::UnassignedVariable(v))?;
        }
        let mut acc = ExactScalar::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (k, e) in m.iter().enumerate() {
                if *e > 0 {
                    term = &term * &values[k].pow(*e);
                }
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// Floating-point evaluation at complex values.
    pub fn eval_c64(&self, at: &Assignment<C64>) -> Result<C64, CoreError> {
        let mut values = [C64::new(0.0, 0.0); 5];
        for v in self.variables() {
            values[v.index()] = *at.get(v).ok_or(CoreError::UnassignedVariable(v))?;
        }
        let mut acc = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut term = c.to_c64();
            for (k, e) in m.iter().enumerate() {
                if *e > 0 {
                    term *= values[k].powu(*e);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Coefficients (lowest degree first) of `self` viewed as a univariate
    /// polynomial in `v` after assigning every other occurring variable.
    pub fn univariate_c64(&self, v: Var, rest: &Assignment<C64>) -> Result<Vec<C64>, CoreError> {
        let deg = self.degree_in(v) as usize;
        let mut coeffs = alloc::vec![C64::new(0.0, 0.0); deg + 1];
        let i = v.index();
        for (m, c) in &self.terms {
            let mut term = c.to_c64();
            for (k, e) in m.iter().enumerate() {
                if k == i || *e == 0 {
                    continue;
                }
                let var = Var::ALL[k];
                term *= rest.get(var).ok_or(CoreError::UnassignedVariable(var))?.powu(*e);
            }
            coeffs[m[i] as usize] += term;
        }
        Ok(coeffs)
    }
}

/// `x(x-1)(x-t)` as a polynomial in `x` and `t`.
pub fn curve_cubic() -> MultiPoly {
    let x = MultiPoly::var(Var::X);
    let t = MultiPoly::var(Var::T);
    &(&x * &(&x - &MultiPoly::one())) * &(&x - &t)
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for v in Var::ALL {
                match m[v.index()] {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    e => write!(f, "*{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, &-c);
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut m = *ma;
                for k in 0..5 {
                    m[k] += mb[k];
                }
                out.add_term(m, &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&ExactScalar::from_int(-1))
    }
}

macro_rules! owned_ops {
    ($tr:ident, $method:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &'a MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MultiPoly {
        MultiPoly::var(Var::X)
    }
    fn y() -> MultiPoly {
        MultiPoly::var(Var::Y)
    }
    fn z() -> MultiPoly {
        MultiPoly::var(Var::Z)
    }
    fn t() -> MultiPoly {
        MultiPoly::var(Var::T)
    }

    #[test]
    fn commutativity_cancels() {
        assert!((&x() * &z() - &z() * &x()).is_zero());
    }

    #[test]
    fn binomial_identity() {
        let lhs = (&x() + &z()).pow(2);
        let rhs = &(&x().pow(2) + &(&x() * &z()).scale(&2.into())) + &z().pow(2);
        assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn zero_polynomial_evaluates_to_zero() {
        let at = Assignment::new().with(Var::X, ExactScalar::from_int(7));
        assert!(MultiPoly::zero().eval_exact(&at).unwrap().is_zero());
    }

    #[test]
    fn unassigned_variable_is_an_error() {
        let at = Assignment::new().with(Var::X, ExactScalar::from_int(1));
        assert_eq!(
            (&x() + &z()).eval_exact(&at),
            Err(CoreError::UnassignedVariable(Var::Z))
        );
    }

    #[test]
    fn y_squared_reduces_to_the_cubic() {
        let expect = &(&x().pow(3) - &(&(&MultiPoly::one() + &t()) * &x().pow(2))) + &(&t() * &x());
        assert_eq!(y().pow(2).reduce_mod_curve(), expect);
        assert_eq!(y().pow(3).reduce_mod_curve(), &y() * &expect);
        assert_eq!(x().reduce_mod_curve(), x());
    }

    #[test]
    fn derivative_and_substitution() {
        let p = &x().pow(3) * &z();
        assert_eq!(p.derivative(Var::X), (&x().pow(2) * &z()).scale(&3.into()));
        let q = p.substitute(Var::Z, &(&x() + &MultiPoly::one()));
        assert_eq!(q, &x().pow(4) + &x().pow(3));
    }

    #[test]
    fn reciprocal_chart() {
        // x^2 - 2x + 5 -> 1 - 2u + 5u^2 when x -> 1/u
        let p = &(&x().pow(2) - &x().scale(&2.into())) + &MultiPoly::int(5);
        let r = p.reciprocal_in(Var::X);
        let expect = &(&MultiPoly::one() - &x().scale(&2.into())) + &x().pow(2).scale(&5.into());
        assert_eq!(r, expect);
        let (s, k) = (&x().pow(3) * &z() + x().pow(2)).strip_power_of(Var::X);
        assert_eq!(k, 2);
        assert_eq!(s, &(&x() * &z()) + &MultiPoly::one());
    }

    #[test]
    fn univariate_coefficients() {
        let p = &(&x() * &z().pow(2)) + &MultiPoly::int(3);
        let at = Assignment::new().with(Var::X, C64::new(2.0, 0.0));
        let c = p.univariate_c64(Var::Z, &at).unwrap();
        assert_eq!(c, alloc::vec![C64::new(3.0, 0.0), C64::new(0.0, 0.0), C64::new(2.0, 0.0)]);
    }
}
