//! The small field interface shared by exact and complex arithmetic.
//!
//! Curve arithmetic, section solving and intersection counting are written
//! once against [`Field`] and run either over [`ExactScalar`] (exact
//! verdicts) or over [`C64`] (tolerance-controlled).

use core::fmt::Debug;

use crate::{ExactScalar, C64};

/// Relative tolerance used by [`Field::near`] for complex numbers.
pub const COMPLEX_EQ_TOL: f64 = 1e-10;

pub trait Field: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;

    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    /// `None` when `rhs` is zero (exactly, or up to the complex tolerance).
    fn over(&self, rhs: &Self) -> Option<Self>;

    /// A square root, when one exists in the field. Complex numbers use the
    /// principal branch.
    fn sqrt(&self) -> Option<Self>;

    /// Approximate modulus, used for pivoting and branch choices.
    fn magnitude(&self) -> f64;

    /// Equality used for case dispatch: exact for exact scalars, relative for
    /// floats.
    fn near(&self, other: &Self) -> bool;

    fn is_zeroish(&self) -> bool {
        self.near(&Self::zero())
    }

    fn to_c64(&self) -> C64;

    fn square(&self) -> Self {
        self.times(self)
    }
}

impl Field for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn one() -> Self {
        ExactScalar::one()
    }
    fn from_i64(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn over(&self, rhs: &Self) -> Option<Self> {
        self.checked_div(rhs)
    }
    fn sqrt(&self) -> Option<Self> {
        self.sqrt_exact()
    }
    fn magnitude(&self) -> f64 {
        ExactScalar::to_c64(self).norm()
    }
    fn near(&self, other: &Self) -> bool {
        self == other
    }
    fn is_zeroish(&self) -> bool {
        self.is_zero()
    }
    fn to_c64(&self) -> C64 {
        ExactScalar::to_c64(self)
    }
}

impl Field for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn over(&self, rhs: &Self) -> Option<Self> {
        (rhs.norm() > f64::MIN_POSITIVE).then(|| self / rhs)
    }
    fn sqrt(&self) -> Option<Self> {
        Some(C64::sqrt(*self))
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn near(&self, other: &Self) -> bool {
        let scale = 1f64.max(self.norm()).max(other.norm());
        (self - other).norm() <= COMPLEX_EQ_TOL * scale
    }
    fn to_c64(&self) -> C64 {
        *self
    }
}
