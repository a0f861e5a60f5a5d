//! Exact and floating-point kernel for the geometry of the stable ruled
//! surface over the elliptic curve `y^2 = x(x-1)(x-t)`.
//!
//! Everything lives on the birational trivialization `C x P^1` with fiber
//! coordinate `z`:
//!
//! - [`exact`] and [`poly`]: Gaussian-rational scalars and sparse multivariate
//!   polynomials in `x, y, z, t, u`, with reduction modulo the curve.
//! - [`identities`]: the catalog of exact polynomial identities behind the
//!   first integral, the discriminant leaf and the 2-web equation.
//! - [`curve`]: the group law on `C`, exact or complex.
//! - [`moebius`]: Moebius maps, the dihedral group `<-z, 1/z>`, the fiberwise
//!   monodromy maps and cross-ratios.
//! - [`riccati`]: slope field, first integral, singular points and the
//!   multiplication-by-two pullback.
//! - [`sections`]: `+4` sections through the three special points, the 2-web
//!   they form, and its discriminant quartic.
//! - [`web`]: the 4-web, its cross-ratio, Blaschke curvature and hexagon
//!   closure.
//! - [`transport`]: analytic continuation of `y` and of Riccati leaves along
//!   paths in the `x`-plane, and loop monodromy.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod curve;
pub mod error;
pub mod exact;
pub mod field;
pub mod identities;
pub mod moebius;
pub mod ode;
pub mod poly;
pub mod riccati;
pub mod roots;
pub mod sections;
pub mod transport;
pub mod upoly;
pub mod web;

pub use error::CoreError;
pub use exact::ExactScalar;
pub use field::Field;

/// Double-precision complex number used by every numeric routine.
pub type C64 = num_complex::Complex64;

/// Shorthand for building a [`C64`].
#[inline]
pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
