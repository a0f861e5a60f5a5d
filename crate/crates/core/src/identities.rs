//! The polynomials of the trivialized picture and the catalog of exact
//! identities relating them.
//!
//! Conventions: `x, z` are the base and fiber coordinates, `u` is the base
//! coordinate of a query point for the quadratic in the section parameter
//! `x0`, and `t` is the curve parameter. Rational-function identities are
//! stated after clearing denominators, so every entry is "this polynomial is
//! zero".

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::poly::{curve_cubic, Assignment, MultiPoly, Var};
use crate::ExactScalar;

fn v(var: Var) -> MultiPoly {
    MultiPoly::var(var)
}

fn c(n: i64) -> MultiPoly {
    MultiPoly::int(n)
}

fn x() -> MultiPoly {
    v(Var::X)
}
fn z() -> MultiPoly {
    v(Var::Z)
}
fn t() -> MultiPoly {
    v(Var::T)
}
fn u() -> MultiPoly {
    v(Var::U)
}

/// `f0 = -z^2 + 2z - x`.
pub fn f0() -> MultiPoly {
    &(&(-&z().pow(2)) + &(&c(2) * &z())) - &x()
}

/// `f1 = -z^2 + x`.
pub fn f1() -> MultiPoly {
    &(-&z().pow(2)) + &x()
}

/// `ft = z^2 - 2xz + x`.
pub fn ft() -> MultiPoly {
    &(&z().pow(2) - &(&c(2) * &(&x() * &z()))) + &x()
}

/// Numerator `x f0^2` of the first integral.
pub fn first_integral_num() -> MultiPoly {
    &x() * &f0().pow(2)
}

/// Denominator `x f0^2 - (x-1) f1^2` of the first integral.
pub fn first_integral_den() -> MultiPoly {
    &first_integral_num() - &(&(&x() - &c(1)) * &f1().pow(2))
}

/// The closed-form numerator as printed, `x (z^2 - 2z - x)^2`.
pub fn printed_first_integral_num() -> MultiPoly {
    let inner = &(&z().pow(2) - &(&c(2) * &z())) - &x();
    &x() * &inner.pow(2)
}

/// The discriminant quartic `Delta(u, z)`.
pub fn delta() -> MultiPoly {
    let (u, z, t) = (u(), z(), t());
    let t_minus_u = &t - &u;
    let t_minus_1 = &t - &c(1);
    let quadratic_mid = &(&(&(&c(2) * &(&t * &u)) + &t) - &u) - &c(2);
    let terms = [
        &t_minus_u * &z.pow(4),
        -&(&c(4) * &(&(&t_minus_1 * &u) * &z.pow(3))),
        &c(2) * &(&(&u * &quadratic_mid) * &z.pow(2)),
        -&(&c(4) * &(&(&u.pow(2) * &t_minus_1) * &z)),
        &u.pow(2) * &t_minus_u,
    ];
    terms.iter().fold(MultiPoly::zero(), |acc, p| &acc + p)
}

/// Leading coefficient `A = (u-z)^2` of the quadratic in the section
/// parameter.
pub fn star_a() -> MultiPoly {
    (&u() - &z()).pow(2)
}

/// Middle coefficient `B = (-t-u) z^2 + 2u(t+1) z - u(t+u)`.
pub fn star_b() -> MultiPoly {
    let (u, z, t) = (u(), z(), t());
    let a = &(-&(&t + &u)) * &z.pow(2);
    let b = &c(2) * &(&(&u * &(&t + &c(1))) * &z);
    let cc = &u * &(&t + &u);
    &(&a + &b) - &cc
}

/// Constant coefficient `C = t u (z-1)^2`.
pub fn star_c() -> MultiPoly {
    &(&t() * &u()) * &(&z() - &c(1)).pow(2)
}

/// `dx` coefficient `P = -z^2 - 2(x-1) z + x` of the cleared Riccati form.
pub fn omega_p() -> MultiPoly {
    let (x, z) = (x(), z());
    &(&(-&z.pow(2)) - &(&c(2) * &(&(&x - &c(1)) * &z))) + &x
}

/// `dz` coefficient `Q = 4x(x-1)` of the cleared Riccati form.
pub fn omega_q() -> MultiPoly {
    &c(4) * &(&x() * &(&x() - &c(1)))
}

/// `2x(x-1)(x-t)`, the denominator of the logarithmic derivative of `y`.
fn log_derivative_den() -> MultiPoly {
    &c(2) * &curve_cubic()
}

/// `3x^2 - 2(1+t)x + t`.
pub fn cubic_derivative() -> MultiPoly {
    curve_cubic().derivative(Var::X)
}

/// Cleared numerator of a section slope at `(x, z)` as a polynomial in the
/// section parameter `a`: `n0 + n1 a`, both multiplied by `2x(x-1)(x-t)`.
fn slope_numerator_parts() -> (MultiPoly, MultiPoly) {
    let den = log_derivative_den();
    let d = cubic_derivative();
    let (x, z) = (x(), z());
    let n0 = &(&den * &(&c(1) - &z)) + &(&(&(&z * &x) - &x) * &d);
    let n1 = &(-&den) + &(&(&x - &z) * &d);
    (n0, n1)
}

/// `A x^2 + B x + C` with `u := x`: the quadratic evaluated at the base point.
fn star_at_base() -> MultiPoly {
    let q = &(&(&star_a() * &x().pow(2)) + &(&star_b() * &x())) + &star_c();
    q.substitute(Var::U, &x())
}

fn star_with_u_as_x(p: MultiPoly) -> MultiPoly {
    p.substitute(Var::U, &x())
}

/// Cleared numerator of `Z1 + Z2` over the base point, obtained from the root
/// structure of the quadratic (sum and product of its roots), scaled by
/// `2x(x-1)(x-t)` and divided by `A x^2 + B x + C`.
fn slope_sum_numerator() -> MultiPoly {
    let (n0, n1) = slope_numerator_parts();
    let a = star_with_u_as_x(star_a());
    let b = star_with_u_as_x(star_b());
    let cc = star_with_u_as_x(star_c());
    let x = x();
    let terms = [
        &c(2) * &(&(&n0 * &x) * &a),
        &n0 * &b,
        -&(&(&n1 * &x) * &b),
        -&(&c(2) * &(&n1 * &cc)),
    ];
    terms.iter().fold(MultiPoly::zero(), |acc, p| &acc + p)
}

/// Cleared numerator of `Z1 Z2`, scaled by `(2x(x-1)(x-t))^2` and divided by
/// `A x^2 + B x + C`.
fn slope_product_numerator() -> MultiPoly {
    let (n0, n1) = slope_numerator_parts();
    let a = star_with_u_as_x(star_a());
    let b = star_with_u_as_x(star_b());
    let cc = star_with_u_as_x(star_c());
    let terms = [
        &n0.pow(2) * &a,
        -&(&(&n0 * &n1) * &b),
        &n1.pow(2) * &cc,
    ];
    terms.iter().fold(MultiPoly::zero(), |acc, p| &acc + p)
}

/// Numerator of the linear coefficient of the 2-web equation as printed:
/// `-(z^2 + 2(x-1)z - x)` over `2x(x-1)`.
fn web_linear_numerator() -> MultiPoly {
    omega_p()
}

/// Constant coefficient numerator of the 2-web equation, with the trailing
/// cubic factor either as printed or as reconstructed from `Z1 Z2`. The
/// denominator is `4x^2(x-1)^2(t-x)`.
pub fn web_constant_numerator(printed: bool) -> MultiPoly {
    let (x, z, t) = (x(), z(), t());
    let lead = &(&(&c(2) * &(&t * &x)) - &x.pow(2)) - &t;
    let tail = if printed {
        &(&(&(-&x.pow(3)) + &x.pow(2)) - &(&t * &x)) + &c(2)
    } else {
        &(&(-&x.pow(3)) + &(&c(2) * &x.pow(2))) - &(&t * &x)
    };
    &(&z * &(&z - &c(1))) * &(&(&lead * &z) + &tail)
}

/// Denominator `4x^2(x-1)^2(t-x)` of the constant coefficient.
pub fn web_constant_denominator() -> MultiPoly {
    let x = x();
    &(&c(4) * &(&x.pow(2) * &(&x - &c(1)).pow(2))) * &(&t() - &x)
}

/// The named exact identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityId {
    /// `x f0^2 - (x-1) f1^2 = ft^2`.
    I1,
    /// `x f0^2 - t ft^2 = -Delta(u := x, z)`.
    I2,
    /// `B^2 - 4AC = (t-u) Delta(u, z)`.
    I3,
    /// `F(x, 0) = x`.
    I4,
    /// `dF ^ Omega = 0`.
    I5,
    /// Linear coefficient of the 2-web equation equals `-2 Z0` and
    /// `-(Z1 + Z2)`.
    I6,
}

impl IdentityId {
    pub const ALL: [IdentityId; 6] = [
        IdentityId::I1,
        IdentityId::I2,
        IdentityId::I3,
        IdentityId::I4,
        IdentityId::I5,
        IdentityId::I6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::I1 => "I1",
            IdentityId::I2 => "I2",
            IdentityId::I3 => "I3",
            IdentityId::I4 => "I4",
            IdentityId::I5 => "I5",
            IdentityId::I6 => "I6",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            IdentityId::I1 => "x f0^2 - (x-1) f1^2 = ft^2",
            IdentityId::I2 => "x f0^2 - t ft^2 = -Delta(u:=x, z)",
            IdentityId::I3 => "B^2 - 4AC = (t-u) Delta(u, z)",
            IdentityId::I4 => "numerator of F(x,0) - x vanishes",
            IdentityId::I5 => "numerator of dF ^ Omega vanishes mod the curve",
            IdentityId::I6 => "2-web linear coefficient = -2 Z0 = -(Z1+Z2)",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The cleared residual polynomials of an identity. All must be zero for the
/// identity to hold; `I6` contributes two.
pub fn identity_residuals(id: IdentityId) -> Vec<MultiPoly> {
    match id {
        IdentityId::I1 => vec![&first_integral_den() - &ft().pow(2)],
        IdentityId::I2 => {
            let lhs = &first_integral_num() - &(&t() * &ft().pow(2));
            vec![&lhs + &delta().substitute(Var::U, &x())]
        }
        IdentityId::I3 => {
            let disc = &star_b().pow(2) - &(&c(4) * &(&star_a() * &star_c()));
            vec![&disc - &(&(&t() - &u()) * &delta())]
        }
        IdentityId::I4 => {
            let num = first_integral_num().partial_eval(Var::Z, &ExactScalar::zero());
            let den = first_integral_den().partial_eval(Var::Z, &ExactScalar::zero());
            vec![&num - &(&x() * &den)]
        }
        IdentityId::I5 => {
            let (n, d) = (first_integral_num(), first_integral_den());
            let fx = &(&n.derivative(Var::X) * &d) - &(&n * &d.derivative(Var::X));
            let fz = &(&n.derivative(Var::Z) * &d) - &(&n * &d.derivative(Var::Z));
            let wedge = &(&fx * &omega_q()) - &(&fz * &omega_p());
            vec![wedge.reduce_mod_curve()]
        }
        IdentityId::I6 => {
            // printed linear coefficient L = N_L / (2x(x-1)); -2 Z0 = 2P / Q
            let lin = web_linear_numerator();
            let against_z0 = &(&lin * &omega_q()) - &(&(&c(2) * &omega_p()) * &(&c(2) * &(&x() * &(&x() - &c(1)))));
            // -(Z1 + Z2) = -S / (2x(x-1)(x-t) (A x^2 + B x + C))
            let sum = slope_sum_numerator();
            let against_roots = &(&lin * &(&log_derivative_den() * &star_at_base()))
                + &(&sum * &(&c(2) * &(&x() * &(&x() - &c(1)))));
            vec![against_z0, against_roots]
        }
    }
}

/// A variable assignment at which a claimed-zero polynomial is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub at: Assignment<ExactScalar>,
    pub value: ExactScalar,
}

/// Exact verdict on one catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityVerdict {
    pub id: IdentityId,
    pub holds: bool,
    /// Number of terms left in the first nonzero residual (0 if it holds).
    pub residual_terms: usize,
    pub witness: Option<Witness>,
}

pub fn identity_check(id: IdentityId) -> IdentityVerdict {
    let residuals = identity_residuals(id);
    match residuals.iter().find(|r| !r.is_zero()) {
        None => IdentityVerdict {
            id,
            holds: true,
            residual_terms: 0,
            witness: None,
        },
        Some(r) => IdentityVerdict {
            id,
            holds: false,
            residual_terms: r.len(),
            witness: find_witness(r),
        },
    }
}

/// Searches the integer grid `{2, ..., deg_v + 2}` over the occurring
/// variables for a point where `p` is nonzero. A nonzero polynomial always
/// has one there, so `None` certifies `p = 0`.
pub fn find_witness(p: &MultiPoly) -> Option<Witness> {
    let vars = p.variables();
    let sizes: Vec<u32> = vars.iter().map(|var| p.degree_in(*var) + 1).collect();
    grid_search(p, &vars, &sizes, |value| !value.is_zero())
}

/// Evaluates `p` on the grid with `sizes[i]` points in `vars[i]` and returns
/// the first point accepted by `stop`.
fn grid_search(
    p: &MultiPoly,
    vars: &[Var],
    sizes: &[u32],
    stop: impl Fn(&ExactScalar) -> bool,
) -> Option<Witness> {
    let mut idx = vec![0u32; vars.len()];
    loop {
        let mut at = Assignment::new();
        for (var, k) in vars.iter().zip(&idx) {
            at.set(*var, ExactScalar::from_int(2 + *k as i64));
        }
        let value = p.eval_exact(&at).expect("grid assigns every occurring variable");
        if stop(&value) {
            return Some(Witness { at, value });
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return None;
            }
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Sampling cross-check of `lhs = rhs` independent of canonical forms.
///
/// Evaluates both sides on a tensor grid with one more point per variable
/// than the larger of the two per-variable degrees. Returns `None` when the
/// sides agree at every grid point (which proves the identity) and the first
/// disagreement otherwise.
pub fn sampling_cross_check(lhs: &MultiPoly, rhs: &MultiPoly) -> Option<Witness> {
    let mut vars = lhs.variables();
    for var in rhs.variables() {
        if !vars.contains(&var) {
            vars.push(var);
        }
    }
    vars.sort();
    let sizes: Vec<u32> = vars
        .iter()
        .map(|var| lhs.degree_in(*var).max(rhs.degree_in(*var)) + 1)
        .collect();
    let diff = lhs - rhs;
    // evaluate the two sides separately so the check does not rely on `-`
    let mut idx = vec![0u32; vars.len()];
    loop {
        let mut at = Assignment::new();
        for (var, k) in vars.iter().zip(&idx) {
            at.set(*var, ExactScalar::from_int(2 + *k as i64));
        }
        let a = lhs.eval_exact(&at).expect("assigned");
        let b = rhs.eval_exact(&at).expect("assigned");
        if a != b {
            return Some(Witness { at, value: a - b });
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                debug_assert!(diff.is_zero());
                return None;
            }
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// The two sides of each catalog entry in a form suitable for
/// [`sampling_cross_check`].
pub fn identity_sides(id: IdentityId) -> Vec<(MultiPoly, MultiPoly)> {
    identity_residuals(id)
        .into_iter()
        .map(|r| (r, MultiPoly::zero()))
        .chain(match id {
            IdentityId::I1 => vec![(first_integral_den(), ft().pow(2))],
            IdentityId::I2 => vec![(
                &first_integral_num() - &(&t() * &ft().pow(2)),
                -&delta().substitute(Var::U, &x()),
            )],
            IdentityId::I3 => vec![(
                &star_b().pow(2) - &(&c(4) * &(&star_a() * &star_c())),
                &(&t() - &u()) * &delta(),
            )],
            _ => Vec::new(),
        })
        .collect()
}

/// Printed formulas that the identity kernel tests against their
/// reconstructed counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypoProbe {
    /// Printed closed form `x(z^2-2z-x)^2` of the first-integral numerator
    /// against `x f0^2`.
    FirstIntegralNumerator,
    /// Printed constant coefficient of the 2-web equation against `Z1 Z2`.
    WebConstantPrinted,
    /// Reconstructed constant coefficient against `Z1 Z2`.
    WebConstantCorrected,
}

impl TypoProbe {
    pub const ALL: [TypoProbe; 3] = [
        TypoProbe::FirstIntegralNumerator,
        TypoProbe::WebConstantPrinted,
        TypoProbe::WebConstantCorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TypoProbe::FirstIntegralNumerator => "first_integral_printed_numerator",
            TypoProbe::WebConstantPrinted => "web_constant_printed",
            TypoProbe::WebConstantCorrected => "web_constant_corrected",
        }
    }
}

/// Residual of a probe: zero iff the probed formula is correct.
pub fn typo_probe_residual(probe: TypoProbe) -> MultiPoly {
    match probe {
        TypoProbe::FirstIntegralNumerator => &printed_first_integral_num() - &first_integral_num(),
        TypoProbe::WebConstantPrinted | TypoProbe::WebConstantCorrected => {
            let printed = probe == TypoProbe::WebConstantPrinted;
            let lhs = &web_constant_numerator(printed) * &(&log_derivative_den().pow(2) * &star_at_base());
            let rhs = &slope_product_numerator() * &web_constant_denominator();
            &lhs - &rhs
        }
    }
}

/// Verdict on a probe, with a witness when the probed formula is wrong.
pub fn typo_probe(probe: TypoProbe) -> (bool, Option<Witness>) {
    let r = typo_probe_residual(probe);
    if r.is_zero() {
        (true, None)
    } else {
        (false, find_witness(&r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(pairs: &[(Var, i64)]) -> Assignment<ExactScalar> {
        let mut a = Assignment::new();
        for (var, n) in pairs {
            a.set(*var, ExactScalar::from_int(*n));
        }
        a
    }

    #[test]
    fn ft_at_one_two() {
        let value = ft().eval_exact(&at(&[(Var::X, 1), (Var::Z, 2)])).unwrap();
        assert_eq!(value, ExactScalar::from_int(1));
    }

    #[test]
    fn delta_special_fibers() {
        let one = delta().partial_eval(Var::Z, &ExactScalar::one());
        let expect = &(&t() - &u()) * &(&u() - &c(1)).pow(2);
        assert_eq!(one, expect);
        let zero = delta().partial_eval(Var::Z, &ExactScalar::zero());
        assert_eq!(zero, &u().pow(2) * &(&t() - &u()));
    }

    #[test]
    fn every_catalog_identity_holds() {
        for id in IdentityId::ALL {
            let verdict = identity_check(id);
            assert!(verdict.holds, "{id} failed: {verdict:?}");
        }
    }

    #[test]
    fn i3_spot_check_at_z_one() {
        let disc = &star_b().pow(2) - &(&c(4) * &(&star_a() * &star_c()));
        let at_one = disc.partial_eval(Var::Z, &ExactScalar::one());
        assert_eq!(at_one, &(&t() - &u()).pow(2) * &(&u() - &c(1)).pow(2));
    }

    #[test]
    fn printed_first_integral_is_a_typo() {
        let (ok, witness) = typo_probe(TypoProbe::FirstIntegralNumerator);
        assert!(!ok);
        assert!(witness.is_some());
        // the difference is exactly -4x^2 z^2 + 8x^2 z
        let expect = &(&c(-4) * &(&x().pow(2) * &z().pow(2))) + &(&c(8) * &(&x().pow(2) * &z()));
        assert_eq!(typo_probe_residual(TypoProbe::FirstIntegralNumerator), expect);
    }

    #[test]
    fn web_constant_printed_fails_corrected_holds() {
        assert!(!typo_probe(TypoProbe::WebConstantPrinted).0);
        assert!(typo_probe(TypoProbe::WebConstantCorrected).0);
    }

    #[test]
    fn web_constant_vanishes_on_constant_sections() {
        for zv in [0, 1] {
            let p = web_constant_numerator(false).partial_eval(Var::Z, &ExactScalar::from_int(zv));
            assert!(p.is_zero());
        }
    }

    #[test]
    fn sampling_agrees_with_canonical_form_both_ways() {
        for id in [IdentityId::I1, IdentityId::I2, IdentityId::I3] {
            for (l, r) in identity_sides(id) {
                assert!(sampling_cross_check(&l, &r).is_none(), "{id}");
            }
        }
        let bad = &printed_first_integral_num() - &(&(&x() - &c(1)) * &f1().pow(2));
        let w = sampling_cross_check(&bad, &ft().pow(2)).expect("typo must be detected");
        assert!(!w.value.is_zero());
    }

    #[test]
    fn witness_is_nonzero_for_nonzero_polynomial() {
        let p = &(&x() - &c(2)) * &(&z() - &c(3));
        let w = find_witness(&p).unwrap();
        assert_eq!(p.eval_exact(&w.at).unwrap(), w.value);
        assert!(!w.value.is_zero());
        assert!(find_witness(&MultiPoly::zero()).is_none());
    }
}
