//! The trivialized Riccati foliation `Omega = P dx + Q dz` with
//! `P = -z^2 - 2(x-1)z + x`, `Q = 4x(x-1)`: slope field, first integral,
//! special leaves, singular points, and the pullback by multiplication by two.

use alloc::vec::Vec;

use crate::curve::{Curve, CurvePoint};
use crate::identities;
use crate::moebius::SpherePoint;
use crate::poly::{Assignment, MultiPoly, Var};
use crate::roots::{polynomial_roots, solve_quadratic};
use crate::{c64, CoreError, C64};

/// Relative size below which a denominator counts as a pole.
pub const POLE_TOL: f64 = 1e-14;

fn is_pole(den: C64, scale: f64) -> bool {
    den.norm() <= POLE_TOL * scale.max(1.0)
}

/// `(P, Q)` of the cleared form at `(x, z)`.
pub fn omega(x: C64, z: C64) -> (C64, C64) {
    (-z * z - 2.0 * (x - 1.0) * z + x, 4.0 * x * (x - 1.0))
}

/// Slope `dz/dx = (z^2 + 2(x-1)z - x) / (4x(x-1))` of the leaf through
/// `(x, z)`.
pub fn slope_z0(x: C64, z: C64) -> Result<C64, CoreError> {
    let (p, q) = omega(x, z);
    if is_pole(q, 1.0) {
        return Err(CoreError::Pole("Riccati slope"));
    }
    Ok(-p / q)
}

/// Slope of the leaf in the chart `w = 1/z`:
/// `dw/dx = -(1 + 2(x-1)w - x w^2) / (4x(x-1))`.
pub fn slope_z0_reciprocal(x: C64, w: C64) -> Result<C64, CoreError> {
    let q = 4.0 * x * (x - 1.0);
    if is_pole(q, 1.0) {
        return Err(CoreError::Pole("Riccati slope"));
    }
    Ok(-(1.0 + 2.0 * (x - 1.0) * w - x * w * w) / q)
}

/// The three invariant conics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpecialLeaf {
    /// `f0 = -z^2 + 2z - x = 0`.
    Zero,
    /// `f1 = -z^2 + x = 0`.
    One,
    /// `ft = z^2 - 2xz + x = 0`.
    T,
}

impl SpecialLeaf {
    pub const ALL: [SpecialLeaf; 3] = [SpecialLeaf::Zero, SpecialLeaf::One, SpecialLeaf::T];

    pub fn name(self) -> &'static str {
        match self {
            SpecialLeaf::Zero => "f0",
            SpecialLeaf::One => "f1",
            SpecialLeaf::T => "ft",
        }
    }

    pub fn eval(self, x: C64, z: C64) -> C64 {
        match self {
            SpecialLeaf::Zero => -z * z + 2.0 * z - x,
            SpecialLeaf::One => -z * z + x,
            SpecialLeaf::T => z * z - 2.0 * x * z + x,
        }
    }

    pub fn polynomial(self) -> MultiPoly {
        match self {
            SpecialLeaf::Zero => identities::f0(),
            SpecialLeaf::One => identities::f1(),
            SpecialLeaf::T => identities::ft(),
        }
    }

    /// The value of the first integral along this leaf.
    pub fn level(self) -> SpherePoint {
        match self {
            SpecialLeaf::Zero => SpherePoint::finite(0.0, 0.0),
            SpecialLeaf::One => SpherePoint::finite(1.0, 0.0),
            SpecialLeaf::T => SpherePoint::Infinity,
        }
    }

    /// The two points of the leaf over `x`.
    pub fn points_over(self, x: C64) -> [C64; 2] {
        let (a, b, c) = match self {
            SpecialLeaf::Zero => (c64(-1.0, 0.0), c64(2.0, 0.0), -x),
            SpecialLeaf::One => (c64(-1.0, 0.0), c64(0.0, 0.0), x),
            SpecialLeaf::T => (c64(1.0, 0.0), -2.0 * x, x),
        };
        let r = solve_quadratic(a, b, c);
        [r[0].expect("monic in z"), r[1].expect("monic in z")]
    }
}

fn homogeneous_leaf_values(x: C64, z: SpherePoint) -> (C64, C64) {
    let (z1, z2) = z.homogeneous();
    let f0 = -z1 * z1 + 2.0 * z1 * z2 - x * z2 * z2;
    let ft = z1 * z1 - 2.0 * x * z1 * z2 + x * z2 * z2;
    (f0, ft)
}

/// `F = x f0^2 / ft^2` as a point of `P^1`. `F(x, inf) = x`.
///
/// The numerator `x f0^2` and the denominator `ft^2` vanish together only
/// at the base points of the pencil, where the value is indeterminate.
pub fn first_integral(x: C64, z: SpherePoint) -> Result<SpherePoint, CoreError> {
    let (f0, ft) = homogeneous_leaf_values(x, z);
    let num = x * f0 * f0;
    let den = ft * ft;
    let scale = (1.0 + x.norm()).powi(3);
    if num.norm() <= 1e-14 * scale && den.norm() <= 1e-14 * scale {
        return Err(CoreError::Indeterminate("first integral"));
    }
    Ok(SpherePoint::from_homogeneous(num, den))
}

/// Finite value of `F`, erroring at poles and base points.
pub fn first_integral_value(x: C64, z: C64) -> Result<C64, CoreError> {
    first_integral(x, SpherePoint::Finite(z))?
        .value()
        .ok_or(CoreError::Pole("first integral"))
}

/// `(dF/dx, dF/dz)` at a finite point off `ft = 0`.
pub fn first_integral_gradient(x: C64, z: C64) -> Result<(C64, C64), CoreError> {
    let f0 = SpecialLeaf::Zero.eval(x, z);
    let ft = SpecialLeaf::T.eval(x, z);
    if is_pole(ft, 1.0 + x.norm()) {
        return Err(CoreError::Pole("first integral"));
    }
    let n = x * f0 * f0;
    let d = ft * ft;
    let n_x = f0 * f0 - 2.0 * x * f0;
    let n_z = 2.0 * x * f0 * (2.0 - 2.0 * z);
    let d_x = 2.0 * ft * (1.0 - 2.0 * z);
    let d_z = 2.0 * ft * (2.0 * z - 2.0 * x);
    Ok(((n_x * d - n * d_x) / (d * d), (n_z * d - n * d_z) / (d * d)))
}

/// A central-difference derivative estimate with its Richardson partner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalResidual {
    /// Richardson-extrapolated derivative of `F` along `(1, m)`.
    pub residual: C64,
    /// `|grad F|`, for scaling.
    pub gradient_norm: f64,
}

/// Smallest admissible finite-difference step.
pub const MIN_STEP: f64 = 1e-10;

/// Derivative of `F` along the direction `(1, m)` at `(x, z)`, by central
/// differences at steps `h` and `h/2` combined by Richardson extrapolation.
/// It vanishes when `m` is the leaf slope.
pub fn directional_derivative(x: C64, z: C64, m: C64, h: f64) -> Result<DirectionalResidual, CoreError> {
    if !(h >= MIN_STEP) {
        return Err(CoreError::StepUnderflow(h));
    }
    let central = |h: f64| -> Result<C64, CoreError> {
        let fwd = first_integral_value(x + h, z + m * h)?;
        let bwd = first_integral_value(x - h, z - m * h)?;
        Ok((fwd - bwd) / (2.0 * h))
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    let (gx, gz) = first_integral_gradient(x, z)?;
    Ok(DirectionalResidual {
        residual: (4.0 * fine - coarse) / 3.0,
        gradient_norm: (gx.norm_sqr() + gz.norm_sqr()).sqrt(),
    })
}

/// Invariance residual of `F` along the Riccati direction `(1, Z0)`.
pub fn first_integral_invariance_residual(x: C64, z: C64, h: f64) -> Result<DirectionalResidual, CoreError> {
    directional_derivative(x, z, slope_z0(x, z)?, h)
}

/// Local type of a singular point of the foliation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularityKind {
    /// Linear part is a nonzero multiple of the identity.
    Radial,
    /// Real positive eigenvalue ratio other than a radial point.
    Node,
    /// Real negative eigenvalue ratio.
    Saddle,
    Other,
}

/// One of the affine charts `(x or 1/x, z or 1/z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chart {
    pub base_inverted: bool,
    pub fiber_inverted: bool,
}

impl Chart {
    pub const ALL: [Chart; 4] = [
        Chart { base_inverted: false, fiber_inverted: false },
        Chart { base_inverted: false, fiber_inverted: true },
        Chart { base_inverted: true, fiber_inverted: false },
        Chart { base_inverted: true, fiber_inverted: true },
    ];

    pub fn name(self) -> &'static str {
        match (self.base_inverted, self.fiber_inverted) {
            (false, false) => "(x,z)",
            (false, true) => "(x,w=1/z)",
            (true, false) => "(u=1/x,z)",
            (true, true) => "(u=1/x,w=1/z)",
        }
    }

    fn to_global(self, a: C64, b: C64) -> (SpherePoint, SpherePoint) {
        let conv = |inv: bool, v: C64| {
            let p = SpherePoint::Finite(v);
            if inv {
                p.reciprocal()
            } else {
                p
            }
        };
        (conv(self.base_inverted, a), conv(self.fiber_inverted, b))
    }
}

/// `Omega = P dx + Q dz` rewritten in `var -> 1/var` coordinates, cleared of
/// denominators and of common powers of `var`. Variables keep their names:
/// `X` stands for the chart's base coordinate and `Z` for its fiber one.
pub fn reciprocal_chart(p: &MultiPoly, q: &MultiPoly, var: Var) -> (MultiPoly, MultiPoly) {
    let mono = |k: u32| {
        let mut m = [0; 5];
        m[var.index()] = k;
        MultiPoly::monomial(m, crate::ExactScalar::one())
    };
    // the differential of `var` picks up -1/var^2
    let (own, other) = match var {
        Var::X => (p, q),
        _ => (q, p),
    };
    let d = (own.degree_in(var) + 2).max(other.degree_in(var));
    let own_new = -&(&own.reciprocal_in(var) * &mono(d - 2 - own.degree_in(var)));
    let other_new = &other.reciprocal_in(var) * &mono(d - other.degree_in(var));
    let (mut pn, mut qn) = match var {
        Var::X => (own_new, other_new),
        _ => (other_new, own_new),
    };
    let (_, kp) = pn.strip_power_of(var);
    let (_, kq) = qn.strip_power_of(var);
    let k = kp.min(kq);
    if k > 0 {
        pn = pn.strip_power_of(var).0 * mono(kp - k);
        qn = qn.strip_power_of(var).0 * mono(kq - k);
    }
    (pn, qn)
}

/// `(P, Q)` of the foliation in the given chart.
pub fn chart_form(chart: Chart) -> (MultiPoly, MultiPoly) {
    let (mut p, mut q) = (identities::omega_p(), identities::omega_q());
    if chart.fiber_inverted {
        (p, q) = reciprocal_chart(&p, &q, Var::Z);
    }
    if chart.base_inverted {
        (p, q) = reciprocal_chart(&p, &q, Var::X);
    }
    (p, q)
}

/// A singular point with the linearization of the dual vector field
/// `(Q, -P)` in the chart where it was found.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityRecord {
    pub x: SpherePoint,
    pub z: SpherePoint,
    pub chart: Chart,
    pub local: (C64, C64),
    /// Row-major `[[dQ/dx, dQ/dz], [-dP/dx, -dP/dz]]`.
    pub linear_part: [C64; 4],
    /// Ordered with `|lambda_0| >= |lambda_1|`.
    pub eigenvalues: [C64; 2],
    pub ratio: C64,
    pub kind: SingularityKind,
}

/// All singular points of the foliation, found as the common zeros of both
/// coefficients over the fibers where `Q` vanishes, in all four charts.
pub fn analyze_singularities() -> Vec<SingularityRecord> {
    let mut out: Vec<SingularityRecord> = Vec::new();
    for chart in Chart::ALL {
        let (p, q) = chart_form(chart);
        debug_assert_eq!(q.degree_in(Var::Z), 0);
        let q_coeffs = q
            .univariate_c64(Var::X, &Assignment::new())
            .expect("Q depends on the base coordinate only");
        for a in polynomial_roots(&q_coeffs) {
            let a = snap(a);
            let fiber = Assignment::new().with(Var::X, a);
            let p_coeffs = p.univariate_c64(Var::Z, &fiber).expect("only x assigned");
            for b in polynomial_roots(&crate::upoly::trim(&p_coeffs, 1e-14)) {
                let b = snap(b);
                let (gx, gz) = chart.to_global(a, b);
                let seen = out.iter().any(|r| {
                    r.x.chordal_distance(gx) < 1e-9 && r.z.chordal_distance(gz) < 1e-9
                });
                if !seen {
                    out.push(linearize(chart, &p, &q, a, b, gx, gz));
                }
            }
        }
    }
    out
}

fn snap(v: C64) -> C64 {
    let r = c64(v.re.round(), v.im.round());
    let h = c64((2.0 * v.re).round() / 2.0, (2.0 * v.im).round() / 2.0);
    if (v - r).norm() < 1e-12 {
        r
    } else if (v - h).norm() < 1e-12 {
        h
    } else {
        v
    }
}

fn linearize(
    chart: Chart,
    p: &MultiPoly,
    q: &MultiPoly,
    a: C64,
    b: C64,
    gx: SpherePoint,
    gz: SpherePoint,
) -> SingularityRecord {
    let at = Assignment::new().with(Var::X, a).with(Var::Z, b);
    let ev = |poly: MultiPoly| poly.eval_c64(&at).expect("x and z assigned");
    let j = [
        ev(q.derivative(Var::X)),
        ev(q.derivative(Var::Z)),
        -ev(p.derivative(Var::X)),
        -ev(p.derivative(Var::Z)),
    ];
    let trace = j[0] + j[3];
    let det = j[0] * j[3] - j[1] * j[2];
    let r = solve_quadratic(c64(1.0, 0.0), -trace, det);
    let (mut l0, mut l1) = (r[0].expect("monic"), r[1].expect("monic"));
    if l1.norm() > l0.norm() {
        core::mem::swap(&mut l0, &mut l1);
    }
    let ratio = if l1.norm() > 0.0 { l0 / l1 } else { c64(f64::INFINITY, 0.0) };
    let scalar = j[1].norm() < 1e-12 && j[2].norm() < 1e-12 && (j[0] - j[3]).norm() < 1e-12;
    let kind = if scalar && j[0].norm() > 0.0 {
        SingularityKind::Radial
    } else if ratio.im.abs() < 1e-12 && ratio.re > 0.0 {
        SingularityKind::Node
    } else if ratio.im.abs() < 1e-12 && ratio.re < 0.0 {
        SingularityKind::Saddle
    } else {
        SingularityKind::Other
    };
    SingularityRecord {
        x: gx,
        z: gz,
        chart,
        local: (a, b),
        linear_part: j,
        eigenvalues: [l0, l1],
        ratio,
        kind,
    }
}

/// The three graphs `z0 = (t - X^2)/(2(t - X))`, `z1 = (t - X^2)/(2Y)` and
/// `z2 = -z1` over a point `(X, Y)`, which are Riccati leaves after pulling
/// back by `X -> x(2(X, Y))`.
pub fn psi_leaf_values(curve: &Curve<C64>, x: C64, y: C64) -> Result<[C64; 3], CoreError> {
    let t = *curve.t();
    let num = t - x * x;
    if is_pole(t - x, t.norm()) {
        return Err(CoreError::Degenerate("pullback leaf z0 has a pole at X = t"));
    }
    if is_pole(y, 1.0) {
        return Err(CoreError::Degenerate("pullback leaves z1, z2 have a pole at Y = 0"));
    }
    let z0 = num / (2.0 * (t - x));
    let z1 = num / (2.0 * y);
    Ok([z0, z1, -z1])
}

/// Data of the fiberwise part of the pullback over `(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiFrame {
    pub z0: C64,
    pub z1: C64,
    /// `mu = (z2 - z0)/(z2 - z1)`.
    pub mu: C64,
}

pub fn psi_frame(curve: &Curve<C64>, x: C64, y: C64) -> Result<PsiFrame, CoreError> {
    let [z0, z1, z2] = psi_leaf_values(curve, x, y)?;
    let den = z2 - z1;
    let mu = (z2 - z0) / den;
    if is_pole(den, z1.norm()) || is_pole(mu, 1.0) || !mu.is_finite() {
        return Err(CoreError::Degenerate("pullback frame is degenerate"));
    }
    Ok(PsiFrame { z0, z1, mu })
}

/// First component of the pullback, `x(2(X, Y))`.
pub fn psi_base(curve: &Curve<C64>, x: C64) -> Result<C64, CoreError> {
    curve.x_double_formula(&x)
}

/// `psi(X, Y, Z) = (x(2(X,Y)), (Z mu z1 - z0)/(Z mu - 1))`.
pub fn psi_map(curve: &Curve<C64>, x: C64, y: C64, z: SpherePoint) -> Result<(C64, SpherePoint), CoreError> {
    let base = psi_base(curve, x)?;
    let f = psi_frame(curve, x, y)?;
    let fiber = match z {
        SpherePoint::Infinity => SpherePoint::Finite(f.z1),
        SpherePoint::Finite(zz) => SpherePoint::from_homogeneous(zz * f.mu * f.z1 - f.z0, zz * f.mu - 1.0),
    };
    Ok((base, fiber))
}

/// Inverse of the fiber part of [`psi_map`]: `Z = (z - z0)/(mu (z - z1))`.
pub fn psi_fiber_inverse(curve: &Curve<C64>, x: C64, y: C64, z: C64) -> Result<SpherePoint, CoreError> {
    let f = psi_frame(curve, x, y)?;
    Ok(SpherePoint::from_homogeneous(z - f.z0, f.mu * (z - f.z1)))
}

/// `(Z^2 - 2Z + 2)^2 / (Z^2 (Z - 2)^2)`.
pub fn pulled_back_integral(z: C64) -> Result<C64, CoreError> {
    let den = z * z * (z - 2.0) * (z - 2.0);
    if is_pole(den, 1.0) {
        return Err(CoreError::Pole("pulled-back first integral"));
    }
    let n = z * z - 2.0 * z + 2.0;
    Ok(n * n / den)
}

/// Coefficients of `N(Z)` from the highest power down:
/// `(t-1, -4t+4, 4t-8, 8, -4)`.
pub fn double_star_coefficients(t: C64) -> [C64; 5] {
    [t - 1.0, -4.0 * t + 4.0, 4.0 * t - 8.0, c64(8.0, 0.0), c64(-4.0, 0.0)]
}

/// `(dZ/dX)^2 + N(Z) / (4X(X-1)(X-t))`.
pub fn ode_double_star_residual(x: C64, z: C64, dzdx: C64, t: C64) -> Result<C64, CoreError> {
    let den = 4.0 * x * (x - 1.0) * (x - t);
    if is_pole(den, 1.0) {
        return Err(CoreError::Pole("double-star equation"));
    }
    let n = double_star_coefficients(t)
        .iter()
        .fold(c64(0.0, 0.0), |acc, c| acc * z + c);
    Ok(dzdx * dzdx + n / den)
}

/// The square root of the cubic at `x2` closest to `y`, i.e. the value on
/// the same sheet when `x2` is close to the base of `y`.
pub fn continue_y_locally(curve: &Curve<C64>, y: C64, x2: C64) -> C64 {
    let y2 = curve.cubic(&x2).sqrt();
    if (y2 - y).norm() <= (y2 + y).norm() {
        y2
    } else {
        -y2
    }
}

/// Residual of the leaf property of the pulled-back graph `z_i(X)`:
/// `dz_i/dX - Z0(x(X), z_i) dx/dX`, by Richardson-extrapolated central
/// differences with step `h`.
pub fn psi_leaf_residual(curve: &Curve<C64>, x: C64, y: C64, which: usize, h: f64) -> Result<C64, CoreError> {
    if !(h >= MIN_STEP) {
        return Err(CoreError::StepUnderflow(h));
    }
    let at = |dx: f64| -> Result<(C64, C64), CoreError> {
        let x2 = x + dx;
        let y2 = continue_y_locally(curve, y, x2);
        Ok((curve.x_double_formula(&x2)?, psi_leaf_values(curve, x2, y2)?[which]))
    };
    let central = |h: f64| -> Result<(C64, C64), CoreError> {
        let (bp, zp) = at(h)?;
        let (bm, zm) = at(-h)?;
        Ok(((bp - bm) / (2.0 * h), (zp - zm) / (2.0 * h)))
    };
    let (b1, z1) = central(h)?;
    let (b2, z2) = central(h / 2.0)?;
    let dbase = (4.0 * b2 - b1) / 3.0;
    let dfiber = (4.0 * z2 - z1) / 3.0;
    let base = curve.x_double_formula(&x)?;
    let zi = psi_leaf_values(curve, x, y)?[which];
    Ok(dfiber - slope_z0(base, zi)? * dbase)
}

/// The image of `(X, Y)` under doubling, as a curve point.
pub fn doubled_point(curve: &Curve<C64>, x: C64, y: C64) -> CurvePoint<C64> {
    curve.double(&CurvePoint::affine(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::fiber_monodromy_maps;

    fn r(v: f64) -> C64 {
        c64(v, 0.0)
    }

    #[test]
    fn slope_values() {
        assert!((slope_z0(r(2.0), r(0.0)).unwrap() - r(-0.25)).norm() < 1e-15);
        assert!((slope_z0(r(4.0), r(2.0)).unwrap() - r(0.25)).norm() < 1e-15);
        assert!(matches!(slope_z0(r(1.0), r(0.5)), Err(CoreError::Pole(_))));
    }

    #[test]
    fn first_integral_values() {
        let f = |x: f64, z: f64| first_integral(r(x), SpherePoint::finite(z, 0.0)).unwrap();
        assert!(f(2.0, 0.0).chordal_distance(SpherePoint::finite(2.0, 0.0)) < 1e-15);
        assert!(f(4.0, 2.0).chordal_distance(SpherePoint::finite(1.0, 0.0)) < 1e-15);
        assert!(f(-3.0, 3.0).chordal_distance(SpherePoint::finite(0.0, 0.0)) < 1e-15);
        // ft(4/3, 2) = 0: the leaf ft = 0 is the level set F = inf
        assert!(f(4.0 / 3.0, 2.0).chordal_distance(SpherePoint::Infinity) < 1e-12);
        assert!(first_integral(r(5.0), SpherePoint::Infinity)
            .unwrap()
            .chordal_distance(SpherePoint::finite(5.0, 0.0))
            < 1e-15);
        assert!(matches!(
            first_integral(r(0.0), SpherePoint::finite(0.0, 0.0)),
            Err(CoreError::Indeterminate(_))
        ));
    }

    #[test]
    fn invariance_residuals() {
        let good = first_integral_invariance_residual(r(2.0), r(0.3), 1e-5).unwrap();
        assert!(good.residual.norm() < 1e-8 * good.gradient_norm);
        let z0 = slope_z0(r(2.0), r(0.3)).unwrap();
        let bad = directional_derivative(r(2.0), r(0.3), z0 + 1.0, 1e-5).unwrap();
        assert!(bad.residual.norm() > 1e-2 * bad.gradient_norm);
        assert!(matches!(
            first_integral_invariance_residual(r(2.0), r(0.3), 1e-13),
            Err(CoreError::StepUnderflow(_))
        ));
        // on f1: z^2 = x
        let on_leaf = first_integral_invariance_residual(r(3.0), r(3f64.sqrt()), 1e-5).unwrap();
        assert!(on_leaf.residual.norm() < 1e-8 * on_leaf.gradient_norm.max(1.0));
    }

    #[test]
    fn chart_forms() {
        use crate::poly::MultiPoly as M;
        let x = M::var(Var::X);
        let z = M::var(Var::Z);
        let (p, q) = chart_form(Chart { base_inverted: false, fiber_inverted: true });
        // P = w^2 x - 2wx + 2w - 1, Q = -4x(x-1)
        let ep = &(&(&(&z.pow(2) * &x) - &(&M::int(2) * &(&z * &x))) + &(&M::int(2) * &z)) - &M::int(1);
        assert_eq!(p, ep);
        assert_eq!(q, -&identities::omega_q());
        let (p, q) = chart_form(Chart { base_inverted: true, fiber_inverted: true });
        assert_eq!((p, q), (identities::omega_p(), identities::omega_q()));
    }

    #[test]
    fn singularity_catalog() {
        let s = analyze_singularities();
        assert_eq!(s.len(), 6);
        let find = |x: SpherePoint, z: SpherePoint| {
            s.iter()
                .find(|r| r.x.chordal_distance(x) < 1e-9 && r.z.chordal_distance(z) < 1e-9)
                .unwrap_or_else(|| panic!("missing ({x}, {z})"))
        };
        let inf = SpherePoint::Infinity;
        let p = |v: f64| SpherePoint::finite(v, 0.0);
        for (x, z) in [(p(0.0), p(0.0)), (p(1.0), p(1.0)), (inf, inf)] {
            let rec = find(x, z);
            assert_eq!(rec.kind, SingularityKind::Node);
            assert!((rec.ratio - 2.0).norm() < 1e-12);
        }
        for (x, z) in [(p(0.0), p(2.0)), (p(1.0), p(-1.0)), (inf, p(0.5))] {
            let rec = find(x, z);
            assert_eq!(rec.kind, SingularityKind::Saddle);
            assert!((rec.ratio + 2.0).norm() < 1e-12);
        }
        let origin = find(p(0.0), p(0.0));
        assert!((origin.eigenvalues[0] + 4.0).norm() < 1e-12);
        assert!((origin.eigenvalues[1] + 2.0).norm() < 1e-12);
    }

    #[test]
    fn monodromy_fixed_points_are_special_leaves() {
        let x0 = c64(1.7, -0.4);
        let maps = fiber_monodromy_maps(x0).unwrap();
        for (leaf, (_, m)) in SpecialLeaf::ALL.iter().zip(&maps[1..]) {
            for p in m.fixed_points() {
                assert!(leaf.eval(x0, p.value().unwrap()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pulled_back_integral_values() {
        assert!((pulled_back_integral(r(1.0)).unwrap() - 1.0).norm() < 1e-15);
        let z = c64(0.3, 0.8);
        let a = pulled_back_integral(z).unwrap();
        let b = pulled_back_integral(2.0 - z).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
        assert!(pulled_back_integral(r(2.0)).is_err());
    }

    #[test]
    fn psi_base_matches_doubling() {
        let e = Curve::new(r(4.0)).unwrap();
        assert!(psi_base(&e, r(2.0)).unwrap().norm() < 1e-14);
        let d = doubled_point(&e, r(2.0), c64(0.0, 2.0));
        assert!(d.x().unwrap().norm() < 1e-14);
        // X^2 = t collapses z0 and z1 to 0
        assert!(psi_map(&e, r(2.0), c64(0.0, 2.0), SpherePoint::finite(0.5, 0.0)).is_err());
    }

    #[test]
    fn psi_composed_with_f_is_the_printed_function() {
        let e = Curve::new(c64(2.0, 0.0)).unwrap();
        let p = e.sample_point(c64(0.4, 0.9));
        let (x, y) = (*p.x().unwrap(), *p.y().unwrap());
        for zz in [c64(0.3, 0.2), c64(-1.1, 0.5), c64(3.0, -0.7)] {
            let (bx, bz) = psi_map(&e, x, y, SpherePoint::Finite(zz)).unwrap();
            let lhs = first_integral(bx, bz).unwrap().value().unwrap();
            let rhs = pulled_back_integral(zz).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * rhs.norm());
            let back = psi_fiber_inverse(&e, x, y, bz.value().unwrap()).unwrap();
            assert!(back.chordal_distance(SpherePoint::Finite(zz)) < 1e-12);
        }
    }

    #[test]
    fn psi_leaves_are_riccati_leaves() {
        let e = Curve::new(c64(1.0, 1.0)).unwrap();
        let p = e.sample_point(c64(0.6, -0.8));
        let (x, y) = (*p.x().unwrap(), *p.y().unwrap());
        for which in 0..3 {
            assert!(psi_leaf_residual(&e, x, y, which, 1e-4).unwrap().norm() < 1e-7);
        }
    }

    #[test]
    fn double_star_shape() {
        let t = c64(2.0, 0.0);
        assert_eq!(double_star_coefficients(t), [r(1.0), r(-4.0), r(0.0), r(8.0), r(-4.0)]);
        let a = ode_double_star_residual(r(0.5), r(0.3), r(0.7), t).unwrap();
        let b = ode_double_star_residual(r(0.5), r(0.3), r(-0.7), t).unwrap();
        assert_eq!(a, b);
        assert!(ode_double_star_residual(r(1.0), r(0.3), r(0.7), t).is_err());
    }
}
