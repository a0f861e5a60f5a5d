//! Sections of self-intersection `+4` in the trivialization through the three
//! points `(p0, 0)`, `(p1, 1)` and `(p_inf, inf)`, the 2-web they cut out, its
//! discriminant, and the intersection point of two sections.
//!
//! A section is labeled by a point of the curve: generic sections by
//! `q = (x0, y0)` with `y0 != 0`, the diagonal `z = x` by the point at
//! infinity, and the constant sections by 2-torsion points through the
//! calibration `z = 0 <-> (1, 0)`, `z = 1 <-> (0, 0)`, `z = inf <-> (t, 0)`.

use alloc::vec::Vec;

use crate::curve::{Curve, CurvePoint, TwoTorsion};
use crate::moebius::SpherePoint;
use crate::riccati::{self, psi_frame, slope_z0};
use crate::roots::polynomial_roots;
use crate::{c64, CoreError, Field, C64};

/// A point `[num : den]` of `P^1` over a field.
#[derive(Debug, Clone, PartialEq)]
pub struct Proj<F> {
    pub num: F,
    pub den: F,
}

impl<F: Field> Proj<F> {
    pub fn finite(v: F) -> Self {
        Self { num: v, den: F::one() }
    }

    pub fn infinity() -> Self {
        Self { num: F::one(), den: F::zero() }
    }

    pub fn is_infinity(&self) -> bool {
        self.den.is_zeroish() && !self.num.is_zeroish()
    }

    /// The affine value, `None` at infinity.
    pub fn value(&self) -> Option<F> {
        self.num.over(&self.den)
    }

    /// Projective equality, compared in the chart where `self` has modulus
    /// at most one.
    pub fn near(&self, other: &Self) -> bool {
        let (a, b, c, d) = if self.num.magnitude() <= self.den.magnitude() {
            (&self.num, &self.den, &other.num, &other.den)
        } else {
            (&self.den, &self.num, &other.den, &other.num)
        };
        match (a.over(b), c.over(d)) {
            (Some(x), Some(y)) => x.near(&y),
            _ => false,
        }
    }

    pub fn to_sphere(&self) -> SpherePoint {
        SpherePoint::from_homogeneous(self.num.to_c64(), self.den.to_c64())
    }
}

/// The three constant sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstantSection {
    Zero,
    One,
    Infinity,
}

impl ConstantSection {
    pub const ALL: [ConstantSection; 3] = [
        ConstantSection::Zero,
        ConstantSection::One,
        ConstantSection::Infinity,
    ];

    /// The 2-torsion label of the constant section.
    pub fn torsion(self) -> TwoTorsion {
        match self {
            ConstantSection::Zero => TwoTorsion::One,
            ConstantSection::One => TwoTorsion::Zero,
            ConstantSection::Infinity => TwoTorsion::T,
        }
    }

    pub fn from_torsion(label: TwoTorsion) -> Option<Self> {
        match label {
            TwoTorsion::One => Some(ConstantSection::Zero),
            TwoTorsion::Zero => Some(ConstantSection::One),
            TwoTorsion::T => Some(ConstantSection::Infinity),
            TwoTorsion::Infinity => None,
        }
    }

    pub fn value<F: Field>(self) -> Proj<F> {
        match self {
            ConstantSection::Zero => Proj::finite(F::zero()),
            ConstantSection::One => Proj::finite(F::one()),
            ConstantSection::Infinity => Proj::infinity(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConstantSection::Zero => "z=0",
            ConstantSection::One => "z=1",
            ConstantSection::Infinity => "z=inf",
        }
    }
}

/// Label of a section.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionParam<F> {
    Generic { x0: F, y0: F },
    Diagonal,
    Constant(ConstantSection),
}

/// The special fibers `p0`, `p1`, `p_inf` with the marked points on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecialFiber {
    Zero,
    One,
    Infinity,
}

impl SpecialFiber {
    pub const ALL: [SpecialFiber; 3] = [SpecialFiber::Zero, SpecialFiber::One, SpecialFiber::Infinity];

    fn base<F: Field>(self) -> CurvePoint<F> {
        match self {
            SpecialFiber::Zero => CurvePoint::affine(F::zero(), F::zero()),
            SpecialFiber::One => CurvePoint::affine(F::one(), F::zero()),
            SpecialFiber::Infinity => CurvePoint::Infinity,
        }
    }
}

impl<F: Field> SectionParam<F> {
    /// The label as a curve point.
    pub fn label(&self, curve: &Curve<F>) -> CurvePoint<F> {
        match self {
            SectionParam::Generic { x0, y0 } => CurvePoint::affine(x0.clone(), y0.clone()),
            SectionParam::Diagonal => CurvePoint::Infinity,
            SectionParam::Constant(c) => curve.two_torsion_point(c.torsion()),
        }
    }

    /// The section with a given label.
    pub fn from_label(curve: &Curve<F>, p: &CurvePoint<F>) -> Self {
        match (p, curve.torsion_label(p)) {
            (CurvePoint::Infinity, _) => SectionParam::Diagonal,
            (_, Some(l)) => SectionParam::Constant(ConstantSection::from_torsion(l).expect("affine torsion")),
            (CurvePoint::Affine { x, y }, None) => SectionParam::Generic { x0: x.clone(), y0: y.clone() },
        }
    }

    /// Whether the section passes through the marked point of a special
    /// fiber.
    pub fn passes(&self, fiber: SpecialFiber) -> bool {
        match self {
            SectionParam::Generic { .. } | SectionParam::Diagonal => true,
            SectionParam::Constant(c) => matches!(
                (c, fiber),
                (ConstantSection::Zero, SpecialFiber::Zero)
                    | (ConstantSection::One, SpecialFiber::One)
                    | (ConstantSection::Infinity, SpecialFiber::Infinity)
            ),
        }
    }

    pub fn to_c64(&self) -> SectionParam<C64> {
        match self {
            SectionParam::Generic { x0, y0 } => SectionParam::Generic { x0: x0.to_c64(), y0: y0.to_c64() },
            SectionParam::Diagonal => SectionParam::Diagonal,
            SectionParam::Constant(c) => SectionParam::Constant(*c),
        }
    }

    /// Equality of labels up to [`Field::near`].
    pub fn near(&self, other: &Self) -> bool {
        match (self, other) {
            (SectionParam::Generic { x0: a, y0: b }, SectionParam::Generic { x0: c, y0: d }) => {
                a.near(c) && b.near(d)
            }
            (SectionParam::Diagonal, SectionParam::Diagonal) => true,
            (SectionParam::Constant(a), SectionParam::Constant(b)) => a == b,
            _ => false,
        }
    }
}

/// The graph value of a section over a point of the curve, as `[num : den]`.
///
/// Generic sections use `(1-x0)(y0 x - x0 y) / (y0 (x - x0))` away from the
/// fiber of `x0` and the equivalent
/// `(1-x0)(y0 (y + y0) - x0 S(x)) / (y0 (y + y0))`, with
/// `S(x) = x^2 + x x0 + x0^2 - (1+t)(x + x0) + t`, near it.
pub fn section_value<F: Field>(curve: &Curve<F>, s: &SectionParam<F>, p: &CurvePoint<F>) -> Proj<F> {
    let (x, y) = match p {
        CurvePoint::Infinity => {
            return match s {
                SectionParam::Constant(c) => c.value(),
                _ => Proj::infinity(),
            }
        }
        CurvePoint::Affine { x, y } => (x, y),
    };
    match s {
        SectionParam::Constant(c) => c.value(),
        SectionParam::Diagonal => Proj::finite(x.clone()),
        SectionParam::Generic { x0, y0 } => {
            let one_minus = F::one().minus(x0);
            let dx = x.minus(x0);
            let sy = y.plus(y0);
            // each form is exact on the curve; pick the better conditioned denominator
            let rel_dx = dx.magnitude() / 1f64.max(x.magnitude()).max(x0.magnitude());
            let rel_sy = sy.magnitude() / 1f64.max(y.magnitude()).max(y0.magnitude());
            if !dx.is_zeroish() && (rel_dx >= 0.1 * rel_sy || sy.is_zeroish()) {
                Proj {
                    num: one_minus.times(&y0.times(x).minus(&x0.times(y))),
                    den: y0.times(&dx),
                }
            } else {
                let one_plus_t = F::one().plus(curve.t());
                let s_x = x
                    .square()
                    .plus(&x.times(x0))
                    .plus(&x0.square())
                    .minus(&one_plus_t.times(&x.plus(x0)))
                    .plus(curve.t());
                Proj {
                    num: one_minus.times(&y0.times(&sy).minus(&x0.times(&s_x))),
                    den: y0.times(&sy),
                }
            }
        }
    }
}

/// `dz/dx` along a section at a point where its value is finite:
/// `(1-a-z)/(x-a) + (z + (a-1)x/(x-a)) (3x^2 - 2(1+t)x + t)/(2x(x-1)(x-t))`
/// for the generic section with `x0 = a`.
pub fn section_slope(curve: &Curve<C64>, s: &SectionParam<C64>, p: &CurvePoint<C64>) -> Result<C64, CoreError> {
    match s {
        SectionParam::Constant(_) => Ok(c64(0.0, 0.0)),
        SectionParam::Diagonal => Ok(c64(1.0, 0.0)),
        SectionParam::Generic { x0: a, .. } => {
            let x = *p.x().ok_or(CoreError::Pole("section slope at infinity"))?;
            let z = section_value(curve, s, p)
                .value()
                .ok_or(CoreError::Pole("section slope where the section is infinite"))?;
            generic_slope(curve, *a, x, z)
        }
    }
}

fn generic_slope(curve: &Curve<C64>, a: C64, x: C64, z: C64) -> Result<C64, CoreError> {
    let dxa = x - a;
    let cub = curve.cubic(&x);
    if dxa.norm() <= 1e-14 * (1.0 + x.norm()) || cub.norm() <= 1e-14 {
        return Err(CoreError::Pole("section slope"));
    }
    let r = curve.cubic_derivative(&x) / (2.0 * cub);
    Ok((1.0 - a - z) / dxa + (z + (a - 1.0) * x / dxa) * r)
}

/// The two sections of the web through a point, with residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct WebSolveResult<F> {
    pub sections: [SectionParam<F>; 2],
    /// Largest chordal distance between a returned graph and the query value.
    pub graph_residual: f64,
    /// Largest relative residual of the recovered labels on the curve.
    pub curve_residual: f64,
}

/// Roots of `a w^2 + b w + c` over the field, `None` when the square root of
/// the discriminant is not in the field.
fn field_quadratic<F: Field>(a: &F, b: &F, c: &F) -> Result<[F; 2], CoreError> {
    let disc = b.square().minus(&F::from_i64(4).times(a).times(c));
    let s = disc.sqrt().ok_or(CoreError::IrrationalRoots)?;
    let plus = b.plus(&s);
    let minus = b.minus(&s);
    let big = if plus.magnitude() >= minus.magnitude() { plus } else { minus };
    if big.is_zeroish() {
        return Ok([F::zero(), F::zero()]);
    }
    let q = big.negated().over(&F::from_i64(2)).expect("2 is invertible");
    let r1 = q.over(a).ok_or(CoreError::Degenerate("quadratic has vanishing leading coefficient"))?;
    let r2 = c.over(&q).expect("q nonzero");
    Ok([r1, r2])
}

/// Recovers `y0` for the generic section with parameter `x0` through
/// `(u, v, z)`: `y0 = (1-x0) x0 v / ((1-x0) u - z (u - x0))`.
pub fn recover_y0<F: Field>(x0: &F, u: &F, v: &F, z: &F) -> Result<F, CoreError> {
    let one_minus = F::one().minus(x0);
    let num = one_minus.times(x0).times(v);
    let den = one_minus.times(u).minus(&z.times(&u.minus(x0)));
    num.over(&den).ok_or(CoreError::Degenerate("section label recovery has a vanishing denominator"))
}

fn label_residual<F: Field>(curve: &Curve<F>, x0: &F, y0: &F) -> f64 {
    let lhs = y0.square();
    let rhs = curve.cubic(x0);
    let scale = 1f64.max(lhs.magnitude()).max(rhs.magnitude());
    lhs.minus(&rhs).magnitude() / scale
}

/// Chordal distance of two projective values, formed in the field so that it
/// vanishes exactly for equal exact values.
fn chordal_in_field<F: Field>(a: &Proj<F>, b: &Proj<F>) -> f64 {
    let cross = a.num.times(&b.den).minus(&b.num.times(&a.den)).magnitude();
    let na = a.num.magnitude().hypot(a.den.magnitude());
    let nb = b.num.magnitude().hypot(b.den.magnitude());
    if cross == 0.0 {
        0.0
    } else {
        cross / (na * nb)
    }
}

/// Tolerance on the recovered label for the numeric solver.
pub const LABEL_TOL: f64 = 1e-8;

/// The two sections through `(u, v, z)`, `v != 0`.
///
/// Away from `z = u` and `z = inf` the labels solve
/// `A x0^2 + B x0 + C = 0` with `A = (u-z)^2`,
/// `B = (-t-u) z^2 + 2u(t+1) z - u(t+u)`, `C = t u (z-1)^2`; roots at
/// 2-torsion abscissae are constant sections.
pub fn sections_through<F: Field>(
    curve: &Curve<F>,
    u: &F,
    v: &F,
    z: &Proj<F>,
) -> Result<WebSolveResult<F>, CoreError> {
    if v.is_zeroish() {
        return Err(CoreError::Degenerate("query point is 2-torsion"));
    }
    let t = curve.t();
    let sections: [SectionParam<F>; 2] = if z.is_infinity() {
        [
            SectionParam::Constant(ConstantSection::Infinity),
            SectionParam::Generic { x0: u.clone(), y0: v.negated() },
        ]
    } else {
        let zv = z.value().expect("finite");
        if zv.near(u) {
            let x0 = t
                .times(&u.minus(&F::one()))
                .over(&u.minus(t))
                .ok_or(CoreError::Degenerate("query point lies over x = t"))?;
            let y0 = recover_y0(&x0, u, v, &zv)?;
            [SectionParam::Diagonal, SectionParam::Generic { x0, y0 }]
        } else {
            let one = F::one();
            let a = u.minus(&zv).square();
            let t_plus_u = t.plus(u);
            let b = t_plus_u
                .negated()
                .times(&zv.square())
                .plus(&F::from_i64(2).times(u).times(&t.plus(&one)).times(&zv))
                .minus(&u.times(&t_plus_u));
            let c = t.times(u).times(&zv.minus(&one).square());
            let roots = field_quadratic(&a, &b, &c)?;
            let mut out = Vec::with_capacity(2);
            for r in roots {
                let torsion = [TwoTorsion::Zero, TwoTorsion::One, TwoTorsion::T]
                    .into_iter()
                    .find(|l| curve.two_torsion_point(*l).x().expect("affine").near(&r));
                match torsion {
                    Some(l) => out.push(SectionParam::Constant(
                        ConstantSection::from_torsion(l).expect("affine torsion"),
                    )),
                    None => {
                        let y0 = recover_y0(&r, u, v, &zv)?;
                        out.push(SectionParam::Generic { x0: r, y0 });
                    }
                }
            }
            [out[0].clone(), out[1].clone()]
        }
    };
    let base = CurvePoint::affine(u.clone(), v.clone());
    let mut graph_residual = 0f64;
    let mut curve_residual = 0f64;
    for s in &sections {
        let value = section_value(curve, s, &base);
        let d = chordal_in_field(&value, z);
        graph_residual = graph_residual.max(d);
        if let SectionParam::Generic { x0, y0 } = s {
            curve_residual = curve_residual.max(label_residual(curve, x0, y0));
        }
    }
    if curve_residual > LABEL_TOL {
        return Err(CoreError::InconsistentSection { residual: curve_residual });
    }
    Ok(WebSolveResult { sections, graph_residual, curve_residual })
}

/// Slopes `(Z1, Z2)` of the two web sections through `(u, v, z)`, `z` finite.
pub fn web_slopes(curve: &Curve<C64>, u: C64, v: C64, z: C64) -> Result<(C64, C64), CoreError> {
    let res = sections_through(curve, &u, &v, &Proj::finite(z))?;
    let p = CurvePoint::affine(u, v);
    let slope = |s: &SectionParam<C64>| match s {
        SectionParam::Generic { x0, .. } => generic_slope(curve, *x0, u, z),
        _ => section_slope(curve, s, &p),
    };
    Ok((slope(&res.sections[0])?, slope(&res.sections[1])?))
}

/// Constant coefficient of the 2-web equation
/// `m^2 - 2 Z0 m + P = 0`: the reconstructed
/// `z(z-1)((2tx - x^2 - t) z - x^3 + 2x^2 - tx) / (4x^2(x-1)^2(t-x))`, or the
/// printed variant whose last factor ends in `- x^3 + x^2 - tx + 2`.
pub fn web_constant_coefficient(t: C64, x: C64, z: C64, printed: bool) -> Result<C64, CoreError> {
    let den = 4.0 * x * x * (x - 1.0) * (x - 1.0) * (t - x);
    if den.norm() <= 1e-14 {
        return Err(CoreError::Pole("2-web equation"));
    }
    let lead = 2.0 * t * x - x * x - t;
    let tail = if printed {
        -x * x * x + x * x - t * x + 2.0
    } else {
        -x * x * x + 2.0 * x * x - t * x
    };
    Ok(z * (z - 1.0) * (lead * z + tail) / den)
}

/// `m^2 - 2 Z0 m + P(x, z)`.
pub fn two_web_ode_residual(t: C64, x: C64, z: C64, m: C64, printed: bool) -> Result<C64, CoreError> {
    let z0 = slope_z0(x, z)?;
    Ok(m * m - 2.0 * z0 * m + web_constant_coefficient(t, x, z, printed)?)
}

/// `Delta(u, z) = (t-u) z^4 - 4(t-1) u z^3 + 2u(2tu + t - u - 2) z^2
/// - 4u^2(t-1) z + u^2(t-u)`, lowest power first.
pub fn delta_coefficients(t: C64, u: C64) -> [C64; 5] {
    [
        u * u * (t - u),
        -4.0 * u * u * (t - 1.0),
        2.0 * u * (2.0 * t * u + t - u - 2.0),
        -4.0 * (t - 1.0) * u,
        t - u,
    ]
}

pub fn discriminant_delta(t: C64, u: C64, z: C64) -> C64 {
    crate::upoly::eval(&delta_coefficients(t, u), z)
}

/// The four roots of `Delta(u, .)` with multiplicity; a vanishing leading
/// coefficient (at `u = t`) contributes roots at infinity.
pub fn delta_roots(t: C64, u: C64) -> Vec<SpherePoint> {
    let coeffs = delta_coefficients(t, u);
    let trimmed = crate::upoly::trim(&coeffs, 1e-13);
    let mut out: Vec<SpherePoint> = polynomial_roots(&trimmed)
        .into_iter()
        .map(SpherePoint::Finite)
        .collect();
    while out.len() < 4 {
        out.push(SpherePoint::Infinity);
    }
    out
}

/// Largest `|F(u, z_i) - t| / |t|` over the finite roots of `Delta(u, .)`.
pub fn delta_leaf_check(t: C64, u: C64) -> Result<f64, CoreError> {
    let mut worst = 0f64;
    for r in delta_roots(t, u) {
        if let SpherePoint::Finite(z) = r {
            let f = riccati::first_integral_value(u, z)?;
            worst = worst.max((f - t).norm() / t.norm());
        }
    }
    Ok(worst)
}

/// `sigma.sigma = sigma'.sigma' + sum eps_i` with `eps_i = -1` when the
/// section passes through the `i`-th center and `+1` otherwise.
pub fn self_intersection_update(self_int: i64, passes: [bool; 3]) -> i64 {
    self_int + passes.iter().map(|p| if *p { -1 } else { 1 }).sum::<i64>()
}

/// Dense polynomial over a field, lowest degree first.
type FPoly<F> = Vec<F>;

fn fp_trim<F: Field>(mut p: FPoly<F>) -> FPoly<F> {
    let scale = p.iter().map(|c| c.magnitude()).fold(0.0, f64::max);
    while let Some(last) = p.last() {
        if last.is_zeroish() || last.magnitude() <= 1e-11 * scale {
            p.pop();
        } else {
            break;
        }
    }
    p
}

fn fp_add<F: Field>(a: &[F], b: &[F]) -> FPoly<F> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(F::zero);
            let y = b.get(k).cloned().unwrap_or_else(F::zero);
            x.plus(&y)
        })
        .collect()
}

fn fp_neg<F: Field>(a: &[F]) -> FPoly<F> {
    a.iter().map(F::negated).collect()
}

fn fp_mul<F: Field>(a: &[F], b: &[F]) -> FPoly<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = alloc::vec![F::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].plus(&x.times(y));
        }
    }
    out
}

fn fp_eval<F: Field>(p: &[F], x: &F) -> F {
    p.iter().rev().fold(F::zero(), |acc, c| acc.times(x).plus(c))
}

/// Quotient by `(x - r)` and remainder.
fn fp_deflate<F: Field>(p: &[F], r: &F) -> (FPoly<F>, F) {
    if p.is_empty() {
        return (Vec::new(), F::zero());
    }
    let n = p.len();
    let mut q = alloc::vec![F::zero(); n - 1];
    let mut carry = p[n - 1].clone();
    for k in (0..n - 1).rev() {
        q[k] = carry.clone();
        carry = p[k].plus(&carry.times(r));
    }
    (q, carry)
}

/// `num + y * num_y` over `den + y * den_y`, coefficients polynomials in `x`.
struct LinearInY<F> {
    n0: FPoly<F>,
    n1: FPoly<F>,
    d0: FPoly<F>,
    d1: FPoly<F>,
}

fn section_linear_form<F: Field>(s: &SectionParam<F>) -> LinearInY<F> {
    let (zero, one) = (F::zero(), F::one());
    match s {
        SectionParam::Generic { x0, y0 } => {
            let k = one.minus(x0);
            LinearInY {
                n0: alloc::vec![zero.clone(), k.times(y0)],
                n1: alloc::vec![k.times(x0).negated()],
                d0: alloc::vec![y0.times(x0).negated(), y0.clone()],
                d1: Vec::new(),
            }
        }
        SectionParam::Diagonal => LinearInY {
            n0: alloc::vec![zero, one.clone()],
            n1: Vec::new(),
            d0: alloc::vec![one],
            d1: Vec::new(),
        },
        SectionParam::Constant(c) => {
            let v: Proj<F> = c.value();
            LinearInY {
                n0: alloc::vec![v.num],
                n1: Vec::new(),
                d0: alloc::vec![v.den],
                d1: Vec::new(),
            }
        }
    }
}

/// Degree of the map `C -> P^1` given by the section.
fn section_degree<F>(s: &SectionParam<F>) -> i64 {
    match s {
        SectionParam::Constant(_) => 0,
        _ => 2,
    }
}

/// The base point of the unique intersection of two distinct sections (after
/// the elementary transformations at the three marked points).
///
/// The affine intersections in the trivialization are the zeros of
/// `E = N1 D2 - N2 D1 = e(x) + y f(x)`, read off from its norm
/// `R = e^2 - f^2 x(x-1)(x-t)`. Common zeros of a generic section's numerator
/// and denominator at its own label are spurious; intersections at a marked
/// point both sections pass through are removed by the blow-up; special
/// fibers that neither section passes through contribute a new intersection.
pub fn intersection_base_point<F: Field>(
    curve: &Curve<F>,
    s1: &SectionParam<F>,
    s2: &SectionParam<F>,
) -> Result<CurvePoint<F>, CoreError> {
    if s1.near(s2) {
        return Err(CoreError::SameSection);
    }
    let a = section_linear_form(s1);
    let b = section_linear_form(s2);
    let cubic = {
        let t = curve.t();
        // x^3 - (1+t) x^2 + t x
        alloc::vec![F::zero(), t.clone(), F::one().plus(t).negated(), F::one()]
    };
    // (n0 + y n1)(d0' + y d1') with y^2 = cubic
    let prod = |n0: &[F], n1: &[F], d0: &[F], d1: &[F]| -> (FPoly<F>, FPoly<F>) {
        let e = fp_add(&fp_mul(n0, d0), &fp_mul(&fp_mul(n1, d1), &cubic));
        let f = fp_add(&fp_mul(n0, d1), &fp_mul(n1, d0));
        (e, f)
    };
    let (e1, f1) = prod(&a.n0, &a.n1, &b.d0, &b.d1);
    let (e2, f2) = prod(&b.n0, &b.n1, &a.d0, &a.d1);
    let e = fp_trim(fp_add(&e1, &fp_neg(&e2)));
    let f = fp_trim(fp_add(&f1, &fp_neg(&f2)));
    if e.is_empty() && f.is_empty() {
        return Err(CoreError::SameSection);
    }
    let r = fp_trim(fp_add(&fp_mul(&e, &e), &fp_neg(&fp_mul(&fp_mul(&f, &f), &cubic))));
    let deg_r = r.len() as i64 - 1;

    let mut rem = r;
    let mut spurious = 0i64;
    let deflate = |rem: &mut FPoly<F>, root: &F| -> Result<(), CoreError> {
        let (q, remainder) = fp_deflate(rem, root);
        let scale = rem.iter().map(|c| c.magnitude()).fold(0.0, f64::max) * (1.0 + root.magnitude()).powi(rem.len() as i32);
        if !(remainder.is_zeroish() || remainder.magnitude() <= 1e-9 * scale) {
            return Err(CoreError::Degenerate("expected intersection root is missing"));
        }
        *rem = q;
        Ok(())
    };
    for s in [s1, s2] {
        if let SectionParam::Generic { x0, .. } = s {
            deflate(&mut rem, x0)?;
            spurious += 1;
        }
    }
    for (fiber, root) in [(SpecialFiber::Zero, F::zero()), (SpecialFiber::One, F::one())] {
        if s1.passes(fiber) && s2.passes(fiber) {
            deflate(&mut rem, &root)?;
        }
    }
    let mut at_infinity = section_degree(s1) + section_degree(s2) - (deg_r - spurious);
    if s1.passes(SpecialFiber::Infinity) && s2.passes(SpecialFiber::Infinity) {
        at_infinity -= 1;
    }
    let mut found: Vec<CurvePoint<F>> = Vec::new();
    for fiber in SpecialFiber::ALL {
        if !s1.passes(fiber) && !s2.passes(fiber) {
            found.push(fiber.base());
        }
    }
    for _ in 0..at_infinity.max(0) {
        found.push(CurvePoint::Infinity);
    }
    let affine = rem.len() as i64 - 1;
    if affine == 1 {
        let xp = rem[0].negated().over(&rem[1]).expect("degree one");
        found.push(point_over(curve, s1, s2, &e, &f, xp)?);
    }
    if found.len() != 1 || affine > 1 || at_infinity < 0 {
        return Err(CoreError::Degenerate("intersection count differs from one"));
    }
    Ok(found.pop().expect("one point"))
}

/// The point over `xp` where the two sections agree.
fn point_over<F: Field>(
    curve: &Curve<F>,
    s1: &SectionParam<F>,
    s2: &SectionParam<F>,
    e: &[F],
    f: &[F],
    xp: F,
) -> Result<CurvePoint<F>, CoreError> {
    let fv = fp_eval(f, &xp);
    let ev = fp_eval(e, &xp);
    let scale = 1f64.max(fv.magnitude()).max(ev.magnitude());
    if !fv.is_zeroish() && fv.magnitude() > 1e-9 * scale {
        let y = ev.negated().over(&fv).expect("f nonzero");
        return Ok(CurvePoint::affine(xp, y));
    }
    // e and f both vanish: pick the sheet on which the graphs agree
    let y = curve.cubic(&xp).sqrt().ok_or(CoreError::IrrationalRoots)?;
    let mismatch = |y: &F| {
        let p = CurvePoint::affine(xp.clone(), y.clone());
        let a = section_value(curve, s1, &p);
        let b = section_value(curve, s2, &p);
        if a.near(&b) {
            0.0
        } else {
            a.to_sphere().chordal_distance(b.to_sphere())
        }
    };
    let neg = y.negated();
    if mismatch(&y) <= mismatch(&neg) {
        Ok(CurvePoint::affine(xp, y))
    } else {
        Ok(CurvePoint::affine(xp, neg))
    }
}

/// The offset `q1 + q2 + p` of the intersection law, which the calibration
/// predicts to be `(t, 0)` for every pair.
pub fn intersection_offset<F: Field>(
    curve: &Curve<F>,
    s1: &SectionParam<F>,
    s2: &SectionParam<F>,
) -> Result<CurvePoint<F>, CoreError> {
    let p = intersection_base_point(curve, s1, s2)?;
    Ok(curve.add(&curve.add(&s1.label(curve), &s2.label(curve)), &p))
}

/// The 2-torsion abscissae that occur as roots of the label quadratic at
/// `z = 0`, `z = 1` and, homogenized, at `z = inf`, for a query point
/// `(u, v)`. The calibration holds when each constant section's torsion label
/// is among the roots for its own value.
pub fn calibrate_constants(curve: &Curve<C64>, u: C64, v: C64) -> Result<[(ConstantSection, Vec<TwoTorsion>); 3], CoreError> {
    let mut out = [
        (ConstantSection::Zero, Vec::new()),
        (ConstantSection::One, Vec::new()),
        (ConstantSection::Infinity, Vec::new()),
    ];
    for (c, found) in out.iter_mut() {
        let res = sections_through(curve, &u, &v, &c.value())?;
        for s in res.sections {
            if let SectionParam::Constant(k) = s {
                found.push(k.torsion());
            }
        }
    }
    Ok(out)
}

/// Derivative of `x(2(X, Y))` in `X`.
fn double_x_derivative(curve: &Curve<C64>, x: C64) -> Result<C64, CoreError> {
    let cub = curve.cubic(&x);
    if cub.norm() <= 1e-14 {
        return Err(CoreError::Pole("derivative of the doubling map"));
    }
    let d = curve.cubic_derivative(&x);
    let dd = 6.0 * x - 2.0 * (1.0 + curve.t());
    Ok(d * dd / (2.0 * cub) - d * d * d / (4.0 * cub * cub) - 2.0)
}

/// The two web slopes at `psi(X, Y, Z)`, transported to `dZ/dX` by the chain
/// rule through the inverse of the fiber map.
pub fn pulled_back_web_slopes(curve: &Curve<C64>, x: C64, y: C64, z: C64, h: f64) -> Result<[C64; 2], CoreError> {
    let doubled = riccati::doubled_point(curve, x, y);
    let (bx, by) = match doubled {
        CurvePoint::Affine { x, y } => (x, y),
        CurvePoint::Infinity => return Err(CoreError::Degenerate("doubled point at infinity")),
    };
    let frame = psi_frame(curve, x, y)?;
    let (_, bz) = riccati::psi_map(curve, x, y, SpherePoint::Finite(z))?;
    let bz = bz.value().ok_or(CoreError::Pole("pulled-back fiber value"))?;
    let (m1, m2) = web_slopes(curve, bx, by, bz)?;
    // G(X, z) = (z - z0(X)) / (mu(X)(z - z1(X))) at fixed z
    let g = |dx: f64| -> Result<C64, CoreError> {
        let x2 = x + dx;
        let y2 = riccati::continue_y_locally(curve, y, x2);
        let f = psi_frame(curve, x2, y2)?;
        Ok((bz - f.z0) / (f.mu * (bz - f.z1)))
    };
    let central = |h: f64| -> Result<C64, CoreError> { Ok((g(h)? - g(-h)?) / (2.0 * h)) };
    let g_x = (4.0 * central(h / 2.0)? - central(h)?) / 3.0;
    let g_z = (frame.z0 - frame.z1) / (frame.mu * (bz - frame.z1) * (bz - frame.z1));
    let dbase = double_x_derivative(curve, x)?;
    Ok([g_x + g_z * m1 * dbase, g_x + g_z * m2 * dbase])
}
