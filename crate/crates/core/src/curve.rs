//! The curve `y^2 = x(x-1)(x-t)` and its group law with the point at
//! infinity as identity.

use rand::Rng;

use crate::{c64, CoreError, Field, C64};

/// A point of the curve: affine or the point at infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvePoint<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F: Field> CurvePoint<F> {
    pub fn affine(x: F, y: F) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            CurvePoint::Affine { x, .. } => Some(x),
            CurvePoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            CurvePoint::Affine { y, .. } => Some(y),
            CurvePoint::Infinity => None,
        }
    }

    pub fn to_c64(&self) -> CurvePoint<C64> {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.to_c64(), y.to_c64()),
        }
    }

    /// Equality up to [`Field::near`].
    pub fn near(&self, other: &Self) -> bool {
        match (self, other) {
            (CurvePoint::Infinity, CurvePoint::Infinity) => true,
            (CurvePoint::Affine { x: a, y: b }, CurvePoint::Affine { x: c, y: d }) => {
                a.near(c) && b.near(d)
            }
            _ => false,
        }
    }
}

/// The four points of order dividing two, named by their `x`-coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TwoTorsion {
    Infinity,
    Zero,
    One,
    T,
}

impl TwoTorsion {
    pub const ALL: [TwoTorsion; 4] = [
        TwoTorsion::Infinity,
        TwoTorsion::Zero,
        TwoTorsion::One,
        TwoTorsion::T,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TwoTorsion::Infinity => "inf",
            TwoTorsion::Zero => "0",
            TwoTorsion::One => "1",
            TwoTorsion::T => "t",
        }
    }

    /// Group law on labels (Klein four-group).
    pub fn plus(self, other: TwoTorsion) -> TwoTorsion {
        use TwoTorsion::*;
        match (self, other) {
            (Infinity, o) | (o, Infinity) => o,
            (a, b) if a == b => Infinity,
            (Zero, One) | (One, Zero) => T,
            (Zero, T) | (T, Zero) => One,
            _ => Zero,
        }
    }
}

/// The curve with a fixed smooth parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve<F> {
    t: F,
}

impl<F: Field> Curve<F> {
    pub fn new(t: F) -> Result<Self, CoreError> {
        if t.is_zeroish() || t.near(&F::one()) {
            return Err(CoreError::SingularCurve);
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> &F {
        &self.t
    }

    /// `x(x-1)(x-t)`.
    pub fn cubic(&self, x: &F) -> F {
        x.times(&x.minus(&F::one())).times(&x.minus(&self.t))
    }

    /// `3x^2 - 2(1+t)x + t`.
    pub fn cubic_derivative(&self, x: &F) -> F {
        let one_plus_t = F::one().plus(&self.t);
        F::from_i64(3)
            .times(&x.square())
            .minus(&F::from_i64(2).times(&one_plus_t).times(x))
            .plus(&self.t)
    }

    pub fn on_curve(&self, p: &CurvePoint<F>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => y.square().near(&self.cubic(x)),
        }
    }

    pub fn point(&self, x: F, y: F) -> Result<CurvePoint<F>, CoreError> {
        let p = CurvePoint::affine(x, y);
        if self.on_curve(&p) {
            Ok(p)
        } else {
            Err(CoreError::Degenerate("point is not on the curve"))
        }
    }

    pub fn two_torsion_point(&self, label: TwoTorsion) -> CurvePoint<F> {
        match label {
            TwoTorsion::Infinity => CurvePoint::Infinity,
            TwoTorsion::Zero => CurvePoint::affine(F::zero(), F::zero()),
            TwoTorsion::One => CurvePoint::affine(F::one(), F::zero()),
            TwoTorsion::T => CurvePoint::affine(self.t.clone(), F::zero()),
        }
    }

    pub fn two_torsion(&self) -> [CurvePoint<F>; 4] {
        TwoTorsion::ALL.map(|l| self.two_torsion_point(l))
    }

    pub fn torsion_label(&self, p: &CurvePoint<F>) -> Option<TwoTorsion> {
        TwoTorsion::ALL
            .into_iter()
            .find(|l| self.two_torsion_point(*l).near(p))
    }

    pub fn neg(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), y.negated()),
        }
    }

    pub fn add(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        if x1.near(x2) {
            if y1.plus(y2).is_zeroish() {
                return CurvePoint::Infinity;
            }
            return self.double(p);
        }
        let lambda = y2.minus(y1).over(&x2.minus(x1)).expect("distinct x");
        self.chord_point(&lambda, x1, y1, x2)
    }

    fn chord_point(&self, lambda: &F, x1: &F, y1: &F, x2: &F) -> CurvePoint<F> {
        let x3 = lambda
            .square()
            .plus(&F::one().plus(&self.t))
            .minus(x1)
            .minus(x2);
        let y3 = lambda.times(&x1.minus(&x3)).minus(y1);
        CurvePoint::affine(x3, y3)
    }

    fn tangent_slope(&self, x: &F, y: &F) -> Option<F> {
        self.cubic_derivative(x).over(&F::from_i64(2).times(y))
    }

    /// Tangent-line doubling; points with `y = 0` double to infinity.
    pub fn double(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                if y.is_zeroish() {
                    return CurvePoint::Infinity;
                }
                let lambda = self.tangent_slope(x, y).expect("y nonzero");
                self.chord_point(&lambda, x, y, x)
            }
        }
    }

    /// The doubling formula with the signs as printed,
    /// `x~ = l^2 - (1+t) - 2x`, `y~ = l x - x~ - y`. Kept only to detect that
    /// it leaves the curve.
    pub fn double_printed(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                if y.is_zeroish() {
                    return CurvePoint::Infinity;
                }
                let lambda = self.tangent_slope(x, y).expect("y nonzero");
                let xt = lambda
                    .square()
                    .minus(&F::one().plus(&self.t))
                    .minus(&F::from_i64(2).times(x));
                let yt = lambda.times(x).minus(&xt).minus(y);
                CurvePoint::affine(xt, yt)
            }
        }
    }

    /// `n * p` by double-and-add.
    pub fn mul(&self, n: i64, p: &CurvePoint<F>) -> CurvePoint<F> {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.double(&base);
            k >>= 1;
        }
        acc
    }

    /// `x` of `2(x, y)` as a function of `x` alone:
    /// `(3x^2 - 2(t+1)x + t)^2 / (4x(x-1)(x-t)) + (1+t) - 2x`.
    pub fn x_double_formula(&self, x: &F) -> Result<F, CoreError> {
        let num = self.cubic_derivative(x).square();
        let den = F::from_i64(4).times(&self.cubic(x));
        let q = num.over(&den).ok_or(CoreError::Pole("x-coordinate of doubling"))?;
        Ok(q.plus(&F::one().plus(&self.t)).minus(&F::from_i64(2).times(x)))
    }
}

/// Magnitude beyond which points are checked in the chart at infinity.
pub const PUISEUX_THRESHOLD: f64 = 1e6;

impl Curve<C64> {
    /// Relative residual of the curve equation. Far out, the residual is
    /// measured in the chart `(s, w) = (x/y, 1/y)`, where the curve reads
    /// `w = s^3 - (1+t) s^2 w + t s w^2`.
    pub fn relative_residual(&self, p: &CurvePoint<C64>) -> f64 {
        match p {
            CurvePoint::Infinity => 0.0,
            CurvePoint::Affine { x, y } => {
                if x.norm() > PUISEUX_THRESHOLD && y.norm() > 0.0 {
                    let s = x / y;
                    let w = y.inv();
                    let r = w - s.powu(3) + (1.0 + self.t) * s * s * w - self.t * s * w * w;
                    let scale = w.norm().max(s.norm().powi(3)).max(f64::MIN_POSITIVE);
                    r.norm() / scale
                } else {
                    let r = y * y - self.cubic(x);
                    let scale = 1f64.max((y * y).norm()).max(x.norm().powi(3));
                    r.norm() / scale
                }
            }
        }
    }

    pub fn on_curve_tol(&self, p: &CurvePoint<C64>, tol: f64) -> bool {
        self.relative_residual(p) <= tol
    }

    /// The point over `x` with `y` the principal square root of the cubic.
    pub fn sample_point(&self, x: C64) -> CurvePoint<C64> {
        CurvePoint::affine(x, self.cubic(&x).sqrt())
    }

    /// A point over a uniformly random `x` in the square `|re|, |im| <= radius`.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> CurvePoint<C64> {
        let x = c64(
            rng.gen_range(-radius..=radius),
            rng.gen_range(-radius..=radius),
        );
        self.sample_point(x)
    }

    /// The point `(1/s^2, 1/s^3)` of the leading-order expansion at infinity.
    pub fn puiseux_point(s: C64) -> CurvePoint<C64> {
        let s2 = s * s;
        CurvePoint::affine(s2.inv(), (s2 * s).inv())
    }

    /// Relative distance between two points, `0` when equal and `inf` when one
    /// is at infinity and the other is not.
    pub fn distance(p: &CurvePoint<C64>, q: &CurvePoint<C64>) -> f64 {
        match (p, q) {
            (CurvePoint::Infinity, CurvePoint::Infinity) => 0.0,
            (CurvePoint::Affine { x: a, y: b }, CurvePoint::Affine { x: c, y: d }) => {
                let scale = 1f64.max(a.norm()).max(b.norm());
                ((a - c).norm() + (b - d).norm()) / scale
            }
            _ => f64::INFINITY,
        }
    }
}
