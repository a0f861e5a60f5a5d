//! Points of the Riemann sphere, Moebius maps, cross-ratios, the dihedral
//! group `<-z, 1/z>` and the fiberwise monodromy maps.

use alloc::vec::Vec;
use core::fmt;

use crate::curve::{Curve, CurvePoint, TwoTorsion};
use crate::{c64, CoreError, Field, C64};

/// A point of `P^1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(C64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::Finite(c64(re, im))
    }

    /// The point `[a : b]`; `b = 0` is infinity.
    pub fn from_homogeneous(a: C64, b: C64) -> Self {
        if b.norm() == 0.0 {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(a / b)
        }
    }

    /// Unit-norm homogeneous coordinates.
    pub fn homogeneous(self) -> (C64, C64) {
        match self {
            SpherePoint::Infinity => (c64(1.0, 0.0), c64(0.0, 0.0)),
            SpherePoint::Finite(z) => {
                let n = (1.0 + z.norm_sqr()).sqrt();
                if n.is_finite() {
                    (z / n, c64(1.0 / n, 0.0))
                } else {
                    // |z| overflowed the square: use the reciprocal chart
                    let w = z.inv();
                    let m = (1.0 + w.norm_sqr()).sqrt();
                    (c64(1.0 / m, 0.0), w / m)
                }
            }
        }
    }

    pub fn value(self) -> Option<C64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Chordal distance (sine of the angle between representatives), in
    /// `[0, 1]`.
    pub fn chordal_distance(self, other: SpherePoint) -> f64 {
        let (a, b) = self.homogeneous();
        let (c, d) = other.homogeneous();
        (a * d - b * c).norm().min(1.0)
    }

    pub fn reciprocal(self) -> SpherePoint {
        match self {
            SpherePoint::Infinity => SpherePoint::Finite(c64(0.0, 0.0)),
            SpherePoint::Finite(z) if z.norm() == 0.0 => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(z.inv()),
        }
    }

    pub fn negated(self) -> SpherePoint {
        match self {
            SpherePoint::Infinity => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(-z),
        }
    }
}

impl From<C64> for SpherePoint {
    fn from(z: C64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => f.write_str("inf"),
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

fn bracket(p: (C64, C64), q: (C64, C64)) -> C64 {
    p.0 * q.1 - p.1 * q.0
}

/// Points whose chordal distance is below this are treated as equal.
pub const SPHERE_EQ_TOL: f64 = 1e-12;

/// `((a-c)(b-d)) / ((a-d)(b-c))`, with infinity handled through homogeneous
/// brackets.
pub fn cross_ratio(
    a: SpherePoint,
    b: SpherePoint,
    c: SpherePoint,
    d: SpherePoint,
) -> Result<C64, CoreError> {
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i].chordal_distance(pts[j]) < SPHERE_EQ_TOL {
                return Err(CoreError::RepeatedPoint);
            }
        }
    }
    let [a, b, c, d] = pts.map(SpherePoint::homogeneous);
    Ok(bracket(a, c) * bracket(b, d) / (bracket(a, d) * bracket(b, c)))
}

/// Projective class of an invertible 2x2 complex matrix `[[a, b], [c, d]]`.
///
/// Stored with unit Frobenius norm and the phase fixed so that the first
/// entry of largest modulus is real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    m: [C64; 4],
}

impl MoebiusMap {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self, CoreError> {
        let m = [a, b, c, d];
        let norm_sq: f64 = m.iter().map(|e| e.norm_sqr()).sum();
        let det = a * d - b * c;
        if norm_sq == 0.0 || det.norm() <= 1e-14 * norm_sq {
            return Err(CoreError::Degenerate("Moebius matrix is singular"));
        }
        Ok(Self::normalized(m))
    }

    fn normalized(m: [C64; 4]) -> Self {
        let norm = m.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        let mut pivot = m[0];
        for e in &m[1..] {
            if e.norm() > pivot.norm() * (1.0 + 1e-12) {
                pivot = *e;
            }
        }
        let phase = pivot.conj() / pivot.norm();
        Self {
            m: m.map(|e| e * phase / norm),
        }
    }

    pub fn identity() -> Self {
        Self::from_real([1.0, 0.0, 0.0, 1.0])
    }

    fn from_real(m: [f64; 4]) -> Self {
        Self::normalized(m.map(|e| c64(e, 0.0)))
    }

    /// `z -> -z`.
    pub fn negation() -> Self {
        Self::from_real([-1.0, 0.0, 0.0, 1.0])
    }

    /// `z -> 1/z`.
    pub fn reciprocal() -> Self {
        Self::from_real([0.0, 1.0, 1.0, 0.0])
    }

    pub fn entries(&self) -> [C64; 4] {
        self.m
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        let [a, b, c, d] = self.m;
        match z {
            SpherePoint::Infinity => SpherePoint::from_homogeneous(a, c),
            SpherePoint::Finite(w) if w.norm() <= 1.0 => {
                SpherePoint::from_homogeneous(a * w + b, c * w + d)
            }
            // reciprocal chart keeps magnitudes bounded
            SpherePoint::Finite(w) => {
                let s = w.inv();
                SpherePoint::from_homogeneous(a + b * s, c + d * s)
            }
        }
    }

    pub fn apply_finite(&self, z: C64) -> SpherePoint {
        self.apply(SpherePoint::Finite(z))
    }

    /// `self o other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = other.m;
        Self::normalized([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn inverse(&self) -> MoebiusMap {
        let [a, b, c, d] = self.m;
        Self::normalized([d, -b, -c, a])
    }

    /// Projective distance: the Frobenius distance between unit-norm
    /// representatives after aligning their phases. Zero iff the classes
    /// agree; at most `sqrt(2)`.
    pub fn distance(&self, other: &MoebiusMap) -> f64 {
        let inner: C64 = self
            .m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        if inner.norm() == 0.0 {
            return core::f64::consts::SQRT_2;
        }
        let phase = inner.conj() / inner.norm();
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// The map sending the three distinct points `p, q, r` to `0, inf, 1`.
    pub fn to_standard_triple(
        p: SpherePoint,
        q: SpherePoint,
        r: SpherePoint,
    ) -> Result<MoebiusMap, CoreError> {
        if p.chordal_distance(q) < SPHERE_EQ_TOL
            || q.chordal_distance(r) < SPHERE_EQ_TOL
            || p.chordal_distance(r) < SPHERE_EQ_TOL
        {
            return Err(CoreError::RepeatedPoint);
        }
        let (p, q, r) = (p.homogeneous(), q.homogeneous(), r.homogeneous());
        let rq = bracket(r, q);
        let rp = bracket(r, p);
        MoebiusMap::new(rq * p.1, -rq * p.0, rp * q.1, -rp * q.0)
    }

    /// The unique map sending `from[i]` to `to[i]`.
    pub fn fit_three(from: [SpherePoint; 3], to: [SpherePoint; 3]) -> Result<MoebiusMap, CoreError> {
        let a = Self::to_standard_triple(from[0], from[1], from[2])?;
        let b = Self::to_standard_triple(to[0], to[1], to[2])?;
        Ok(b.inverse().compose(&a))
    }

    /// Fixed points of the map.
    pub fn fixed_points(&self) -> Vec<SpherePoint> {
        let [a, b, c, d] = self.m;
        // c z^2 + (d - a) z - b = 0
        crate::roots::solve_quadratic(c, d - a, -b)
            .into_iter()
            .map(|r| r.map_or(SpherePoint::Infinity, SpherePoint::Finite))
            .collect()
    }
}

/// The four elements `z, -z, 1/z, -1/z` of the dihedral monodromy group.
pub fn dihedral_group() -> [MoebiusMap; 4] {
    [
        MoebiusMap::identity(),
        MoebiusMap::negation(),
        MoebiusMap::reciprocal(),
        MoebiusMap::negation().compose(&MoebiusMap::reciprocal()),
    ]
}

/// The orbit of `z` under `<-z, 1/z>`, without repetitions.
pub fn gamma_orbit(z: SpherePoint) -> Vec<SpherePoint> {
    let mut orbit: Vec<SpherePoint> = Vec::with_capacity(4);
    for g in dihedral_group() {
        let w = g.apply(z);
        if !orbit.iter().any(|o| o.chordal_distance(w) < SPHERE_EQ_TOL) {
            orbit.push(w);
        }
    }
    orbit
}

/// Labels of the fiberwise monodromy group at a base fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MonodromyLabel {
    Identity,
    Phi0,
    Phi1,
    PhiT,
}

impl MonodromyLabel {
    pub const ALL: [MonodromyLabel; 4] = [
        MonodromyLabel::Identity,
        MonodromyLabel::Phi0,
        MonodromyLabel::Phi1,
        MonodromyLabel::PhiT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MonodromyLabel::Identity => "id",
            MonodromyLabel::Phi0 => "Phi0",
            MonodromyLabel::Phi1 => "Phi1",
            MonodromyLabel::PhiT => "Phit",
        }
    }

    /// The 2-torsion point whose translation this map realizes.
    pub fn torsion(self) -> TwoTorsion {
        match self {
            MonodromyLabel::Identity => TwoTorsion::Infinity,
            MonodromyLabel::Phi0 => TwoTorsion::Zero,
            MonodromyLabel::Phi1 => TwoTorsion::One,
            MonodromyLabel::PhiT => TwoTorsion::T,
        }
    }
}

/// `Phi0: z -> (z - x0)/(z - 1)`, `Phi1: z -> x0/z`,
/// `Phit: z -> x0(z - 1)/(z - x0)` and the identity, over the fiber `x0`.
pub fn fiber_monodromy_maps(x0: C64) -> Result<[(MonodromyLabel, MoebiusMap); 4], CoreError> {
    if x0.norm() < 1e-12 || (x0 - 1.0).norm() < 1e-12 {
        return Err(CoreError::Degenerate("fiber monodromy needs x0 outside {0, 1}"));
    }
    let one = c64(1.0, 0.0);
    let zero = c64(0.0, 0.0);
    Ok([
        (MonodromyLabel::Identity, MoebiusMap::identity()),
        (MonodromyLabel::Phi0, MoebiusMap::new(one, -x0, one, -one)?),
        (MonodromyLabel::Phi1, MoebiusMap::new(zero, x0, one, zero)?),
        (MonodromyLabel::PhiT, MoebiusMap::new(x0, -x0, one, -x0)?),
    ])
}

/// Result of matching a map against the monodromy group at `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    /// `None` when no group element is within tolerance.
    pub label: Option<MonodromyLabel>,
    /// Distance to the nearest group element.
    pub distance: f64,
    pub nearest: MonodromyLabel,
}

pub fn classify_moebius(m: &MoebiusMap, x0: C64, tol: f64) -> Result<Classification, CoreError> {
    let maps = fiber_monodromy_maps(x0)?;
    let (nearest, distance) = maps
        .iter()
        .map(|(l, g)| (*l, m.distance(g)))
        .fold((MonodromyLabel::Identity, f64::INFINITY), |best, cand| {
            if cand.1 < best.1 {
                cand
            } else {
                best
            }
        });
    Ok(Classification {
        label: (distance < tol).then_some(nearest),
        distance,
        nearest,
    })
}

/// The automorphism `eps -> eps + p_i` of the parameter curve.
pub fn aut_translate<F: Field>(
    curve: &Curve<F>,
    label: TwoTorsion,
    eps: &CurvePoint<F>,
) -> CurvePoint<F> {
    curve.add(eps, &curve.two_torsion_point(label))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(re: f64, im: f64) -> SpherePoint {
        SpherePoint::finite(re, im)
    }

    fn near(a: SpherePoint, b: SpherePoint) -> bool {
        a.chordal_distance(b) < 1e-12
    }

    #[test]
    fn apply_basics() {
        assert!(near(MoebiusMap::negation().apply(fin(2.0, 0.0)), fin(-2.0, 0.0)));
        assert_eq!(MoebiusMap::reciprocal().apply(fin(0.0, 0.0)), SpherePoint::Infinity);
        assert_eq!(MoebiusMap::identity().apply(SpherePoint::Infinity), SpherePoint::Infinity);
    }

    #[test]
    fn composition() {
        let m = MoebiusMap::negation().compose(&MoebiusMap::reciprocal());
        let expect = MoebiusMap::new(c64(0.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)).unwrap();
        assert!(m.distance(&expect) < 1e-15);
        assert!(m.compose(&m).distance(&MoebiusMap::identity()) < 1e-15);
        let g = MoebiusMap::new(c64(1.0, 2.0), c64(0.5, 0.0), c64(-1.0, 0.3), c64(2.0, 0.0)).unwrap();
        assert!(g.compose(&g.inverse()).distance(&MoebiusMap::identity()) < 1e-14);
    }

    #[test]
    fn monodromy_maps_compose_like_klein_four() {
        let x0 = c64(2.5, -0.5);
        let maps = fiber_monodromy_maps(x0).unwrap();
        let phi = |l: MonodromyLabel| maps.iter().find(|(k, _)| *k == l).unwrap().1;
        let prod = phi(MonodromyLabel::Phi0).compose(&phi(MonodromyLabel::Phi1));
        assert!(prod.distance(&phi(MonodromyLabel::PhiT)) < 1e-14);
        assert!(phi(MonodromyLabel::Phi1)
            .compose(&phi(MonodromyLabel::Phi1))
            .distance(&MoebiusMap::identity())
            < 1e-14);
        assert!(fiber_monodromy_maps(c64(1.0, 0.0)).is_err());
        assert!(fiber_monodromy_maps(c64(0.0, 0.0)).is_err());
    }

    #[test]
    fn phi0_permutes_the_marked_points() {
        let x0 = c64(3.0, 1.0);
        let phi0 = fiber_monodromy_maps(x0).unwrap()[1].1;
        assert!(near(phi0.apply(fin(0.0, 0.0)), SpherePoint::Finite(x0)));
        assert_eq!(phi0.apply(fin(1.0, 0.0)).is_infinity(), true);
        assert!(near(phi0.apply(SpherePoint::Infinity), fin(1.0, 0.0)));
        assert!(near(phi0.apply(SpherePoint::Finite(x0)), fin(0.0, 0.0)));
    }

    #[test]
    fn phi0_fixed_points_lie_on_f0() {
        let x0 = c64(-1.5, 0.25);
        let phi0 = fiber_monodromy_maps(x0).unwrap()[1].1;
        for p in phi0.fixed_points() {
            let z = p.value().unwrap();
            assert!((z * z - 2.0 * z + x0).norm() < 1e-12);
        }
    }

    #[test]
    fn cross_ratio_values() {
        let beta = fin(0.7, -0.2);
        let cr = cross_ratio(SpherePoint::Infinity, fin(0.0, 0.0), beta, beta.negated()).unwrap();
        assert!((cr + 1.0).norm() < 1e-15);
        let cr = cross_ratio(SpherePoint::Infinity, fin(1.0, 0.0), fin(2.0, 0.0), fin(3.0, 0.0)).unwrap();
        assert!((cr - 2.0).norm() < 1e-15);
        assert_eq!(
            cross_ratio(fin(1.0, 0.0), fin(1.0, 0.0), fin(2.0, 0.0), fin(3.0, 0.0)),
            Err(CoreError::RepeatedPoint)
        );
    }

    #[test]
    fn orbits() {
        assert_eq!(gamma_orbit(fin(2.0, 0.0)).len(), 4);
        assert_eq!(gamma_orbit(fin(1.0, 0.0)).len(), 2);
        assert_eq!(gamma_orbit(fin(0.0, 1.0)).len(), 2);
        let o = gamma_orbit(fin(0.0, 0.0));
        assert_eq!(o.len(), 2);
        assert!(o.contains(&SpherePoint::Infinity));
    }

    #[test]
    fn classification() {
        let x0 = c64(2.0, 1.0);
        let maps = fiber_monodromy_maps(x0).unwrap();
        let [a, b, c, d] = maps[2].1.entries();
        let scaled = MoebiusMap::new(a * 7.0, b * 7.0, c * 7.0, d * 7.0).unwrap();
        assert_eq!(classify_moebius(&scaled, x0, 1e-9).unwrap().label, Some(MonodromyLabel::Phi1));
        let [a, b, c, d] = maps[1].1.entries();
        let bumped = MoebiusMap::new(a + 1e-9, b, c, d).unwrap();
        assert_eq!(classify_moebius(&bumped, x0, 1e-6).unwrap().label, Some(MonodromyLabel::Phi0));
        let shift = MoebiusMap::new(c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)).unwrap();
        assert_eq!(classify_moebius(&shift, x0, 1e-6).unwrap().label, None);
    }

    #[test]
    fn three_point_fit_reproduces_a_map() {
        let g = MoebiusMap::new(c64(1.0, 2.0), c64(0.5, 0.0), c64(-1.0, 0.3), c64(2.0, 0.0)).unwrap();
        let from = [fin(2.0, 0.0), fin(3.0, 1.0), fin(-1.0, 0.0)];
        let fitted = MoebiusMap::fit_three(from, from.map(|p| g.apply(p))).unwrap();
        assert!(fitted.distance(&g) < 1e-13);
        let with_inf = [SpherePoint::Infinity, fin(0.0, 0.0), fin(1.0, 0.0)];
        let fitted = MoebiusMap::fit_three(with_inf, with_inf.map(|p| g.apply(p))).unwrap();
        assert!(fitted.distance(&g) < 1e-13);
    }

    #[test]
    fn translations_form_the_torsion_group() {
        let e = Curve::new(c64(3.0, 0.5)).unwrap();
        let eps = e.sample_point(c64(0.7, 1.2));
        assert!(aut_translate(&e, TwoTorsion::Infinity, &eps).near(&eps));
        let twice = aut_translate(&e, TwoTorsion::Zero, &aut_translate(&e, TwoTorsion::Zero, &eps));
        assert!(Curve::distance(&twice, &eps) < 1e-10);
        for a in TwoTorsion::ALL {
            for b in TwoTorsion::ALL {
                let lhs = aut_translate(&e, a, &aut_translate(&e, b, &eps));
                let rhs = aut_translate(&e, a.plus(b), &eps);
                assert!(Curve::distance(&lhs, &rhs) < 1e-9);
            }
        }
    }
}
