//! The 4-web formed by the fibration, the Riccati foliation and the two
//! branches of the minimal-section web: harmonicity, Blaschke curvature of
//! its 3-subwebs, and the hexagon closure test.

use alloc::vec::Vec;

use rand::Rng;

use crate::curve::Curve;
use crate::moebius::{cross_ratio, SpherePoint};
use crate::ode::{integrate, OdeOptions};
use crate::riccati::{continue_y_locally, slope_z0};
use crate::sections::{delta_roots, sections_through, Proj, SectionParam};
use crate::{c64, CoreError, C64};

/// The four foliations, in the fixed order used for cross-ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Foliation {
    Fibration,
    Riccati,
    Branch1,
    Branch2,
}

impl Foliation {
    pub const ALL: [Foliation; 4] = [
        Foliation::Fibration,
        Foliation::Riccati,
        Foliation::Branch1,
        Foliation::Branch2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Foliation::Fibration => "fibration",
            Foliation::Riccati => "riccati",
            Foliation::Branch1 => "branch1",
            Foliation::Branch2 => "branch2",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Which three foliations form a 3-web.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubwebId {
    /// The 4-web minus one foliation.
    Without(Foliation),
    /// The non-hexagonal web with slopes `0, 1, x + z`.
    Control,
}

impl SubwebId {
    pub const FOUR_WEB: [SubwebId; 4] = [
        SubwebId::Without(Foliation::Fibration),
        SubwebId::Without(Foliation::Riccati),
        SubwebId::Without(Foliation::Branch1),
        SubwebId::Without(Foliation::Branch2),
    ];

    pub fn members(self) -> Option<[Foliation; 3]> {
        match self {
            SubwebId::Without(f) => {
                let mut out = [Foliation::Fibration; 3];
                let mut k = 0;
                for g in Foliation::ALL {
                    if g != f {
                        out[k] = g;
                        k += 1;
                    }
                }
                Some(out)
            }
            SubwebId::Control => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SubwebId::Without(Foliation::Fibration) => "riccati+branch1+branch2",
            SubwebId::Without(Foliation::Riccati) => "fibration+branch1+branch2",
            SubwebId::Without(Foliation::Branch1) => "fibration+riccati+branch2",
            SubwebId::Without(Foliation::Branch2) => "fibration+riccati+branch1",
            SubwebId::Control => "control(0,1,x+z)",
        }
    }

    /// Subwebs containing the fibration are studied in the `(z, x)` chart.
    pub fn swapped_chart(self) -> bool {
        self.members().is_some_and(|m| m.contains(&Foliation::Fibration))
    }
}

/// A point of the surface with the four slopes `dz/dx` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WebPoint {
    pub x: C64,
    pub y: C64,
    pub z: C64,
    /// `(inf, Z0, Z1, Z2)`.
    pub slopes: [SpherePoint; 4],
    /// Set when the two branches coincide to working precision.
    pub on_delta: bool,
}

impl WebPoint {
    pub fn slope(&self, f: Foliation) -> SpherePoint {
        self.slopes[f.index()]
    }

    fn finite_slopes(&self) -> [C64; 3] {
        [1, 2, 3].map(|i| self.slopes[i].value().expect("finite web slope"))
    }
}

/// Relative gap below which the two branches count as coincident.
pub const DELTA_FLAG_TOL: f64 = 1e-7;

/// Branch slopes at a point, ordered with constant and diagonal sections
/// first and otherwise as returned by the section solver.
fn branch_slopes(curve: &Curve<C64>, u: C64, v: C64, z: C64) -> Result<[C64; 2], CoreError> {
    let res = sections_through(curve, &u, &v, &Proj::finite(z))?;
    let mut pairs: Vec<(bool, C64)> = Vec::with_capacity(2);
    let p = crate::curve::CurvePoint::affine(u, v);
    for s in &res.sections {
        let slope = crate::sections::section_slope(curve, s, &p)?;
        pairs.push((matches!(s, SectionParam::Generic { .. }), slope));
    }
    if pairs[0].0 && !pairs[1].0 {
        pairs.swap(0, 1);
    }
    Ok([pairs[0].1, pairs[1].1])
}

pub fn assemble_web_point(curve: &Curve<C64>, u: C64, v: C64, z: C64) -> Result<WebPoint, CoreError> {
    let z0 = slope_z0(u, z)?;
    let [z1, z2] = branch_slopes(curve, u, v, z)?;
    let scale = 1f64.max(z1.norm()).max(z2.norm());
    Ok(WebPoint {
        x: u,
        y: v,
        z,
        slopes: [SpherePoint::Infinity, SpherePoint::Finite(z0), SpherePoint::Finite(z1), SpherePoint::Finite(z2)],
        on_delta: (z1 - z2).norm() <= DELTA_FLAG_TOL * scale,
    })
}

/// `cross_ratio(inf, Z0, Z1, Z2) = (Z0 - Z2) / (Z0 - Z1)`.
pub fn cross_ratio_at(p: &WebPoint) -> Result<C64, CoreError> {
    cross_ratio_ordered(p, Foliation::ALL)
}

pub fn cross_ratio_ordered(p: &WebPoint, order: [Foliation; 4]) -> Result<C64, CoreError> {
    if p.on_delta {
        return Err(CoreError::RepeatedPoint);
    }
    let [a, b, c, d] = order.map(|f| p.slope(f));
    cross_ratio(a, b, c, d)
}

/// `|Z0 - (Z1 + Z2)/2|` relative to the slope scale.
pub fn harmonic_residual(p: &WebPoint) -> f64 {
    let [z0, z1, z2] = p.finite_slopes();
    let scale = 1f64.max(z0.norm()).max(z1.norm()).max(z2.norm());
    (z0 - (z1 + z2) / 2.0).norm() / scale
}

/// Three slope fields `db/da` in a working chart `(a, b)`.
pub trait SlopeTriple {
    fn slopes(&self, a: C64, b: C64) -> Result<[C64; 3], CoreError>;
}

impl<F: Fn(C64, C64) -> Result<[C64; 3], CoreError>> SlopeTriple for F {
    fn slopes(&self, a: C64, b: C64) -> Result<[C64; 3], CoreError> {
        self(a, b)
    }
}

/// The slopes of a 3-subweb of the 4-web near a reference point, with the
/// sheet of `y` and the branch labels continued from the reference.
pub struct SubwebField<'a> {
    curve: &'a Curve<C64>,
    reference: WebPoint,
    subweb: SubwebId,
}

impl<'a> SubwebField<'a> {
    pub fn new(curve: &'a Curve<C64>, reference: WebPoint, subweb: SubwebId) -> Self {
        Self { curve, reference, subweb }
    }

    /// The reference point in the working chart.
    pub fn chart_point(&self) -> (C64, C64) {
        if self.subweb.swapped_chart() {
            (self.reference.z, self.reference.x)
        } else {
            (self.reference.x, self.reference.z)
        }
    }

    /// All four slopes `dz/dx` at `(x, z)`, the fibration as `None`.
    pub fn four_slopes(&self, x: C64, z: C64) -> Result<[Option<C64>; 4], CoreError> {
        let y = continue_y_locally(self.curve, self.reference.y, x);
        let z0 = slope_z0(x, z)?;
        let [m1, m2] = branch_slopes(self.curve, x, y, z)?;
        let [_, r1, _] = self.reference.finite_slopes();
        let (b1, b2) = if (m1 - r1).norm() <= (m2 - r1).norm() { (m1, m2) } else { (m2, m1) };
        Ok([None, Some(z0), Some(b1), Some(b2)])
    }
}

impl SlopeTriple for SubwebField<'_> {
    fn slopes(&self, a: C64, b: C64) -> Result<[C64; 3], CoreError> {
        if self.subweb == SubwebId::Control {
            return Ok(control_slopes(a, b));
        }
        let members = self.subweb.members().expect("4-web subweb");
        let swapped = self.subweb.swapped_chart();
        let (x, z) = if swapped { (b, a) } else { (a, b) };
        let all = self.four_slopes(x, z)?;
        let mut out = [c64(0.0, 0.0); 3];
        for (k, f) in members.iter().enumerate() {
            out[k] = match (all[f.index()], swapped) {
                (None, true) => c64(0.0, 0.0),
                (Some(p), true) => {
                    if p.norm() <= 1e-300 {
                        return Err(CoreError::Pole("reciprocal slope"));
                    }
                    1.0 / p
                }
                (Some(p), false) => p,
                (None, false) => return Err(CoreError::Pole("vertical slope in the (x, z) chart")),
            };
        }
        Ok(out)
    }
}

/// Slopes `0, 1, a + b` of the control web.
pub fn control_slopes(a: C64, b: C64) -> [C64; 3] {
    [c64(0.0, 0.0), c64(1.0, 0.0), a + b]
}

/// Richardson-paired Blaschke curvature `K` with `d gamma = K da ^ db`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureEstimate {
    pub value: C64,
    pub error: f64,
    pub h: f64,
    pub subweb: SubwebId,
}

/// Absolute floor of the zero test for curvature.
pub const CURVATURE_FLOOR: f64 = 1e-7;

impl CurvatureEstimate {
    /// `|K| <= 10 error + floor`.
    pub fn is_zero(&self) -> bool {
        self.value.norm() <= 10.0 * self.error + CURVATURE_FLOOR
    }
}

/// Smallest pairwise slope gap relative to the slope scale at which the
/// normalization is still trusted.
pub const SLOPE_CONDITION: f64 = 1e-6;

fn normalized(field: &dyn SlopeTriple, a: C64, b: C64) -> Result<([C64; 3], [C64; 3]), CoreError> {
    let p = field.slopes(a, b)?;
    let scale = p.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let gap = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|(i, j)| (p[*i] - p[*j]).norm())
        .fold(f64::INFINITY, f64::min);
    if gap < SLOPE_CONDITION * scale {
        return Err(CoreError::NearDegenerateSlopes(gap / scale));
    }
    let w = [
        1.0 / ((p[0] - p[1]) * (p[0] - p[2])),
        1.0 / ((p[1] - p[0]) * (p[1] - p[2])),
        1.0 / ((p[2] - p[0]) * (p[2] - p[1])),
    ];
    Ok((p, w))
}

/// Coefficients `(g1, g2)` of `gamma = g1 da + g2 db` where
/// `d omega_i = gamma ^ omega_i` for `omega_i = w_i (db - p_i da)`.
fn connection_form(field: &dyn SlopeTriple, a: C64, b: C64, h: f64) -> Result<(C64, C64), CoreError> {
    let (p, w) = normalized(field, a, b)?;
    let (_, wa_p) = normalized(field, a + h, b)?;
    let (_, wa_m) = normalized(field, a - h, b)?;
    let (pb_p, wb_p) = normalized(field, a, b + h)?;
    let (pb_m, wb_m) = normalized(field, a, b - h)?;
    let mut ratio = [c64(0.0, 0.0); 3];
    for i in 0..3 {
        let d_a = (wa_p[i] - wa_m[i]) / (2.0 * h);
        let d_b = (wb_p[i] * pb_p[i] - wb_m[i] * pb_m[i]) / (2.0 * h);
        ratio[i] = (d_a + d_b) / w[i];
    }
    let g2 = (ratio[0] - ratio[1]) / (p[0] - p[1]);
    let g1 = ratio[0] - g2 * p[0];
    Ok((g1, g2))
}

fn curvature_at_step(field: &dyn SlopeTriple, a: C64, b: C64, h: f64) -> Result<C64, CoreError> {
    let (_, g2_p) = connection_form(field, a + h, b, h)?;
    let (_, g2_m) = connection_form(field, a - h, b, h)?;
    let (g1_p, _) = connection_form(field, a, b + h, h)?;
    let (g1_m, _) = connection_form(field, a, b - h, h)?;
    Ok((g2_p - g2_m) / (2.0 * h) - (g1_p - g1_m) / (2.0 * h))
}

/// Blaschke curvature by central differences at `h` and `h/2`, extrapolated.
pub fn blaschke_curvature(field: &dyn SlopeTriple, a: C64, b: C64, h: f64, subweb: SubwebId) -> Result<CurvatureEstimate, CoreError> {
    if !(h > 1e-8) {
        return Err(CoreError::StepUnderflow(h));
    }
    let k1 = curvature_at_step(field, a, b, h)?;
    let k2 = curvature_at_step(field, a, b, h / 2.0)?;
    Ok(CurvatureEstimate {
        value: (4.0 * k2 - k1) / 3.0,
        error: (k1 - k2).norm() / 3.0,
        h,
        subweb,
    })
}

fn leaf_options() -> OdeOptions {
    OdeOptions { rtol: 1e-13, atol: 1e-15, initial_fraction: 0.25, ..OdeOptions::default() }
}

/// `b(a_to)` on the leaf of foliation `i` through `(a_from, b_from)`.
fn follow_leaf(field: &dyn SlopeTriple, i: usize, a_from: C64, b_from: C64, a_to: C64) -> Result<C64, CoreError> {
    let da = a_to - a_from;
    if da.norm() == 0.0 {
        return Ok(b_from);
    }
    let f = |s: f64, y: &[C64; 1]| Ok([field.slopes(a_from + da * s, y[0])?[i] * da]);
    let (y, _) = integrate(f, 0.0, 1.0, [b_from], &leaf_options())?;
    Ok(y[0])
}

/// Where the leaf of foliation `i` through `p` meets the leaf of foliation
/// `j` through `o`, by Newton iteration in `a`.
fn meet(field: &dyn SlopeTriple, i: usize, p: (C64, C64), j: usize, o: (C64, C64)) -> Result<(C64, C64), CoreError> {
    let (ap, bp) = p;
    let lj = |a: C64| follow_leaf(field, j, o.0, o.1, a);
    let mut a = ap;
    for _ in 0..12 {
        let bi = follow_leaf(field, i, ap, bp, a)?;
        let bj = lj(a)?;
        let si = field.slopes(a, bi)?[i];
        let sj = field.slopes(a, bj)?[j];
        let step = (bj - bi) / (si - sj);
        a += step;
        if step.norm() <= 1e-15 * (1.0 + a.norm()) {
            break;
        }
    }
    let b = lj(a)?;
    if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
        return Err(CoreError::IntersectionFailed);
    }
    Ok((a, b))
}

/// Closure defect of the Blaschke hexagon of size `h` about `(a0, b0)`.
///
/// From `P1` on the leaf `L1` at `a0 + h`, follow foliation 2 to `L3`, 1 to
/// `L2`, 3 to `L1`, 2 to `L3`, 1 to `L2`, 3 to `L1`, landing at `P7`; the
/// defect is `|P7 - P1|`.
pub fn hexagon_closure_defect(field: &dyn SlopeTriple, a0: C64, b0: C64, h: f64) -> Result<f64, CoreError> {
    let o = (a0, b0);
    let a1 = a0 + h;
    let p1 = (a1, follow_leaf(field, 0, a0, b0, a1)?);
    let steps = [(1, 2), (0, 1), (2, 0), (1, 2), (0, 1), (2, 0)];
    let mut p = p1;
    for (move_along, target) in steps {
        p = meet(field, move_along, p, target, o)?;
    }
    Ok(((p.0 - p1.0).norm_sqr() + (p.1 - p1.1).norm_sqr()).sqrt())
}

/// Hexagon sizes of the scaling fit, before scaling by the slopes.
pub const HEXAGON_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
/// Defects below this are integration noise.
pub const HEXAGON_NOISE_FLOOR: f64 = 1e-10;
/// Fitted closure order required for hexagonality.
pub const HEXAGON_MIN_ORDER: f64 = 3.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexagonScaling {
    pub steps: [f64; 3],
    pub defects: [f64; 3],
    /// Mean `log2(defect(h) / defect(h/2))` over consecutive pairs above the
    /// noise floor; infinite when every defect is at the floor.
    pub fitted_order: f64,
    pub noise_limited: bool,
}

impl HexagonScaling {
    pub fn is_hexagonal(&self) -> bool {
        self.fitted_order >= HEXAGON_MIN_ORDER
    }
}

/// Closure defects at [`HEXAGON_STEPS`] divided by `max(1, |p_i|)` at the
/// base point, so that every hexagon spans about `3h` in both coordinates.
pub fn hexagon_scaling(field: &dyn SlopeTriple, a0: C64, b0: C64) -> Result<HexagonScaling, CoreError> {
    let steepest = field.slopes(a0, b0)?.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let steps = HEXAGON_STEPS.map(|h| h / steepest);
    let mut defects = [0f64; 3];
    for (k, h) in steps.iter().enumerate() {
        defects[k] = hexagon_closure_defect(field, a0, b0, *h)?;
    }
    let orders: Vec<f64> = defects
        .windows(2)
        .zip(steps.windows(2))
        .filter(|(d, _)| d[0] > HEXAGON_NOISE_FLOOR && d[1] > HEXAGON_NOISE_FLOOR)
        .map(|(d, h)| libm_log2(d[0] / d[1]) / libm_log2(h[0] / h[1]))
        .collect();
    let noise_limited = orders.len() < 2;
    let fitted_order = if orders.is_empty() {
        f64::INFINITY
    } else {
        orders.iter().sum::<f64>() / orders.len() as f64
    };
    Ok(HexagonScaling { steps, defects, fitted_order, noise_limited })
}

fn libm_log2(v: f64) -> f64 {
    num_traits::Float::log2(v)
}

/// Sampling box: real and imaginary ranges for `x` and `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x_re: (f64, f64),
    pub z_re: (f64, f64),
    pub x_im: (f64, f64),
    pub z_im: (f64, f64),
}

impl Default for Region {
    fn default() -> Self {
        Self { x_re: (-1.0, 3.0), z_re: (-1.5, 1.5), x_im: (0.25, 0.75), z_im: (-0.5, 0.5) }
    }
}

/// Exclusion tubes for sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exclusion {
    /// Radius about the singular fibers `x = 0, 1, t`.
    pub fiber: f64,
    /// Radius in `z` about the roots of the discriminant.
    pub delta: f64,
    /// Smallest chordal separation of the four slopes.
    pub slope_gap: f64,
    /// Smallest modulus of a finite slope; subwebs with the fibration use the
    /// reciprocal slopes.
    pub zero_gap: f64,
}

impl Default for Exclusion {
    fn default() -> Self {
        Self { fiber: 0.1, delta: 0.05, slope_gap: 0.02, zero_gap: 0.1 }
    }
}

/// Why a candidate sample was rejected.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExclusionCounts {
    pub singular_fiber: usize,
    pub delta: usize,
    pub slope_collision: usize,
    pub evaluation_error: usize,
}

impl ExclusionCounts {
    pub fn total(&self) -> usize {
        self.singular_fiber + self.delta + self.slope_collision + self.evaluation_error
    }
}

fn slopes_separated(p: &WebPoint, ex: &Exclusion) -> bool {
    for i in 0..4 {
        for j in i + 1..4 {
            if p.slopes[i].chordal_distance(p.slopes[j]) < ex.slope_gap {
                return false;
            }
        }
    }
    p.slopes[1..].iter().all(|s| s.value().map_or(true, |v| v.norm() >= ex.zero_gap))
}

/// Classifies a candidate point; `Ok` carries the assembled web point.
pub fn admit(curve: &Curve<C64>, u: C64, z: C64, ex: &Exclusion) -> Result<WebPoint, ExclusionCounts> {
    let t = *curve.t();
    let mut counts = ExclusionCounts::default();
    if [c64(0.0, 0.0), c64(1.0, 0.0), t].iter().any(|b| (u - b).norm() < ex.fiber) {
        counts.singular_fiber = 1;
        return Err(counts);
    }
    let near_delta = delta_roots(t, u).iter().any(|r| match r {
        SpherePoint::Finite(w) => (z - w).norm() < ex.delta,
        SpherePoint::Infinity => false,
    });
    if near_delta {
        counts.delta = 1;
        return Err(counts);
    }
    let v = curve.cubic(&u).sqrt();
    match assemble_web_point(curve, u, v, z) {
        Ok(p) if slopes_separated(&p, ex) => Ok(p),
        Ok(_) => {
            counts.slope_collision = 1;
            Err(counts)
        }
        Err(_) => {
            counts.evaluation_error = 1;
            Err(counts)
        }
    }
}

/// Draws admitted web points until `n` are found or `50 n` candidates are
/// used, returning them with the rejection counts.
pub fn sample_web_points<R: Rng>(curve: &Curve<C64>, region: &Region, ex: &Exclusion, n: usize, rng: &mut R) -> (Vec<WebPoint>, ExclusionCounts) {
    let mut pts = Vec::with_capacity(n);
    let mut counts = ExclusionCounts::default();
    let uniform = |rng: &mut R, r: (f64, f64)| if r.0 < r.1 { rng.gen_range(r.0..r.1) } else { r.0 };
    for _ in 0..50 * n.max(1) {
        if pts.len() >= n {
            break;
        }
        let u = c64(uniform(rng, region.x_re), uniform(rng, region.x_im));
        let z = c64(uniform(rng, region.z_re), uniform(rng, region.z_im));
        match admit(curve, u, z, ex) {
            Ok(p) => pts.push(p),
            Err(c) => {
                counts.singular_fiber += c.singular_fiber;
                counts.delta += c.delta;
                counts.slope_collision += c.slope_collision;
                counts.evaluation_error += c.evaluation_error;
            }
        }
    }
    (pts, counts)
}

/// Checks at one web point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCertificate {
    pub point: WebPoint,
    pub cross_ratio: C64,
    pub harmonic_residual: f64,
    pub curvatures: Vec<CurvatureEstimate>,
    pub hexagons: Vec<(SubwebId, HexagonScaling)>,
}

/// Step for curvature estimates.
pub const CURVATURE_STEP: f64 = 1e-3;
/// Tolerance on `|cross_ratio + 1|`.
pub const CROSS_RATIO_TOL: f64 = 1e-9;
/// Tolerance on the relative harmonic residual.
pub const HARMONIC_TOL: f64 = 1e-10;

impl PointCertificate {
    pub fn passes(&self) -> bool {
        (self.cross_ratio + 1.0).norm() <= CROSS_RATIO_TOL
            && self.harmonic_residual <= HARMONIC_TOL
            && self.curvatures.iter().all(CurvatureEstimate::is_zero)
            && self.hexagons.iter().all(|(_, h)| h.is_hexagonal())
    }
}

/// Runs the harmonic, curvature and hexagon checks at a point, either on the
/// four 3-subwebs or, with `control`, on the control web in place of them.
pub fn certify_point(curve: &Curve<C64>, point: WebPoint, control: bool) -> Result<PointCertificate, CoreError> {
    let cross_ratio = cross_ratio_at(&point)?;
    let harmonic = harmonic_residual(&point);
    let subwebs: Vec<SubwebId> = if control { alloc::vec![SubwebId::Control] } else { SubwebId::FOUR_WEB.to_vec() };
    let mut curvatures = Vec::with_capacity(subwebs.len());
    let mut hexagons = Vec::with_capacity(subwebs.len());
    for id in subwebs {
        let field = SubwebField::new(curve, point, id);
        let (a, b) = field.chart_point();
        curvatures.push(blaschke_curvature(&field, a, b, CURVATURE_STEP, id)?);
        hexagons.push((id, hexagon_scaling(&field, a, b)?));
    }
    Ok(PointCertificate { point, cross_ratio, harmonic_residual: harmonic, curvatures, hexagons })
}

/// Aggregate of point certificates; merging is associative and does not
/// depend on order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelizabilitySummary {
    pub points: usize,
    pub failed_points: usize,
    pub errors: usize,
    pub max_cross_ratio_error: f64,
    pub max_harmonic_residual: f64,
    /// Largest `|K| / (10 error + floor)`; at most one when all pass.
    pub max_curvature_ratio: f64,
    pub min_hexagon_order: f64,
    pub noise_limited_hexagons: usize,
}

impl Default for ParallelizabilitySummary {
    fn default() -> Self {
        Self {
            points: 0,
            failed_points: 0,
            errors: 0,
            max_cross_ratio_error: 0.0,
            max_harmonic_residual: 0.0,
            max_curvature_ratio: 0.0,
            min_hexagon_order: f64::INFINITY,
            noise_limited_hexagons: 0,
        }
    }
}

impl ParallelizabilitySummary {
    pub fn from_certificate(c: &Result<PointCertificate, CoreError>) -> Self {
        match c {
            Err(_) => Self { points: 1, failed_points: 1, errors: 1, ..Self::default() },
            Ok(c) => Self {
                points: 1,
                failed_points: usize::from(!c.passes()),
                errors: 0,
                max_cross_ratio_error: (c.cross_ratio + 1.0).norm(),
                max_harmonic_residual: c.harmonic_residual,
                max_curvature_ratio: c
                    .curvatures
                    .iter()
                    .map(|k| k.value.norm() / (10.0 * k.error + CURVATURE_FLOOR))
                    .fold(0.0, f64::max),
                min_hexagon_order: c.hexagons.iter().map(|(_, h)| h.fitted_order).fold(f64::INFINITY, f64::min),
                noise_limited_hexagons: c.hexagons.iter().filter(|(_, h)| h.noise_limited).count(),
            },
        }
    }

    pub fn merge(self, o: Self) -> Self {
        Self {
            points: self.points + o.points,
            failed_points: self.failed_points + o.failed_points,
            errors: self.errors + o.errors,
            max_cross_ratio_error: self.max_cross_ratio_error.max(o.max_cross_ratio_error),
            max_harmonic_residual: self.max_harmonic_residual.max(o.max_harmonic_residual),
            max_curvature_ratio: self.max_curvature_ratio.max(o.max_curvature_ratio),
            min_hexagon_order: self.min_hexagon_order.min(o.min_hexagon_order),
            noise_limited_hexagons: self.noise_limited_hexagons + o.noise_limited_hexagons,
        }
    }

    pub fn parallelizable(&self) -> bool {
        self.points > 0 && self.failed_points == 0
    }
}

/// Samples `n` points of the region and certifies each in turn.
pub fn parallelizability_report<R: Rng>(
    curve: &Curve<C64>,
    region: &Region,
    ex: &Exclusion,
    n: usize,
    control: bool,
    rng: &mut R,
) -> (ParallelizabilitySummary, ExclusionCounts) {
    let (pts, excluded) = sample_web_points(curve, region, ex, n, rng);
    let summary = pts
        .into_iter()
        .map(|p| ParallelizabilitySummary::from_certificate(&certify_point(curve, p, control)))
        .fold(ParallelizabilitySummary::default(), ParallelizabilitySummary::merge);
    (summary, excluded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn curve(t: f64) -> Curve<C64> {
        Curve::new(c64(t, 0.0)).unwrap()
    }

    #[test]
    fn web_point_on_zero_section() {
        let e = curve(2.0);
        let u = c64(0.4, 0.6);
        let v = e.cubic(&u).sqrt();
        let p = assemble_web_point(&e, u, v, c64(0.0, 0.0)).unwrap();
        let expect = [-1.0 / (4.0 * (u - 1.0)), c64(0.0, 0.0), -1.0 / (2.0 * (u - 1.0))];
        for (k, e) in expect.iter().enumerate() {
            assert!((p.slopes[k + 1].value().unwrap() - e).norm() < 1e-10, "{k}");
        }
        assert!(p.slopes[0].is_infinity());
        assert!(!p.on_delta);
    }

    #[test]
    fn cross_ratio_orderings() {
        let e = curve(2.0);
        let u = c64(0.4, 0.6);
        let p = assemble_web_point(&e, u, e.cubic(&u).sqrt(), c64(0.3, -0.2)).unwrap();
        assert!((cross_ratio_at(&p).unwrap() + 1.0).norm() < 1e-9);
        use Foliation::*;
        let swapped = cross_ratio_ordered(&p, [Fibration, Branch1, Riccati, Branch2]).unwrap();
        assert!((swapped - 2.0).norm() < 1e-9);
        let half = cross_ratio_ordered(&p, [Fibration, Branch1, Branch2, Riccati]).unwrap();
        assert!((half - 0.5).norm() < 1e-9);
        let model = WebPoint {
            slopes: [
                SpherePoint::Infinity,
                SpherePoint::Finite(c64(0.0, 0.0)),
                SpherePoint::Finite(c64(1.5, 0.5)),
                SpherePoint::Finite(c64(-1.5, -0.5)),
            ],
            ..p
        };
        assert!((cross_ratio_at(&model).unwrap() + 1.0).norm() < 1e-14);
    }

    #[test]
    fn delta_points_are_flagged() {
        let e = curve(2.0);
        let u = c64(0.4, 0.6);
        let z = delta_roots(*e.t(), u)[1].value().unwrap();
        let p = assemble_web_point(&e, u, e.cubic(&u).sqrt(), z).unwrap();
        assert!(p.on_delta || harmonic_residual(&p) < 1e-8);
    }

    #[test]
    fn parallel_web_is_flat_and_closes() {
        let field = |_: C64, _: C64| Ok([c64(0.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0)]);
        let k = blaschke_curvature(&field, c64(0.2, 0.1), c64(0.3, 0.0), 1e-3, SubwebId::Control).unwrap();
        assert_eq!(k.value, c64(0.0, 0.0));
        let d = hexagon_closure_defect(&field, c64(0.2, 0.1), c64(0.3, 0.0), 1e-2).unwrap();
        assert!(d < 1e-13, "{d}");
    }

    #[test]
    fn control_web_curvature_and_order() {
        let field = |a: C64, b: C64| Ok(control_slopes(a, b));
        let (a, b) = (c64(1.0 / 3.0, 0.0), c64(0.2, 0.0));
        let k = blaschke_curvature(&field, a, b, 1e-3, SubwebId::Control).unwrap();
        assert!((k.value - 3375.0 / 1568.0).norm() < 1e-6, "{}", k.value);
        assert!(!k.is_zero());
        let s = hexagon_scaling(&field, c64(0.3, 0.1), c64(0.1, -0.05)).unwrap();
        assert!(!s.is_hexagonal(), "{s:?}");
        assert!((s.fitted_order - 3.0).abs() < 0.3, "{s:?}");
    }

    #[test]
    fn chart_swap_negates_curvature() {
        // the control web with slopes 1, 2 + a, a + b read in the (b, a) chart
        let web = |a: C64, b: C64| Ok([c64(1.0, 0.0), 2.0 + a, a + b]);
        let swapped = |a: C64, b: C64| web(b, a).map(|p| p.map(|s| 1.0 / s));
        let (a, b) = (c64(0.4, 0.1), c64(-0.3, 0.2));
        let k = blaschke_curvature(&web, a, b, 1e-3, SubwebId::Control).unwrap();
        let k2 = blaschke_curvature(&swapped, b, a, 1e-3, SubwebId::Control).unwrap();
        assert!((k.value + k2.value).norm() < 10.0 * (k.error + k2.error) + 1e-7, "{} {}", k.value, k2.value);
        assert!(k.value.norm() > 1e-2);
    }

    #[test]
    fn relabeling_leaves_curvature_fixed() {
        let web = |a: C64, b: C64| Ok([c64(1.0, 0.0), 2.0 + a, a + b]);
        let perm = |a: C64, b: C64| web(a, b).map(|[p, q, r]| [r, p, q]);
        let pt = (c64(0.4, 0.1), c64(-0.3, 0.2));
        let k = blaschke_curvature(&web, pt.0, pt.1, 1e-3, SubwebId::Control).unwrap();
        let k2 = blaschke_curvature(&perm, pt.0, pt.1, 1e-3, SubwebId::Control).unwrap();
        assert!((k.value - k2.value).norm() < 1e-6);
    }

    #[test]
    fn four_web_subwebs_are_flat_and_hexagonal() {
        let e = curve(2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (pts, _) = sample_web_points(&e, &Region::default(), &Exclusion::default(), 3, &mut rng);
        assert_eq!(pts.len(), 3);
        for p in pts {
            let c = certify_point(&e, p, false).unwrap();
            for k in &c.curvatures {
                assert!(k.is_zero(), "{:?}", k);
            }
            for (id, h) in &c.hexagons {
                assert!(h.is_hexagonal(), "{id:?} {h:?}");
            }
            assert!(c.passes());
            let ctrl = certify_point(&e, p, true).unwrap();
            assert!(!ctrl.passes());
        }
    }
}
