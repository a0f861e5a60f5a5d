//! Analytic continuation along paths in the base: the sheet of
//! `y = sqrt(x(x-1)(x-t))`, transport of fiber values along Riccati leaves,
//! and monodromy of closed loops.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::curve::Curve;
use crate::moebius::{classify_moebius, Classification, MoebiusMap, SpherePoint};
use crate::ode::{integrate, OdeOptions, OdeStats};
use crate::riccati::{continue_y_locally, first_integral};
use crate::{c64, CoreError, C64};

/// One piece of a path in the `x`-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSegment {
    /// Straight line from the current point.
    Line { to: C64 },
    /// Circular arc about `center` from the current point; `turns > 0` is
    /// counterclockwise.
    Arc { center: C64, turns: f64 },
}

/// A path starting at a point `(x, y)` of the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub base_x: C64,
    pub base_y: C64,
    pub segments: Vec<PathSegment>,
    /// Minimum allowed distance to the branch points `0, 1, t`; `None` uses
    /// [`default_clearance`].
    pub clearance: Option<f64>,
}

/// `0.1` times the smallest distance between the finite branch points.
pub fn default_clearance(t: C64) -> f64 {
    let d = [t.norm(), (t - 1.0).norm(), 1.0].into_iter().fold(f64::INFINITY, f64::min);
    0.1 * d
}

pub fn branch_points(t: C64) -> [(&'static str, C64); 3] {
    [("0", c64(0.0, 0.0)), ("1", c64(1.0, 0.0)), ("t", t)]
}

/// A path piece with its start point, parametrized over `[0, 1]`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    start: C64,
    seg: PathSegment,
}

impl Piece {
    fn point(&self, s: f64) -> C64 {
        match self.seg {
            PathSegment::Line { to } => self.start + (to - self.start) * s,
            PathSegment::Arc { center, turns } => {
                center + (self.start - center) * C64::from_polar(1.0, TAU * turns * s)
            }
        }
    }

    fn velocity(&self, s: f64) -> C64 {
        match self.seg {
            PathSegment::Line { to } => to - self.start,
            PathSegment::Arc { center, turns } => c64(0.0, TAU * turns) * (self.point(s) - center),
        }
    }

    fn length(&self) -> f64 {
        match self.seg {
            PathSegment::Line { to } => (to - self.start).norm(),
            PathSegment::Arc { center, turns } => TAU * turns.abs() * (self.start - center).norm(),
        }
    }

    fn end(&self) -> C64 {
        self.point(1.0)
    }
}

fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

impl PathSpec {
    pub fn new(base_x: C64, base_y: C64) -> Self {
        Self { base_x, base_y, segments: Vec::new(), clearance: None }
    }

    pub fn line(mut self, to: C64) -> Self {
        self.segments.push(PathSegment::Line { to });
        self
    }

    pub fn arc(mut self, center: C64, turns: f64) -> Self {
        self.segments.push(PathSegment::Arc { center, turns });
        self
    }

    /// Appends a loop from the current base: out to the circle of radius `r`
    /// about `center`, `turns` times around it, and back.
    pub fn lollipop(self, center: C64, radius: f64, turns: f64) -> Self {
        let dir = self.base_x - center;
        let touch = center + dir / dir.norm() * radius;
        let base = self.base_x;
        self.line(touch).arc(center, turns).line(base)
    }

    /// This path followed by `other`, which must start where this one ends.
    pub fn then(mut self, other: &PathSpec) -> Self {
        self.segments.extend_from_slice(&other.segments);
        self
    }

    fn pieces(&self) -> Vec<Piece> {
        let mut at = self.base_x;
        let mut out = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            let p = Piece { start: at, seg: *seg };
            at = p.end();
            out.push(p);
        }
        out
    }

    pub fn end_x(&self) -> C64 {
        self.pieces().last().map_or(self.base_x, Piece::end)
    }

    pub fn length(&self) -> f64 {
        self.pieces().iter().map(Piece::length).sum()
    }

    pub fn clearance_for(&self, t: C64) -> f64 {
        self.clearance.unwrap_or_else(|| default_clearance(t))
    }

    /// Dense polyline through the path with chords no longer than `max_step`.
    fn polyline(&self, max_step: f64) -> Vec<C64> {
        let mut pts = alloc::vec![self.base_x];
        for p in self.pieces() {
            let n = ((p.length() / max_step).ceil() as usize).max(1);
            for k in 1..=n {
                pts.push(p.point(k as f64 / n as f64));
            }
        }
        pts
    }

    /// Errors when the path comes within the clearance of a branch point.
    pub fn check_clearance(&self, t: C64) -> Result<(), CoreError> {
        let clearance = self.clearance_for(t);
        let pts = self.polyline(clearance / 8.0);
        for (name, b) in branch_points(t) {
            let d = pts
                .windows(2)
                .map(|w| segment_distance(b, w[0], w[1]))
                .fold((pts[0] - b).norm(), f64::min);
            if d < clearance {
                return Err(CoreError::ClearanceViolation { branch: String::from(name), distance: d });
            }
        }
        Ok(())
    }

    /// Winding numbers about `0, 1, t` for a path closed in the `x`-plane.
    pub fn windings(&self, t: C64) -> [i64; 3] {
        let pts = self.polyline(self.clearance_for(t) / 8.0);
        branch_points(t).map(|(_, b)| {
            let total: f64 = pts.windows(2).map(|w| ((w[1] - b) / (w[0] - b)).arg()).sum();
            num_traits::Float::round(total / TAU) as i64
        })
    }

    /// Whether the path lifts to a closed path on the curve.
    pub fn is_closed_on_curve(&self, t: C64) -> bool {
        let closed_in_plane = (self.end_x() - self.base_x).norm() <= 1e-12 * (1.0 + self.base_x.norm());
        closed_in_plane && self.windings(t).iter().sum::<i64>().rem_euclid(2) == 0
    }

    /// The branch points encircled an odd number of times.
    pub fn encircled(&self, t: C64) -> Vec<&'static str> {
        branch_points(t)
            .iter()
            .zip(self.windings(t))
            .filter(|(_, w)| w.rem_euclid(2) == 1)
            .map(|((n, _), _)| *n)
            .collect()
    }
}

/// The end value of `y` continued continuously along the path.
pub fn continue_y(curve: &Curve<C64>, path: &PathSpec) -> Result<C64, CoreError> {
    let t = *curve.t();
    path.check_clearance(t)?;
    let pts = path.polyline(path.clearance_for(t) / 8.0);
    Ok(pts.iter().skip(1).fold(path.base_y, |y, x| continue_y_locally(curve, y, *x)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportOptions {
    pub ode: OdeOptions,
    /// Longest chunk in `x` integrated in a single chart.
    pub max_chunk: f64,
    pub tracers: [C64; 3],
    /// Extra tracer that checks the fitted map.
    pub validation: C64,
    pub fit_tol: f64,
    pub classify_tol: f64,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            max_chunk: 0.05,
            tracers: [c64(2.0, 0.0), c64(3.0, 1.0), c64(-1.0, 0.0)],
            validation: c64(0.5, 0.25),
            fit_tol: 1e-7,
            classify_tol: 1e-6,
        }
    }
}

/// Transport of one fiber value along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafTransport {
    pub end: SpherePoint,
    /// Largest chordal distance of `F` from its starting value.
    pub f_drift: f64,
    pub length: f64,
    pub stats: OdeStats,
}

fn integrate_chunk(piece: &Piece, s0: f64, s1: f64, z: SpherePoint, opts: &OdeOptions) -> Result<(SpherePoint, OdeStats), CoreError> {
    // dz/dx = -P/Q and dw/dx = w^2 P / Q with P = -z^2 - 2(x-1)z + x, Q = 4x(x-1)
    match z {
        SpherePoint::Finite(z0) if z0.norm() <= 1.0 => {
            let f = |s: f64, y: &[C64; 1]| {
                let x = piece.point(s);
                let q = 4.0 * x * (x - 1.0);
                let p = -y[0] * y[0] - 2.0 * (x - 1.0) * y[0] + x;
                Ok([-p / q * piece.velocity(s)])
            };
            let (y, st) = integrate(f, s0, s1, [z0], opts)?;
            Ok((SpherePoint::Finite(y[0]), st))
        }
        _ => {
            let w0 = z.reciprocal().value().expect("|z| > 1");
            let f = |s: f64, y: &[C64; 1]| {
                let x = piece.point(s);
                let q = 4.0 * x * (x - 1.0);
                let w = y[0];
                Ok([(-1.0 - 2.0 * (x - 1.0) * w + x * w * w) / q * piece.velocity(s)])
            };
            let (y, st) = integrate(f, s0, s1, [w0], opts)?;
            Ok((SpherePoint::Finite(y[0]).reciprocal(), st))
        }
    }
}

/// Integrates the leaf through `(x*, z0)` along the path, switching between
/// the `z` and `1/z` charts at chunk boundaries.
pub fn integrate_leaf(curve: &Curve<C64>, path: &PathSpec, z0: SpherePoint, opts: &TransportOptions) -> Result<LeafTransport, CoreError> {
    let t = *curve.t();
    path.check_clearance(t)?;
    let mut z = z0;
    let mut stats = OdeStats::default();
    let f0 = first_integral(path.base_x, z0)?;
    let mut drift = 0f64;
    for piece in path.pieces() {
        let n = ((piece.length() / opts.max_chunk).ceil() as usize).max(1);
        for k in 0..n {
            let (a, b) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
            let (next, st) = integrate_split(&piece, a, b, z, &opts.ode, 6)?;
            z = next;
            stats = stats.merge(st);
            if let Ok(f) = first_integral(piece.point(b), z) {
                drift = drift.max(f.chordal_distance(f0));
            }
        }
    }
    Ok(LeafTransport { end: z, f_drift: drift, length: path.length(), stats })
}

/// Retries a failed chunk in halves, re-choosing the chart in each half.
fn integrate_split(piece: &Piece, a: f64, b: f64, z: SpherePoint, opts: &OdeOptions, depth: u32) -> Result<(SpherePoint, OdeStats), CoreError> {
    match integrate_chunk(piece, a, b, z, opts) {
        Err(CoreError::StepSizeCollapse { .. }) if depth > 0 => {
            let mid = 0.5 * (a + b);
            let (zm, s1) = integrate_split(piece, a, mid, z, opts, depth - 1)?;
            let (ze, s2) = integrate_split(piece, mid, b, zm, opts, depth - 1)?;
            Ok((ze, s1.merge(s2)))
        }
        other => other,
    }
}

/// Monodromy of a closed loop, fitted from tracer transports.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    pub tracer_ends: [SpherePoint; 3],
    pub map: MoebiusMap,
    /// Chordal distance between the transported validation tracer and its
    /// image under the fitted map.
    pub fit_residual: f64,
    pub f_drift: f64,
    pub length: f64,
    pub classification: Classification,
    pub windings: [i64; 3],
    pub end_y: C64,
    pub stats: OdeStats,
}

impl TransportResult {
    pub fn drift_per_length(&self) -> f64 {
        if self.length > 0.0 {
            self.f_drift / self.length
        } else {
            self.f_drift
        }
    }
}

pub fn loop_monodromy(curve: &Curve<C64>, path: &PathSpec, opts: &TransportOptions) -> Result<TransportResult, CoreError> {
    let t = *curve.t();
    if !path.is_closed_on_curve(t) {
        return Err(CoreError::NotClosed { encircled: path.encircled(t).len() as i64 });
    }
    let end_y = continue_y(curve, path)?;
    let mut ends = [SpherePoint::Infinity; 3];
    let mut drift = 0f64;
    let mut stats = OdeStats::default();
    for (i, z) in opts.tracers.iter().enumerate() {
        let res = integrate_leaf(curve, path, SpherePoint::Finite(*z), opts)?;
        ends[i] = res.end;
        drift = drift.max(res.f_drift);
        stats = stats.merge(res.stats);
    }
    let map = MoebiusMap::fit_three(opts.tracers.map(SpherePoint::Finite), ends)?;
    let check = integrate_leaf(curve, path, SpherePoint::Finite(opts.validation), opts)?;
    drift = drift.max(check.f_drift);
    stats = stats.merge(check.stats);
    let fit_residual = map.apply_finite(opts.validation).chordal_distance(check.end);
    if fit_residual > opts.fit_tol {
        return Err(CoreError::FitFailed("validation tracer disagrees with the fitted map"));
    }
    let classification = classify_moebius(&map, path.base_x, opts.classify_tol)?;
    Ok(TransportResult {
        tracer_ends: ends,
        map,
        fit_residual,
        f_drift: drift,
        length: path.length(),
        classification,
        windings: path.windings(t),
        end_y,
        stats,
    })
}

/// Base point of the default battery: above the centroid of the branch
/// points.
pub fn battery_base(curve: &Curve<C64>) -> (C64, C64) {
    let t = *curve.t();
    let centroid = (1.0 + t) / 3.0;
    let spread = [t.norm(), (t - 1.0).norm(), 1.0].into_iter().fold(1.0, f64::max);
    let x = centroid + c64(0.0, 1.3 * spread);
    (x, curve.cubic(&x).sqrt())
}

/// Twelve named closed loops built from lollipops about the branch points.
pub fn default_battery(curve: &Curve<C64>) -> Vec<(String, PathSpec)> {
    let t = *curve.t();
    let (bx, by) = battery_base(curve);
    let radius = 3.0 * default_clearance(t);
    let pts = [c64(0.0, 0.0), c64(1.0, 0.0), t];
    let names = ["0", "1", "t"];
    let build = |seq: &[(usize, f64)]| {
        let mut p = PathSpec::new(bx, by);
        let mut name = String::new();
        for (i, turns) in seq {
            p = p.lollipop(pts[*i], radius, *turns);
            if !name.is_empty() {
                name.push('.');
            }
            name.push_str(names[*i]);
            if *turns < 0.0 {
                name.push('\'');
            }
        }
        if name.is_empty() {
            name.push_str("empty");
        }
        (format!("loop[{name}]"), p)
    };
    let seqs: [&[(usize, f64)]; 12] = [
        &[],
        &[(0, 2.0)],
        &[(1, 2.0)],
        &[(2, 2.0)],
        &[(0, 1.0), (1, 1.0)],
        &[(1, 1.0), (2, 1.0)],
        &[(0, 1.0), (2, 1.0)],
        &[(1, 1.0), (0, 1.0)],
        &[(0, 1.0), (1, -1.0)],
        &[(0, 1.0), (1, 1.0), (1, 1.0), (2, 1.0)],
        &[(0, 1.0), (1, 1.0), (0, 1.0), (1, 1.0)],
        &[(2, 1.0), (0, 1.0)],
    ];
    seqs.iter().map(|s| build(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{fiber_monodromy_maps, MonodromyLabel};
    use crate::riccati::SpecialLeaf;

    fn curve(t: C64) -> Curve<C64> {
        Curve::new(t).unwrap()
    }

    #[test]
    fn sheet_swaps() {
        let e = curve(c64(2.0, 0.0));
        let (bx, by) = battery_base(&e);
        let trivial = PathSpec::new(bx, by);
        assert_eq!(continue_y(&e, &trivial).unwrap(), by);
        let one = PathSpec::new(bx, by).lollipop(c64(0.0, 0.0), 0.3, 1.0);
        assert!((continue_y(&e, &one).unwrap() + by).norm() < 1e-12);
        assert!(!one.is_closed_on_curve(*e.t()));
        let two = one.clone().lollipop(c64(1.0, 0.0), 0.3, 1.0);
        assert!((continue_y(&e, &two).unwrap() - by).norm() < 1e-12);
        assert_eq!(two.windings(*e.t()), [1, 1, 0]);
    }

    #[test]
    fn clearance_is_enforced() {
        let e = curve(c64(2.0, 0.0));
        let p = PathSpec::new(c64(0.5, 0.5), e.cubic(&c64(0.5, 0.5)).sqrt()).line(c64(0.5, -0.5)).line(c64(1.0, 0.05));
        assert!(matches!(continue_y(&e, &p), Err(CoreError::ClearanceViolation { .. })));
    }

    #[test]
    fn zero_length_and_empty_loops_are_identity() {
        let e = curve(c64(2.0, 0.0));
        let (bx, by) = battery_base(&e);
        let p = PathSpec::new(bx, by);
        let r = integrate_leaf(&e, &p, SpherePoint::Finite(c64(0.3, 0.1)), &TransportOptions::default()).unwrap();
        assert_eq!(r.end, SpherePoint::Finite(c64(0.3, 0.1)));
        let m = loop_monodromy(&e, &p, &TransportOptions::default()).unwrap();
        assert_eq!(m.classification.label, Some(MonodromyLabel::Identity));
    }

    #[test]
    fn special_leaf_is_preserved() {
        let e = curve(c64(2.0, 0.0));
        let (bx, by) = battery_base(&e);
        let p = PathSpec::new(bx, by).line(bx + c64(0.7, -0.3)).line(bx + c64(0.2, 0.4));
        let z0 = SpecialLeaf::One.points_over(bx)[0];
        let r = integrate_leaf(&e, &p, SpherePoint::Finite(z0), &TransportOptions::default()).unwrap();
        let z = r.end.value().unwrap();
        assert!(SpecialLeaf::One.eval(bx + c64(0.2, 0.4), z).norm() < 1e-8);
        assert!(r.f_drift < 1e-8);
    }

    #[test]
    fn loops_classify_and_commute() {
        for t in [c64(2.0, 0.0), c64(1.0, 1.0)] {
            let e = curve(t);
            let opts = TransportOptions::default();
            let battery = default_battery(&e);
            let mut maps = Vec::new();
            for (name, path) in &battery {
                let r = loop_monodromy(&e, path, &opts).unwrap_or_else(|err| panic!("{name}: {err}"));
                assert!(r.classification.label.is_some(), "{name}: {:?}", r.classification);
                assert!(r.drift_per_length() < 1e-8, "{name}: drift {}", r.f_drift);
                assert!((r.end_y - path.base_y).norm() < 1e-10);
                maps.push(r.map);
            }
            for a in &maps {
                for b in &maps {
                    assert!(a.compose(b).distance(&b.compose(a)) < 1e-6);
                }
            }
            // loop[0.1.1.t] is loop[0.1] followed by loop[1.t]
            assert!(maps[9].distance(&maps[5].compose(&maps[4])) < 1e-6);
            // double turns around a single branch point are contractible on the curve
            for k in 0..4 {
                assert!(maps[k].distance(&MoebiusMap::identity()) < 1e-6, "loop {k}");
            }
        }
    }

    #[test]
    fn orbit_sizes_under_measured_monodromy() {
        let e = curve(c64(2.0, 0.0));
        let (bx, _) = battery_base(&e);
        let group = fiber_monodromy_maps(bx).unwrap();
        let orbit_size = |z: C64| {
            let mut pts: Vec<SpherePoint> = Vec::new();
            for (_, g) in &group {
                let w = g.apply_finite(z);
                if !pts.iter().any(|p| p.chordal_distance(w) < 1e-9) {
                    pts.push(w);
                }
            }
            pts.len()
        };
        assert_eq!(orbit_size(c64(0.3, 0.7)), 4);
        for leaf in SpecialLeaf::ALL {
            assert_eq!(orbit_size(leaf.points_over(bx)[0]), 2, "{leaf:?}");
        }
    }

    #[test]
    fn homotopic_loops_agree() {
        let e = curve(c64(2.0, 0.0));
        let (bx, by) = battery_base(&e);
        let opts = TransportOptions::default();
        let mk = |r: f64| PathSpec::new(bx, by).lollipop(c64(0.0, 0.0), r, 1.0).lollipop(c64(1.0, 0.0), r, 1.0);
        let a = loop_monodromy(&e, &mk(0.2), &opts).unwrap();
        let b = loop_monodromy(&e, &mk(0.4), &opts).unwrap();
        assert_eq!(a.classification.label, b.classification.label);
        assert!(a.map.distance(&b.map) < 1e-6);
    }

    #[test]
    fn open_loop_is_rejected() {
        let e = curve(c64(2.0, 0.0));
        let (bx, by) = battery_base(&e);
        let p = PathSpec::new(bx, by).lollipop(c64(1.0, 0.0), 0.3, 1.0);
        assert!(matches!(loop_monodromy(&e, &p, &TransportOptions::default()), Err(CoreError::NotClosed { .. })));
    }
}
