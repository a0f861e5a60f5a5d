//! The verification suite.
//!
//! Every check is a job with its own seed, drawn in a fixed order from the
//! master generator, so the report does not depend on how rayon schedules
//! the jobs. Samples inside a job are drawn sequentially before any parallel
//! evaluation, and reductions are order independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use s1web_core::curve::{Curve, CurvePoint};
use s1web_core::identities::{identity_check, typo_probe, IdentityId, TypoProbe, Witness};
use s1web_core::moebius::{gamma_orbit, MoebiusMap, SpherePoint};
use s1web_core::riccati::{
    analyze_singularities, first_integral, first_integral_invariance_residual, ode_double_star_residual, psi_leaf_residual,
    psi_map, pulled_back_integral,
};
use s1web_core::sections::{
    calibrate_constants, delta_leaf_check, intersection_base_point, intersection_offset, pulled_back_web_slopes, section_value,
    sections_through, Proj, SectionParam,
};
use s1web_core::transport::{default_battery, loop_monodromy, TransportOptions, TransportResult};
use s1web_core::web::{
    certify_point, cross_ratio_at, cross_ratio_ordered, harmonic_residual, sample_web_points, Exclusion, ExclusionCounts,
    Foliation, ParallelizabilitySummary, Region,
};
use s1web_core::{c64, CoreError, ExactScalar, C64};

use crate::config::{Param, SuiteConfig};
use crate::report::{CheckRecord, VerificationReport};

/// Tolerance of the numeric intersection law `q1 + q2 + p = (t, 0)`.
pub const INTERSECTION_TOL: f64 = 1e-7;
/// Tolerance of the first-integral invariance residual, relative to the
/// gradient.
pub const INVARIANCE_TOL: f64 = 1e-6;
/// Finite-difference step of the pullback derivatives.
pub const PULLBACK_STEP: f64 = 1e-4;
/// Candidate draws per requested sample before a check gives up.
const DRAW_BUDGET: usize = 50;

pub fn fmt_c(z: C64) -> String {
    format!("{:.10e}{:+.10e}i", z.re, z.im)
}

fn sep(z: C64, points: &[C64], r: f64) -> bool {
    points.iter().all(|p| (z - p).norm() > r)
}

fn uniform(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 < range.1 {
        rng.gen_range(range.0..range.1)
    } else {
        range.0
    }
}

fn square(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    c64(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))
}

fn curve_at(p: Param) -> Result<Curve<C64>, CoreError> {
    Curve::new(p.0)
}

fn witness_text(w: &Option<Witness>) -> String {
    match w {
        None => "no witness found".to_string(),
        Some(w) => {
            let at: Vec<String> = w.at.iter().map(|(v, s)| format!("{v}={s}")).collect();
            format!("value {} at {}", w.value, at.join(", "))
        }
    }
}

fn broken(name: &str, t: Option<String>, err: CoreError) -> CheckRecord {
    let mut c = CheckRecord::new(name, t, 0.0);
    c.fail(format!("setup failed: {err}"));
    c
}

/// Output of one job: check records plus report-level notes.
#[derive(Debug, Default)]
pub struct JobOutput {
    pub checks: Vec<CheckRecord>,
    pub notes: Vec<String>,
}

impl From<CheckRecord> for JobOutput {
    fn from(c: CheckRecord) -> Self {
        Self { checks: vec![c], notes: Vec::new() }
    }
}

impl From<Vec<CheckRecord>> for JobOutput {
    fn from(checks: Vec<CheckRecord>) -> Self {
        Self { checks, notes: Vec::new() }
    }
}

// ---------------------------------------------------------------- exact

/// Exact identity catalog.
pub fn check_identities() -> CheckRecord {
    let mut c = CheckRecord::new("identities", None, 0.0);
    for id in IdentityId::ALL {
        let v = identity_check(id);
        c.samples += 1;
        c.residual(v.residual_terms as f64);
        c.notes.push(format!("{id}: {}", id.statement()));
        if !v.holds {
            c.fail(format!("{id} leaves {} terms; {}", v.residual_terms, witness_text(&v.witness)));
        }
    }
    c.settle()
}

/// Printed formulas against their verified forms. Passes when each printed
/// discrepancy is detected and the corrected form holds.
pub fn check_typo_probes() -> JobOutput {
    let mut c = CheckRecord::new("printed_formula_probes", None, 0.0);
    let mut notes = Vec::new();
    for probe in TypoProbe::ALL {
        let (holds, w) = typo_probe(probe);
        c.samples += 1;
        let expected = probe == TypoProbe::WebConstantCorrected;
        if holds != expected {
            c.fail(format!("{}: holds = {holds}, expected {expected}", probe.name()));
        }
        match probe {
            TypoProbe::FirstIntegralNumerator if !holds => notes.push(format!(
                "first-integral numerator: the printed closed form x(z^2-2z-x)^2 is not x*f0^2 = x(z^2-2z+x)^2 ({})",
                witness_text(&w)
            )),
            TypoProbe::WebConstantPrinted if !holds => notes.push(format!(
                "2-web constant coefficient: the printed tail -x^3+x^2-tx+2 does not give Z1*Z2; the tail -x^3+2x^2-tx does ({})",
                witness_text(&w)
            )),
            _ => {}
        }
        c.notes.push(format!("{}: holds = {holds}", probe.name()));
    }
    JobOutput { checks: vec![c], notes }
}

fn q(n: i64) -> ExactScalar {
    ExactScalar::from_int(n)
}

/// The exact chain at `t = 4` and the doubling sign discrepancy.
pub fn check_worked_chain() -> JobOutput {
    let mut c = CheckRecord::new("group_law_worked_chain", Some("4+0i".into()), 0.0);
    let mut notes = Vec::new();
    let e = Curve::new(q(4)).expect("t = 4 is admissible");
    let p = CurvePoint::affine(q(2), ExactScalar::gaussian(0, 2));
    let zero = CurvePoint::affine(q(0), q(0));
    let one = CurvePoint::affine(q(1), q(0));
    let tpt = CurvePoint::affine(q(4), q(0));
    let steps: [(&str, bool); 4] = [
        ("(2,2i) on the curve", e.on_curve(&p)),
        ("2*(2,2i) = (0,0)", e.double(&p) == zero),
        ("(0,0)+(1,0) = (t,0)", e.add(&zero, &one) == tpt),
        ("4*(2,2i) = inf", e.mul(4, &p).is_infinity()),
    ];
    for (what, ok) in steps {
        c.samples += 1;
        c.notes.push(format!("{what}: {ok}"));
        if !ok {
            c.fail(format!("{what} fails"));
        }
    }
    let printed = e.double_printed(&p);
    let detected = printed != e.double(&p);
    c.samples += 1;
    if detected {
        let pretty = match &printed {
            CurvePoint::Affine { x, y } => format!("({x}, {y})"),
            CurvePoint::Infinity => "inf".into(),
        };
        let on = if e.on_curve(&printed) { "on" } else { "off" };
        notes.push(format!(
            "doubling: the printed formula x~ = l^2-(1+t)-2x, y~ = l x - x~ - y sends (2,2i) at t=4 to {pretty}, {on} the curve; \
             the tangent construction x~ = l^2+(1+t)-2x, y~ = -(y + l(x~-x)) gives 2*(2,2i) = (0,0)"
        ));
    } else {
        c.fail("printed doubling formula agrees with 2P; discrepancy not detected");
    }
    c.notes.push(format!("doubling sign discrepancy detected: {detected}"));
    JobOutput { checks: vec![c.settle()], notes }
}

fn exact_labels() -> (Curve<ExactScalar>, Vec<CurvePoint<ExactScalar>>) {
    // (-3, 6) has infinite order on y^2 = x(x-1)(x+6)
    let e = Curve::new(q(-6)).expect("t = -6 is admissible");
    let g = CurvePoint::affine(q(-3), q(6));
    let mut labels = Vec::new();
    for k in 1..4 {
        let m = e.mul(k, &g);
        labels.push(e.neg(&m));
        for torsion in e.two_torsion() {
            labels.push(e.add(&m, &torsion));
        }
    }
    (e, labels)
}

/// Group axioms in exact arithmetic on Gaussian-rational points.
pub fn check_group_exact() -> CheckRecord {
    let mut c = CheckRecord::new("group_law_exact", Some("-6+0i".into()), 0.0);
    let (e, pts) = exact_labels();
    let pts = &pts[..8];
    let mut bad = 0usize;
    for a in pts {
        if !e.on_curve(a) {
            bad += 1;
            c.fail("point off the curve");
        }
        if !e.add(a, &e.neg(a)).is_infinity() {
            bad += 1;
            c.fail("inverse fails");
        }
        for b in pts {
            if e.add(a, b) != e.add(b, a) {
                bad += 1;
                c.fail("commutativity fails");
            }
            for d in pts {
                c.samples += 1;
                if e.add(&e.add(a, b), d) != e.add(a, &e.add(b, d)) {
                    bad += 1;
                    c.fail("associativity fails");
                }
            }
        }
    }
    c.residual(bad as f64);
    c.notes.push("points: multiples of (-3,6), their negatives and 2-torsion translates".into());
    c.settle()
}

/// Exact section solver at intersections of sections with Gaussian-rational
/// labels.
pub fn check_solver_exact() -> CheckRecord {
    let mut c = CheckRecord::new("section_solver_exact", Some("-6+0i".into()), 0.0);
    let (e, labels) = exact_labels();
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i + 1..] {
            if a == b || a.y().map_or(true, ExactScalar::is_zero) || b.y().map_or(true, ExactScalar::is_zero) {
                continue;
            }
            let s1 = SectionParam::from_label(&e, a);
            let s2 = SectionParam::from_label(&e, b);
            let Ok(p) = intersection_base_point(&e, &s1, &s2) else {
                c.fail("intersection failed");
                continue;
            };
            let CurvePoint::Affine { x: u, y: v } = &p else { continue };
            if v.is_zero() {
                continue;
            }
            let z = section_value(&e, &s1, &p);
            if z.is_infinity() {
                continue;
            }
            c.samples += 1;
            match sections_through(&e, u, v, &z) {
                Ok(res) => {
                    c.residual(res.graph_residual.max(res.curve_residual));
                    let exact_labels = res.sections.iter().all(|s| match s {
                        SectionParam::Generic { x0, y0 } => y0.clone() * y0.clone() == e.cubic(x0),
                        _ => true,
                    });
                    if !exact_labels {
                        c.fail(format!("recovered label off the curve at u={u}, v={v}, z={z:?}"));
                    }
                    if !(res.sections.contains(&s1) && res.sections.contains(&s2)) {
                        c.fail(format!("solver missed a section through u={u}, v={v}"));
                    }
                }
                Err(err) => c.fail(format!("u={u}, v={v}: {err}")),
            }
        }
    }
    if c.samples < 10 {
        c.fail(format!("only {} exact samples", c.samples));
    }
    c.settle()
}

/// Orbit sizes of `<-z, 1/z>`.
pub fn check_orbits(n: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let mut c = CheckRecord::new("gamma_orbits", None, 0.0);
    let special = [c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(0.0, 0.0)];
    let mut wrong = 0usize;
    let mut drawn = 0usize;
    while c.samples < n && drawn < DRAW_BUDGET * n {
        drawn += 1;
        let z = square(rng, 3.0);
        if !sep(z, &special, 1e-6) {
            continue;
        }
        c.samples += 1;
        let size = gamma_orbit(SpherePoint::Finite(z)).len();
        if size != 4 {
            wrong += 1;
            c.fail(format!("orbit of {} has {size} points", fmt_c(z)));
        }
    }
    for z in special.map(SpherePoint::Finite).into_iter().chain([SpherePoint::Infinity]) {
        c.samples += 1;
        let size = gamma_orbit(z).len();
        c.notes.push(format!("|orbit({z})| = {size}"));
        if size != 2 {
            wrong += 1;
            c.fail(format!("orbit of {z} has {size} points"));
        }
    }
    c.residual(wrong as f64);
    c.settle()
}

/// `dF` vanishes along the Riccati direction.
pub fn check_first_integral(n: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let mut c = CheckRecord::new("first_integral_invariance", None, INVARIANCE_TOL);
    let mut pts = Vec::with_capacity(n);
    let mut drawn = 0;
    while pts.len() < n && drawn < DRAW_BUDGET * n {
        drawn += 1;
        let (x, z) = (square(rng, 2.5), square(rng, 2.5));
        if sep(x, &[c64(0.0, 0.0), c64(1.0, 0.0)], 0.05) {
            pts.push((x, z));
        }
    }
    let res: Vec<(C64, C64, Option<f64>)> = pts
        .par_iter()
        .map(|&(x, z)| {
            let r = first_integral_invariance_residual(x, z, PULLBACK_STEP).ok();
            (x, z, r.map(|r| r.residual.norm() / r.gradient_norm.max(1.0)))
        })
        .collect();
    for (x, z, r) in res {
        if let Some(r) = r {
            c.samples += 1;
            c.residual(r);
            if r > c.tolerance {
                c.fail(format!("x={}, z={}: {r:.3e}", fmt_c(x), fmt_c(z)));
            }
        }
    }
    c.settle()
}

pub fn singularity_catalog() -> CheckRecord {
    let mut c = CheckRecord::new("singularities", None, 0.0).informational();
    for s in analyze_singularities() {
        c.samples += 1;
        c.notes.push(format!(
            "x={}, z={} in chart {}: eigenvalue ratio {}, {:?}",
            s.x,
            s.z,
            s.chart.name(),
            SpherePoint::Finite(s.ratio),
            s.kind
        ));
    }
    c
}

// ---------------------------------------------------------------- numeric, per parameter

fn well_separated(ps: &[&CurvePoint<C64>]) -> bool {
    ps.iter().enumerate().all(|(i, p)| {
        ps[i + 1..].iter().all(|q| match (p.x(), q.x()) {
            (Some(a), Some(b)) => (a - b).norm() > 1e-2,
            _ => true,
        })
    })
}

fn modest(p: &CurvePoint<C64>) -> bool {
    p.x().map_or(true, |x| x.norm() < 1e3)
}

/// Associativity, commutativity and inverses on seeded triples.
pub fn check_group_numeric(t: Param, n: usize, tol: f64, rng: &mut ChaCha8Rng) -> CheckRecord {
    let tn = Some(t.to_string());
    let e = match curve_at(t) {
        Ok(e) => e,
        Err(err) => return broken("group_law", tn, err),
    };
    let mut c = CheckRecord::new("group_law", tn, tol);
    let mut skipped = 0usize;
    let mut drawn = 0;
    while c.samples < n && drawn < DRAW_BUDGET * n {
        drawn += 1;
        let (p, q, r) = (e.random_point(rng, 2.0), e.random_point(rng, 2.0), e.random_point(rng, 2.0));
        let pq = e.add(&p, &q);
        let qr = e.add(&q, &r);
        if !(well_separated(&[&p, &q, &r, &pq, &qr]) && modest(&pq) && modest(&qr)) {
            skipped += 1;
            continue;
        }
        c.samples += 1;
        let left = e.add(&pq, &r);
        let right = e.add(&p, &qr);
        let inverse = if e.add(&p, &e.neg(&p)).is_infinity() { 0.0 } else { f64::INFINITY };
        let worst = Curve::distance(&left, &right)
            .max(Curve::distance(&pq, &e.add(&q, &p)))
            .max(inverse)
            .max(e.relative_residual(&left));
        c.residual(worst);
        if worst > tol {
            c.fail(format!("x(P)={}, x(Q)={}, x(R)={}: {worst:.3e}", fmt_c(*p.x().unwrap()), fmt_c(*q.x().unwrap()), fmt_c(*r.x().unwrap())));
        }
    }
    if c.samples < n {
        c.fail(format!("only {} of {n} triples were well separated", c.samples));
    }
    c.notes.push(format!("{skipped} near-coincident triples redrawn"));
    c.settle()
}

/// `|F - t| / |t|` at the roots of the discriminant.
pub fn check_delta_leaf(t: Param, n: usize, tol: f64, rng: &mut ChaCha8Rng) -> CheckRecord {
    let mut c = CheckRecord::new("delta_leaf", Some(t.to_string()), tol);
    let mut us = Vec::with_capacity(n);
    let mut drawn = 0;
    while us.len() < n && drawn < DRAW_BUDGET * n {
        drawn += 1;
        let u = square(rng, 2.5);
        if sep(u, &[c64(0.0, 0.0), c64(1.0, 0.0), t.0], 0.05) {
            us.push(u);
        }
    }
    let res: Vec<(C64, Result<f64, CoreError>)> = us.par_iter().map(|&u| (u, delta_leaf_check(t.0, u))).collect();
    for (u, r) in res {
        c.samples += 1;
        match r {
            Ok(r) => {
                c.residual(r);
                if r > tol {
                    c.fail(format!("u={}: {r:.3e}", fmt_c(u)));
                }
            }
            Err(err) => {
                c.residual(f64::INFINITY);
                c.fail(format!("u={}: {err}", fmt_c(u)));
            }
        }
    }
    if c.samples < n {
        c.fail(format!("only {} of {n} samples drawn", c.samples));
    }
    c.notes.push("all four roots of Delta(u, .) per sample, including roots at infinity".into());
    c.settle()
}

fn exclusion_note(x: &ExclusionCounts) -> String {
    format!(
        "rejected candidates: {} near singular fibers, {} near Delta, {} with colliding slopes, {} failed evaluations",
        x.singular_fiber, x.delta, x.slope_collision, x.evaluation_error
    )
}

/// Harmonic relation `Z1 + Z2 = 2 Z0` and cross-ratio `-1` at seeded web
/// points off the discriminant.
pub fn check_harmonic(t: Param, n: usize, region: &Region, harmonic_tol: f64, cr_tol: f64, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let tn = Some(t.to_string());
    let e = match curve_at(t) {
        Ok(e) => e,
        Err(err) => return vec![broken("harmonic", tn, err)],
    };
    let (pts, excluded) = sample_web_points(&e, region, &Exclusion::default(), n, rng);
    let mut h = CheckRecord::new("harmonic", tn.clone(), harmonic_tol);
    let mut cr = CheckRecord::new("cross_ratio", tn, cr_tol);
    let res: Vec<(f64, Result<C64, CoreError>)> = pts.par_iter().map(|p| (harmonic_residual(p), cross_ratio_at(p))).collect();
    for (p, (hr, crv)) in pts.iter().zip(res) {
        let at = format!("u={}, z={}", fmt_c(p.x), fmt_c(p.z));
        h.samples += 1;
        cr.samples += 1;
        h.residual(hr);
        if hr > harmonic_tol {
            h.fail(format!("{at}: {hr:.3e}"));
        }
        match crv {
            Ok(v) => {
                let d = (v + 1.0).norm();
                cr.residual(d);
                if d > cr_tol {
                    cr.fail(format!("{at}: cross-ratio {}", fmt_c(v)));
                }
            }
            Err(err) => {
                cr.residual(f64::INFINITY);
                cr.fail(format!("{at}: {err}"));
            }
        }
    }
    for rec in [&mut h, &mut cr] {
        if rec.samples < n {
            rec.fail(format!("only {} of {n} points admitted", rec.samples));
        }
        rec.notes.push(exclusion_note(&excluded));
    }
    if let Some(p) = pts.first() {
        use Foliation::*;
        for (order, text) in [
            ([Fibration, Branch1, Riccati, Branch2], "(inf, Z1, Z0, Z2)"),
            ([Fibration, Branch1, Branch2, Riccati], "(inf, Z1, Z2, Z0)"),
        ] {
            if let Ok(v) = cross_ratio_ordered(p, order) {
                cr.notes.push(format!("ordering {text} gives {:.12}", v.re));
            }
        }
        cr.notes.push("cross_ratio(a,b,c,d) = ((a-c)(b-d))/((a-d)(b-c)) on (inf, Z0, Z1, Z2)".into());
    }
    h.notes.push("residual |Z1 + Z2 - 2 Z0| relative to max(1, |Z0|, |Z1|, |Z2|)".into());
    vec![h.settle(), cr.settle()]
}

/// Soundness of the section solver at seeded `(u, v, z)`.
pub fn check_solver(t: Param, n: usize, region: &Region, tol: f64, rng: &mut ChaCha8Rng) -> CheckRecord {
    let tn = Some(t.to_string());
    let e = match curve_at(t) {
        Ok(e) => e,
        Err(err) => return broken("section_solver", tn, err),
    };
    let mut c = CheckRecord::new("section_solver", tn, tol);
    let mut queries = Vec::with_capacity(n);
    let mut drawn = 0;
    while queries.len() < n && drawn < DRAW_BUDGET * n {
        drawn += 1;
        let u = c64(uniform(rng, region.x_re), uniform(rng, region.x_im));
        let z = c64(uniform(rng, region.z_re), uniform(rng, region.z_im));
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        if sep(u, &[c64(0.0, 0.0), c64(1.0, 0.0), t.0], 0.05) {
            queries.push((u, sign * e.cubic(&u).sqrt(), z));
        }
    }
    let res: Vec<_> = queries.par_iter().map(|&(u, v, z)| sections_through(&e, &u, &v, &Proj::finite(z))).collect();
    let mut degenerate = 0usize;
    for ((u, v, z), r) in queries.iter().zip(res) {
        let at = format!("u={}, v={}, z={}", fmt_c(*u), fmt_c(*v), fmt_c(*z));
        match r {
            Ok(r) => {
                c.samples += 1;
                let worst = r.graph_residual.max(r.curve_residual);
                c.residual(worst);
                if worst > tol {
                    c.fail(format!("{at}: graph {:.3e}, curve {:.3e}", r.graph_residual, r.curve_residual));
                }
            }
            Err(CoreError::Degenerate(_)) => degenerate += 1,
            Err(err) => {
                c.samples += 1;
                c.residual(f64::INFINITY);
                c.fail(format!("{at}: {err}"));
            }
        }
    }
    if c.samples < n - n / 20 {
        c.fail(format!("only {} of {n} queries were solvable", c.samples));
    }
    c.notes.push(format!("{degenerate} degenerate queries skipped"));
    c.notes.push("residuals: max over both sections of |sigma(u,v) - z| and the relative curve residual of y0".into());
    c.settle()
}

/// Numeric intersection law and the calibration of the constant sections.
pub fn check_intersection_law(t: Param, n: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let tn = Some(t.to_string());
    let e = match curve_at(t) {
        Ok(e) => e,
        Err(err) => return broken("intersection_law", tn, err),
    };
    let mut c = CheckRecord::new("intersection_law", tn, INTERSECTION_TOL);
    let target = CurvePoint::affine(t.0, c64(0.0, 0.0));
    let mut pairs = Vec::with_capacity(n);
    let mut drawn = 0;
    while pairs.len() < n && drawn < DRAW_BUDGET * n {
        drawn += 1;
        let (a, b) = (e.random_point(rng, 2.0), e.random_point(rng, 2.0));
        let (xa, xb) = (*a.x().unwrap(), *b.x().unwrap());
        if (xa - xb).norm() > 0.05 && a.y().unwrap().norm() > 0.05 && b.y().unwrap().norm() > 0.05 {
            pairs.push((a, b));
        }
    }
    let res: Vec<_> = pairs
        .par_iter()
        .map(|(a, b)| intersection_offset(&e, &SectionParam::from_label(&e, a), &SectionParam::from_label(&e, b)))
        .collect();
    for ((a, b), r) in pairs.iter().zip(res) {
        c.samples += 1;
        let d = r.as_ref().map_or(f64::INFINITY, |off| Curve::distance(off, &target));
        c.residual(d);
        if d > INTERSECTION_TOL {
            c.fail(format!("labels x={}, x={}: offset distance {d:.3e}", fmt_c(*a.x().unwrap()), fmt_c(*b.x().unwrap())));
        }
    }
    let p = e.random_point(rng, 1.5);
    match calibrate_constants(&e, *p.x().unwrap(), *p.y().unwrap()) {
        Ok(cal) => {
            for (k, found) in cal {
                let ok = found.contains(&k.torsion());
                c.notes.push(format!("constant section {} has label {}: {ok}", k.name(), k.torsion().name()));
                if !ok {
                    c.fail(format!("calibration of {} found {found:?}", k.name()));
                }
            }
        }
        Err(err) => c.fail(format!("calibration failed: {err}")),
    }
    c.notes.push("offset q1 + q2 + p compared with (t, 0)".into());
    c.settle()
}

/// Default loop battery: classification, commutation and drift.
pub fn check_monodromy(t: Param, classify_tol: f64, drift_tol: f64) -> Vec<CheckRecord> {
    let tn = Some(t.to_string());
    let e = match curve_at(t) {
        Ok(e) => e,
        Err(err) => return vec![broken("monodromy", tn, err)],
    };
    let opts = TransportOptions { classify_tol, ..TransportOptions::default() };
    let battery = default_battery(&e);
    let results: Vec<Result<TransportResult, CoreError>> = battery.par_iter().map(|(_, p)| loop_monodromy(&e, p, &opts)).collect();
    let mut cls = CheckRecord::new("monodromy", tn.clone(), classify_tol);
    let mut comm = CheckRecord::new("monodromy_commutation", tn.clone(), classify_tol);
    let mut drift = CheckRecord::new("monodromy_drift", tn, drift_tol);
    let mut maps: Vec<MoebiusMap> = Vec::new();
    for ((name, _), r) in battery.iter().zip(&results) {
        cls.samples += 1;
        match r {
            Ok(r) => {
                cls.residual(r.classification.distance);
                let label = r.classification.label.map_or("unclassified", |l| l.name());
                cls.witnesses.push(format!(
                    "{name}: windings {:?} -> {label} (distance {:.2e}, fit {:.2e})",
                    r.windings, r.classification.distance, r.fit_residual
                ));
                if r.classification.label.is_none() {
                    cls.fail(format!("{name} is not in the group (nearest {})", r.classification.nearest.name()));
                }
                drift.samples += 1;
                drift.residual(r.drift_per_length());
                if r.drift_per_length() > drift_tol {
                    drift.fail(format!("{name}: drift per length {:.3e}", r.drift_per_length()));
                }
                maps.push(r.map);
            }
            Err(err) => {
                cls.residual(f64::INFINITY);
                cls.fail(format!("{name}: {err}"));
            }
        }
    }
    for (i, a) in maps.iter().enumerate() {
        for b in &maps[i + 1..] {
            comm.samples += 1;
            let d = a.compose(b).distance(&b.compose(a));
            comm.residual(d);
            if d > classify_tol {
                comm.fail(format!("pair {i}: commutator distance {d:.3e}"));
            }
        }
    }
    cls.notes.push("loops run from a base above the branch points; each lollipop encircles one branch point".into());
    cls.notes.push("a loop maps to the translation by the 2-torsion points it encircles, read from the winding numbers".into());
    vec![cls.settle(), comm.settle(), drift.settle()]
}

/// Curvature and hexagon certificates of the four 3-subwebs, or of the
/// control web in their place.
pub fn check_parallelizability(t: Param, n: usize, region: &Region, control: bool, rng: &mut ChaCha8Rng) -> CheckRecord {
    let name = if control { "parallelizability_control" } else { "parallelizability" };
    let tn = Some(t.to_string());
    let e = match curve_at(t) {
        Ok(e) => e,
        Err(err) => return broken(name, tn, err),
    };
    let mut c = CheckRecord::new(name, tn, 1.0);
    let (pts, excluded) = sample_web_points(&e, region, &Exclusion::default(), n, rng);
    let certs: Vec<_> = pts.par_iter().map(|p| certify_point(&e, *p, control)).collect();
    let summary = certs
        .iter()
        .map(ParallelizabilitySummary::from_certificate)
        .fold(ParallelizabilitySummary::default(), ParallelizabilitySummary::merge);
    c.samples = summary.points;
    c.residual(summary.max_curvature_ratio);
    for (p, cert) in pts.iter().zip(&certs) {
        let at = format!("u={}, z={}", fmt_c(p.x), fmt_c(p.z));
        match cert {
            Ok(cert) if cert.passes() => {}
            Ok(cert) => {
                let ks: Vec<String> = cert.curvatures.iter().map(|k| format!("{}: K={:.3e}+-{:.1e}", k.subweb.name(), k.value.norm(), k.error)).collect();
                let hs: Vec<String> = cert.hexagons.iter().map(|(id, h)| format!("{}: order {:.2}", id.name(), h.fitted_order)).collect();
                if c.witnesses.len() < 5 {
                    c.witnesses.push(format!("{at}: {}; {}", ks.join(", "), hs.join(", ")));
                }
            }
            Err(err) => {
                if c.witnesses.len() < 5 {
                    c.witnesses.push(format!("{at}: {err}"));
                }
            }
        }
    }
    if !summary.parallelizable() {
        c.fail(format!("{} of {} points failed, {} with errors", summary.failed_points, summary.points, summary.errors));
    }
    if summary.points < n {
        c.fail(format!("only {} of {n} points admitted", summary.points));
    }
    c.notes.push(format!(
        "max |K| / (10 err + 1e-7) = {:.3e}; min hexagon order = {:.3}; {} noise-limited hexagons",
        summary.max_curvature_ratio, summary.min_hexagon_order, summary.noise_limited_hexagons
    ));
    c.notes.push(format!("max |cross_ratio + 1| = {:.3e}", summary.max_cross_ratio_error));
    c.notes.push(exclusion_note(&excluded));
    if control {
        c.notes.push("control web: slopes 0, 1 and a + b in the plane (a, b)".into());
    }
    c.settle()
}

/// Pullback of the first integral and of the 2-web by `psi`.
pub fn check_pullback(t: Param, n: usize, fi_tol: f64, ode_tol: f64, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let tn = Some(t.to_string());
    let e = match curve_at(t) {
        Ok(e) => e,
        Err(err) => return vec![broken("pullback_first_integral", tn, err)],
    };
    let mut fi = CheckRecord::new("pullback_first_integral", tn.clone(), fi_tol);
    let mut ode = CheckRecord::new("pullback_double_star", tn.clone(), ode_tol);
    let mut leaves = CheckRecord::new("pullback_leaves", tn, 1e-6).informational();
    let tt = t.0;
    let mut samples = Vec::with_capacity(n);
    let mut drawn = 0;
    while samples.len() < n && drawn < DRAW_BUDGET * n {
        drawn += 1;
        let p = e.random_point(rng, 2.0);
        let (x, y) = (*p.x().unwrap(), *p.y().unwrap());
        let z = square(rng, 2.0);
        let clear = y.norm() > 0.05
            && (x - tt).norm() > 0.05
            && (x * x - tt).norm() > 0.05
            && sep(z, &[c64(0.0, 0.0), c64(2.0, 0.0)], 0.05)
            && sep(x, &[c64(0.0, 0.0), c64(1.0, 0.0)], 0.05);
        if clear && psi_map(&e, x, y, SpherePoint::Finite(z)).is_ok() {
            samples.push((x, y, z));
        }
    }
    let res: Vec<_> = samples
        .par_iter()
        .map(|&(x, y, z)| {
            let f = psi_map(&e, x, y, SpherePoint::Finite(z))
                .and_then(|(bx, bz)| first_integral(bx, bz))
                .and_then(|lhs| {
                    let rhs = pulled_back_integral(z)?;
                    let lhs = lhs.value().ok_or(CoreError::Pole("pulled-back first integral"))?;
                    Ok((lhs - rhs).norm() / rhs.norm().max(1e-300))
                });
            let o = pulled_back_web_slopes(&e, x, y, z, PULLBACK_STEP).and_then(|ms| {
                let mut worst = 0f64;
                for m in ms {
                    let r = ode_double_star_residual(x, z, m, tt)?;
                    worst = worst.max(r.norm() / m.norm_sqr().max(1.0));
                }
                Ok(worst)
            });
            let l = (0..3).try_fold(0f64, |acc, k| psi_leaf_residual(&e, x, y, k, PULLBACK_STEP).map(|r| acc.max(r.norm())));
            (f, o, l)
        })
        .collect();
    for (&(x, _, z), (f, o, l)) in samples.iter().zip(res) {
        let at = format!("X={}, Z={}", fmt_c(x), fmt_c(z));
        for (rec, r) in [(&mut fi, f), (&mut ode, o), (&mut leaves, l)] {
            rec.samples += 1;
            match r {
                Ok(v) => {
                    rec.residual(v);
                    if v > rec.tolerance && rec.witnesses.len() < 5 {
                        rec.fail(format!("{at}: {v:.3e}"));
                    }
                }
                Err(err) => {
                    rec.residual(f64::INFINITY);
                    rec.fail(format!("{at}: {err}"));
                }
            }
        }
    }
    for rec in [&mut fi, &mut ode] {
        if rec.samples < n {
            rec.fail(format!("only {} of {n} samples drawn", rec.samples));
        }
    }
    fi.notes.push("fiber map built with z3 := z2 = -z1; F(psi(X, Y, Z)) compared with (Z^2-2Z+2)^2/(Z^2(Z-2)^2)".into());
    fi.notes.push("samples avoid X^2 = t, where z0 = z1 and the fiber map degenerates".into());
    ode.notes.push("residual |(dZ/dX)^2 + N(Z)/(4X(X-1)(X-t))| / max(1, |dZ/dX|^2) at both pulled-back web slopes".into());
    leaves.notes.push("dz_i/dX - Z0 dx/dX for the three pulled-back graphs".into());
    vec![fi.settle(), ode.settle(), leaves.settle()]
}

// ---------------------------------------------------------------- orchestration

#[derive(Debug, Clone, Copy)]
enum Job {
    Identities,
    TypoProbes,
    WorkedChain,
    GroupExact,
    SolverExact,
    Orbits,
    FirstIntegral,
    Singularities,
    GroupNumeric(Param),
    DeltaLeaf(Param),
    Harmonic(Param),
    Solver(Param),
    IntersectionLaw(Param),
    Monodromy(Param),
    Parallel(Param, usize),
    Pullback(Param),
}

fn jobs(config: &SuiteConfig) -> Vec<Job> {
    let mut out = vec![Job::Identities, Job::TypoProbes, Job::WorkedChain];
    if config.mode.exact() {
        out.push(Job::GroupExact);
        out.push(Job::SolverExact);
    }
    out.push(Job::Orbits);
    out.push(Job::FirstIntegral);
    out.push(Job::Singularities);
    for (i, t) in config.parameters().into_iter().enumerate() {
        if config.mode.numeric() {
            out.push(Job::GroupNumeric(t));
            out.push(Job::Solver(t));
        }
        out.push(Job::DeltaLeaf(t));
        out.push(Job::Harmonic(t));
        out.push(Job::IntersectionLaw(t));
        out.push(Job::Monodromy(t));
        let n = if i == 0 { config.samples.curvature_points } else { config.samples.sweep_curvature_points };
        out.push(Job::Parallel(t, n));
        out.push(Job::Pullback(t));
    }
    out
}

fn run_job(job: Job, config: &SuiteConfig, rng: &mut ChaCha8Rng) -> JobOutput {
    let s = &config.samples;
    let tol = &config.tol;
    match job {
        Job::Identities => check_identities().into(),
        Job::TypoProbes => check_typo_probes(),
        Job::WorkedChain => check_worked_chain(),
        Job::GroupExact => check_group_exact().into(),
        Job::SolverExact => check_solver_exact().into(),
        Job::Orbits => check_orbits(s.orbit_points, rng).into(),
        Job::FirstIntegral => check_first_integral(s.pullback_points, rng).into(),
        Job::Singularities => singularity_catalog().into(),
        Job::GroupNumeric(t) => check_group_numeric(t, s.group_triples, tol.group, rng).into(),
        Job::DeltaLeaf(t) => check_delta_leaf(t, s.delta_u, tol.delta, rng).into(),
        Job::Harmonic(t) => check_harmonic(t, s.harmonic_points, &config.region, tol.harmonic, tol.cross_ratio, rng).into(),
        Job::Solver(t) => check_solver(t, s.solver_points, &config.region, tol.solver, rng).into(),
        Job::IntersectionLaw(t) => check_intersection_law(t, s.solver_points.min(200), rng).into(),
        Job::Monodromy(t) => check_monodromy(t, tol.monodromy, tol.drift).into(),
        Job::Parallel(t, n) => check_parallelizability(t, n, &config.region, config.control_web, rng).into(),
        Job::Pullback(t) => check_pullback(t, s.pullback_points, tol.pullback, tol.double_star, rng).into(),
    }
}

/// Runs every check of the configuration and assembles the report. The
/// configuration must have been validated.
pub fn run_suite(config: &SuiteConfig) -> VerificationReport {
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let planned: Vec<(Job, u64)> = jobs(config).into_iter().map(|j| (j, master.gen())).collect();
    let outputs: Vec<JobOutput> = planned
        .into_par_iter()
        .map(|(job, seed)| run_job(job, config, &mut ChaCha8Rng::seed_from_u64(seed)))
        .collect();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for o in outputs {
        checks.extend(o.checks);
        notes.extend(o.notes);
    }
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    VerificationReport::assemble(config, checks, notes, timestamp)
}
