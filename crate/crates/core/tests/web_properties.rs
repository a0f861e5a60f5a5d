use proptest::prelude::*;
use s1web_core::curve::{Curve, CurvePoint};
use s1web_core::moebius::{cross_ratio, gamma_orbit, MoebiusMap, SpherePoint};
use s1web_core::riccati::{first_integral_invariance_residual, slope_z0};
use s1web_core::sections::{
    delta_leaf_check, intersection_offset, section_value, sections_through, web_slopes, Proj, SectionParam,
};
use s1web_core::web::{assemble_web_point, cross_ratio_at, harmonic_residual};
use s1web_core::{c64, CoreError, ExactScalar, C64};

fn cplx() -> impl Strategy<Value = C64> {
    (-2.5f64..2.5, -2.5f64..2.5).prop_map(|(a, b)| c64(a, b))
}

fn t_param() -> impl Strategy<Value = C64> {
    prop_oneof![
        Just(c64(2.0, 0.0)),
        Just(c64(4.0, 0.0)),
        Just(c64(1.0, 1.0)),
        Just(c64(-3.0, 0.0)),
        (-3.0f64..3.0, 0.3f64..2.0).prop_map(|(a, b)| c64(a, b)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn harmonic_relation(t in t_param(), u in cplx(), z in cplx()) {
        let e = Curve::new(t).unwrap();
        prop_assume!([c64(0.0, 0.0), c64(1.0, 0.0), t].iter().all(|b| (u - b).norm() > 0.05));
        let v = e.cubic(&u).sqrt();
        let p = match assemble_web_point(&e, u, v, z) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        prop_assume!(!p.on_delta);
        let [_, z0, z1, z2] = p.slopes.map(|s| s.value().unwrap_or_default());
        prop_assume!((z1 - z2).norm() > 1e-4 * z1.norm().max(1.0));
        prop_assert!(harmonic_residual(&p) < 1e-10);
        let scale = (z0 - z1).norm().max(1e-300);
        let cr = cross_ratio_at(&p).unwrap();
        prop_assert!((cr + 1.0).norm() < 1e-9 * (1.0 + z0.norm() / scale), "cr = {}", cr);
    }

    #[test]
    fn solver_reproduces_query(t in t_param(), u in cplx(), z in cplx()) {
        let e = Curve::new(t).unwrap();
        prop_assume!([c64(0.0, 0.0), c64(1.0, 0.0), t].iter().all(|b| (u - b).norm() > 0.05));
        let v = e.cubic(&u).sqrt();
        match sections_through(&e, &u, &v, &Proj::finite(z)) {
            Ok(res) => {
                prop_assert!(res.graph_residual < 1e-9, "graph {}", res.graph_residual);
                prop_assert!(res.curve_residual < 1e-9, "curve {}", res.curve_residual);
            }
            Err(CoreError::Degenerate(_)) => {}
            Err(err) => return Err(TestCaseError::fail(format!("{err}"))),
        }
    }

    #[test]
    fn delta_roots_lie_on_the_t_level(t in t_param(), u in cplx()) {
        prop_assume!([c64(0.0, 0.0), t].iter().all(|b| (u - b).norm() > 0.05));
        prop_assert!(delta_leaf_check(t, u).unwrap() < 1e-8);
    }

    #[test]
    fn first_integral_is_invariant(x in cplx(), z in cplx()) {
        prop_assume!(x.norm() > 0.05 && (x - 1.0).norm() > 0.05);
        let r = match first_integral_invariance_residual(x, z, 1e-4) {
            Ok(r) => r,
            Err(_) => return Ok(()),
        };
        prop_assert!(r.residual.norm() <= 1e-6 * r.gradient_norm.max(1.0));
    }

    #[test]
    fn offset_law_numeric(t in t_param(), a in cplx(), b in cplx()) {
        let e = Curve::new(t).unwrap();
        let pa = e.sample_point(a);
        let pb = e.sample_point(b);
        prop_assume!((a - b).norm() > 0.05);
        prop_assume!(pa.y().unwrap().norm() > 0.05 && pb.y().unwrap().norm() > 0.05);
        let s1 = SectionParam::from_label(&e, &pa);
        let s2 = SectionParam::from_label(&e, &pb);
        let off = intersection_offset(&e, &s1, &s2).unwrap();
        prop_assert!(Curve::distance(&off, &CurvePoint::affine(t, c64(0.0, 0.0))) < 1e-7, "{:?}", off);
    }

    #[test]
    fn cross_ratio_is_moebius_invariant(a in cplx(), b in cplx(), c in cplx(), d in cplx(), m in (cplx(), cplx(), cplx(), cplx())) {
        let g = match MoebiusMap::new(m.0, m.1, m.2, m.3) {
            Ok(g) => g,
            Err(_) => return Ok(()),
        };
        let pts = [a, b, c, d].map(SpherePoint::Finite);
        let before = match cross_ratio(pts[0], pts[1], pts[2], pts[3]) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        prop_assume!(pts.iter().enumerate().all(|(i, p)| pts[i + 1..].iter().all(|q| p.chordal_distance(*q) > 1e-3)));
        let img = pts.map(|p| g.apply(p));
        let after = cross_ratio(img[0], img[1], img[2], img[3]).unwrap();
        prop_assert!((before - after).norm() < 1e-6 * before.norm().max(1.0));
    }

    #[test]
    fn orbit_sizes(z in cplx()) {
        let special = [c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(0.0, 0.0)];
        prop_assume!(special.iter().all(|s| (z - s).norm() > 1e-6));
        prop_assert_eq!(gamma_orbit(SpherePoint::Finite(z)).len(), 4);
    }
}

#[test]
fn special_orbits_have_two_points() {
    for z in [
        SpherePoint::finite(1.0, 0.0),
        SpherePoint::finite(-1.0, 0.0),
        SpherePoint::finite(0.0, 1.0),
        SpherePoint::finite(0.0, -1.0),
        SpherePoint::finite(0.0, 0.0),
        SpherePoint::Infinity,
    ] {
        assert_eq!(gamma_orbit(z).len(), 2, "{z}");
    }
}

#[test]
fn slope_sum_is_twice_riccati() {
    let e = Curve::new(c64(4.0, 0.0)).unwrap();
    let u = c64(0.7, 0.9);
    let v = e.cubic(&u).sqrt();
    let z = c64(-0.4, 0.2);
    let (m1, m2) = web_slopes(&e, u, v, z).unwrap();
    assert!((m1 + m2 - 2.0 * slope_z0(u, z).unwrap()).norm() < 1e-10);
}

fn q(n: i64) -> ExactScalar {
    ExactScalar::from_int(n)
}

#[test]
fn exact_solver_on_gaussian_rational_samples() {
    // (-3, 6) has infinite order on y^2 = x(x-1)(x+6)
    let e = Curve::new(q(-6)).unwrap();
    let g = CurvePoint::affine(q(-3), q(6));
    assert!(e.on_curve(&g));
    let mut labels = Vec::new();
    for k in 1..4 {
        labels.push(e.mul(k, &g));
        labels.push(e.neg(&e.mul(k, &g)));
        for torsion in &e.two_torsion()[1..] {
            labels.push(e.add(&e.mul(k, &g), torsion));
        }
    }
    let mut checked = 0;
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i + 1..] {
            let (Some(_), Some(_)) = (a.y(), b.y()) else { continue };
            if a == b || e.torsion_label(a).is_some() || e.torsion_label(b).is_some() {
                continue;
            }
            let s1 = SectionParam::from_label(&e, a);
            let s2 = SectionParam::from_label(&e, b);
            let p = s_intersection(&e, &s1, &s2);
            let CurvePoint::Affine { x: u, y: v } = &p else { continue };
            if v == &q(0) {
                continue;
            }
            let z = section_value(&e, &s1, &p);
            if z.is_infinity() {
                continue;
            }
            let res = sections_through(&e, u, v, &z).unwrap();
            assert_eq!(res.graph_residual, 0.0);
            assert_eq!(res.curve_residual, 0.0);
            for s in &res.sections {
                if let SectionParam::Generic { x0, y0 } = s {
                    assert_eq!(y0.clone() * y0.clone(), e.cubic(x0));
                }
            }
            assert!(res.sections.iter().any(|s| *s == s1) && res.sections.iter().any(|s| *s == s2));
            checked += 1;
        }
    }
    assert!(checked >= 10, "{checked}");
}

fn s_intersection(e: &Curve<ExactScalar>, a: &SectionParam<ExactScalar>, b: &SectionParam<ExactScalar>) -> CurvePoint<ExactScalar> {
    s1web_core::sections::intersection_base_point(e, a, b).unwrap()
}
