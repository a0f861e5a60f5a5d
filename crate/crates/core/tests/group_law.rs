use proptest::prelude::*;
use s1web_core::curve::{Curve, CurvePoint, TwoTorsion};
use s1web_core::{c64, ExactScalar, C64};

fn affine(re: f64, im: f64, curve: &Curve<C64>) -> CurvePoint<C64> {
    curve.sample_point(c64(re, im))
}

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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn associativity_commutativity_inverse(
        tr in -3.0f64..3.0, ti in 0.2f64..2.0,
        a in (-2.0f64..2.0, -2.0f64..2.0),
        b in (-2.0f64..2.0, -2.0f64..2.0),
        c in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let e = Curve::new(c64(tr, ti)).unwrap();
        let (p, q, r) = (affine(a.0, a.1, &e), affine(b.0, b.1, &e), affine(c.0, c.1, &e));
        let pq = e.add(&p, &q);
        let qr = e.add(&q, &r);
        prop_assume!(well_separated(&[&p, &q, &r, &pq, &qr]) && modest(&pq) && modest(&qr));
        let left = e.add(&pq, &r);
        let right = e.add(&p, &qr);
        prop_assert!(Curve::distance(&left, &right) < 1e-9);
        prop_assert!(Curve::distance(&pq, &e.add(&q, &p)) < 1e-12);
        prop_assert!(e.add(&p, &e.neg(&p)).is_infinity());
        prop_assert!(e.on_curve_tol(&left, 1e-9));
    }

    #[test]
    fn doubling_agrees_with_addition_and_formula(
        tr in -3.0f64..3.0, ti in 0.2f64..2.0,
        a in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let e = Curve::new(c64(tr, ti)).unwrap();
        let p = affine(a.0, a.1, &e);
        let x = *p.x().unwrap();
        prop_assume!(e.cubic(&x).norm() > 1e-3);
        let d = e.double(&p);
        let q = e.add(&p, &e.add(&p, &e.two_torsion_point(TwoTorsion::Zero)));
        let back = e.add(&q, &e.two_torsion_point(TwoTorsion::Zero));
        prop_assert!(Curve::distance(&d, &back) < 1e-8);
        prop_assert!((d.x().unwrap() - e.x_double_formula(&x).unwrap()).norm() < 1e-9 * d.x().unwrap().norm().max(1.0));
        prop_assert!(e.on_curve_tol(&d, 1e-9));
    }

    #[test]
    fn torsion_translation_is_an_involution(
        tr in -3.0f64..3.0, ti in 0.2f64..2.0,
        a in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let e = Curve::new(c64(tr, ti)).unwrap();
        let p = affine(a.0, a.1, &e);
        for l in TwoTorsion::ALL {
            let tp = e.two_torsion_point(l);
            let back = e.add(&e.add(&p, &tp), &tp);
            prop_assert!(Curve::distance(&back, &p) < 1e-9);
        }
    }
}

fn q(n: i64) -> ExactScalar {
    ExactScalar::from_int(n)
}

#[test]
fn exact_points_form_a_group() {
    let e = Curve::new(q(-3)).unwrap();
    let g = CurvePoint::affine(q(-1), q(2));
    let h = CurvePoint::affine(q(3), q(6));
    assert!(e.on_curve(&g) && e.on_curve(&h));
    let pts: Vec<_> = (1..4).flat_map(|k| [e.mul(k, &g), e.add(&e.mul(k, &g), &h)]).collect();
    for a in &pts {
        assert!(e.on_curve(a));
        for b in &pts {
            assert_eq!(e.add(a, b), e.add(b, a));
            for c in &pts {
                assert_eq!(e.add(&e.add(a, b), c), e.add(a, &e.add(b, c)));
            }
        }
    }
}

#[test]
fn worked_chain_at_t4() {
    let e = Curve::new(q(4)).unwrap();
    let p = CurvePoint::affine(q(2), ExactScalar::gaussian(0, 2));
    let zero = CurvePoint::affine(q(0), q(0));
    assert_eq!(e.double(&p), zero);
    assert_eq!(e.add(&zero, &CurvePoint::affine(q(1), q(0))), CurvePoint::affine(q(4), q(0)));
    assert_eq!(e.mul(4, &p), CurvePoint::Infinity);
    assert!(!e.on_curve(&e.double_printed(&p)) || e.double_printed(&p) != e.double(&p));
}

#[test]
fn klein_four_table() {
    let e = Curve::new(q(4)).unwrap();
    for a in TwoTorsion::ALL {
        for b in TwoTorsion::ALL {
            let sum = e.add(&e.two_torsion_point(a), &e.two_torsion_point(b));
            assert_eq!(sum, e.two_torsion_point(a.plus(b)));
        }
    }
}
