use proptest::prelude::*;
use s1web_core::poly::{curve_cubic, Assignment, Monomial, MultiPoly, Var};
use s1web_core::{c64, ExactScalar, C64};

fn poly_strategy() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0u32..3, 0u32..4, 0u32..3, 0u32..2, 0u32..2), -5i64..6), 0..6).prop_map(|terms| {
        MultiPoly::from_terms(
            terms
                .into_iter()
                .map(|((a, b, c, d, e), k)| ([a, b, c, d, e] as Monomial, ExactScalar::from_int(k))),
        )
    })
}

fn at(x: i64, y: i64, z: i64, t: i64, u: i64) -> Assignment<ExactScalar> {
    Assignment::new()
        .with(Var::X, ExactScalar::from_int(x))
        .with(Var::Y, ExactScalar::from_int(y))
        .with(Var::Z, ExactScalar::from_int(z))
        .with(Var::T, ExactScalar::from_int(t))
        .with(Var::U, ExactScalar::from_int(u))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &MultiPoly::one(), a.clone());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly_strategy(), b in poly_strategy(), pt in (-3i64..4, -3i64..4, -3i64..4, -3i64..4, -3i64..4)) {
        let s = at(pt.0, pt.1, pt.2, pt.3, pt.4);
        let ea = a.eval_exact(&s).unwrap();
        let eb = b.eval_exact(&s).unwrap();
        prop_assert_eq!((&a * &b).eval_exact(&s).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).eval_exact(&s).unwrap(), &ea + &eb);
    }

    #[test]
    fn reduction_mod_curve_agrees_on_the_curve(a in poly_strategy(), x in -4i64..5, t in 2i64..6) {
        let r = a.reduce_mod_curve();
        prop_assert!(r.degree_in(Var::Y) <= 1);
        // evaluate at a complex point of the curve
        let xc = c64(x as f64 + 0.5, 0.25);
        let tc = c64(t as f64, 0.0);
        let yc = (xc * (xc - 1.0) * (xc - tc)).sqrt();
        let s: Assignment<C64> = Assignment::new().with(Var::X, xc).with(Var::Y, yc).with(Var::Z, c64(0.7, 0.0)).with(Var::T, tc).with(Var::U, c64(1.5, 0.0));
        let lhs = a.eval_c64(&s).unwrap();
        let rhs = r.eval_c64(&s).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm().max(1.0));
        prop_assert_eq!(r.reduce_mod_curve(), r.clone());
    }

    #[test]
    fn derivative_is_a_derivation(a in poly_strategy(), b in poly_strategy()) {
        for v in Var::ALL {
            let lhs = (&a * &b).derivative(v);
            let rhs = &(&a.derivative(v) * &b) + &(&a * &b.derivative(v));
            prop_assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn cubic_reduces_to_y_squared() {
    let y2 = MultiPoly::var(Var::Y).pow(2);
    assert_eq!(y2.reduce_mod_curve(), curve_cubic());
}
