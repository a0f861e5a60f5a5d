//! Root finding for the low-degree polynomials that occur here: a
//! cancellation-free quadratic formula and simultaneous Aberth iteration for
//! anything larger.

use alloc::vec::Vec;

use crate::upoly;
use crate::{c64, C64};

/// Relative size below which a leading coefficient counts as vanished.
pub const DEGREE_DROP_TOL: f64 = 1e-13;

/// Roots of `a z^2 + b z + c`, with degree drops reported as roots at
/// infinity (`None`). Always returns exactly two entries unless the
/// polynomial is identically zero, in which case it returns none.
pub fn solve_quadratic(a: C64, b: C64, c: C64) -> Vec<Option<C64>> {
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale == 0.0 {
        return Vec::new();
    }
    let tiny = |w: C64| w.norm() <= DEGREE_DROP_TOL * scale;
    if tiny(a) {
        if tiny(b) {
            return alloc::vec![None, None];
        }
        return alloc::vec![Some(-c / b), None];
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    // pick the sign that avoids cancellation in b + sign * sqrt
    let s = if (b.conj() * disc).re >= 0.0 { disc } else { -disc };
    let big = -(b + s) / 2.0;
    if big.norm() == 0.0 {
        // b = 0 and disc = 0: the double root 0
        return alloc::vec![Some(c64(0.0, 0.0)), Some(c64(0.0, 0.0))];
    }
    let r1 = big / a;
    let r2 = c / big;
    alloc::vec![Some(r1), Some(r2)]
}

/// All complex roots of a polynomial of degree `>= 1` (coefficients lowest
/// first, leading coefficient nonzero) by Aberth-Ehrlich iteration followed
/// by Newton polishing.
pub fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let p = upoly::trim(coeffs, 0.0);
    let n = p.len().saturating_sub(1);
    match n {
        0 => return Vec::new(),
        1 => return alloc::vec![-p[0] / p[1]],
        2 => {
            return solve_quadratic(p[2], p[1], p[0])
                .into_iter()
                .map(|r| r.expect("leading coefficient is nonzero"))
                .collect()
        }
        _ => {}
    }
    let lead = p[n];
    // Cauchy-type bound for the initial circle
    let radius = 1.0 + p[..n].iter().map(|c| (c / lead).norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let angle = core::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
            C64::from_polar(radius * 0.5, angle)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0f64;
        for i in 0..n {
            let (v, d) = upoly::eval_with_derivative(&p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: C64 = (0..n)
                .filter(|j| *j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    for r in z.iter_mut() {
        *r = newton_polish(&p, *r, 4);
    }
    z
}

/// A few Newton steps, stopping as soon as a step fails to reduce the
/// residual.
pub fn newton_polish(coeffs: &[C64], mut r: C64, steps: usize) -> C64 {
    let mut best = upoly::eval(coeffs, r).norm();
    for _ in 0..steps {
        let (v, d) = upoly::eval_with_derivative(coeffs, r);
        if d.norm() == 0.0 {
            break;
        }
        let cand = r - v / d;
        let val = upoly::eval(coeffs, cand).norm();
        if val < best {
            best = val;
            r = cand;
        } else {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn quadratic_without_cancellation() {
        // roots 1e8 and 1e-8
        let r = solve_quadratic(c64(1.0, 0.0), c64(-(1e8 + 1e-8), 0.0), c64(1.0, 0.0));
        let (a, b) = (r[0].unwrap(), r[1].unwrap());
        assert!(close(a, c64(1e8, 0.0), 1e-15));
        assert!((b - c64(1e-8, 0.0)).norm() < 1e-22);
    }

    #[test]
    fn quadratic_degree_drop() {
        let r = solve_quadratic(c64(0.0, 0.0), c64(2.0, 0.0), c64(-4.0, 0.0));
        assert_eq!(r, alloc::vec![Some(c64(2.0, 0.0)), None]);
        assert!(solve_quadratic(c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)).is_empty());
    }

    #[test]
    fn quartic_roots_recovered() {
        let want = [c64(1.0, 1.0), c64(-2.0, 0.5), c64(0.3, -0.7), c64(4.0, 0.0)];
        let p = upoly::from_roots(&want);
        let got = polynomial_roots(&p);
        for w in want {
            assert!(got.iter().any(|g| close(*g, w, 1e-12)), "{w} missing from {got:?}");
        }
    }

    #[test]
    fn double_root_is_found_twice() {
        let p = upoly::from_roots(&[c64(1.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0)]);
        let got = polynomial_roots(&p);
        assert_eq!(got.iter().filter(|g| close(**g, c64(1.0, 0.0), 1e-7)).count(), 2);
    }
}
