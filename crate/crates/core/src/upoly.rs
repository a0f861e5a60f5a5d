//! Dense univariate complex polynomials, coefficients lowest degree first.

use alloc::vec::Vec;

use crate::{c64, C64};

/// Horner evaluation.
pub fn eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().rev().fold(c64(0.0, 0.0), |acc, c| acc * x + c)
}

/// Value and first derivative at `x`.
pub fn eval_with_derivative(coeffs: &[C64], x: C64) -> (C64, C64) {
    let mut p = c64(0.0, 0.0);
    let mut dp = c64(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

pub fn derivative(coeffs: &[C64]) -> Vec<C64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// Drops leading coefficients with modulus at most `tol` times the largest
/// coefficient modulus.
pub fn trim(coeffs: &[C64], tol: f64) -> Vec<C64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out = coeffs.to_vec();
    while let Some(last) = out.last() {
        if last.norm() <= tol * scale {
            out.pop();
        } else {
            break;
        }
    }
    out
}

/// Degree after trimming, `None` for the zero polynomial.
pub fn degree(coeffs: &[C64], tol: f64) -> Option<usize> {
    trim(coeffs, tol).len().checked_sub(1)
}

/// Quotient of synthetic division by `(x - r)`; the remainder is discarded.
pub fn deflate(coeffs: &[C64], r: C64) -> Vec<C64> {
    let n = coeffs.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut q = alloc::vec![c64(0.0, 0.0); n - 1];
    let mut carry = coeffs[n - 1];
    q[n - 2] = carry;
    for k in (1..n - 1).rev() {
        carry = coeffs[k] + carry * r;
        q[k - 1] = carry;
    }
    q
}

/// Monic polynomial with the given roots.
pub fn from_roots(roots: &[C64]) -> Vec<C64> {
    let mut p = alloc::vec![c64(1.0, 0.0)];
    for r in roots {
        let mut next = alloc::vec![c64(0.0, 0.0); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        p = next;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivative() {
        let p = [c64(1.0, 0.0), c64(-3.0, 0.0), c64(2.0, 0.0)]; // 2x^2 - 3x + 1
        assert_eq!(eval(&p, c64(2.0, 0.0)), c64(3.0, 0.0));
        let (v, d) = eval_with_derivative(&p, c64(2.0, 0.0));
        assert_eq!((v, d), (c64(3.0, 0.0), c64(5.0, 0.0)));
        assert_eq!(derivative(&p), [c64(-3.0, 0.0), c64(4.0, 0.0)]);
    }

    #[test]
    fn deflation_removes_a_root() {
        let p = from_roots(&[c64(1.0, 0.0), c64(2.0, 1.0), c64(-3.0, 0.0)]);
        let q = deflate(&p, c64(2.0, 1.0));
        let expect = from_roots(&[c64(1.0, 0.0), c64(-3.0, 0.0)]);
        for (a, b) in q.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn trimming() {
        let p = [c64(1.0, 0.0), c64(2.0, 0.0), c64(1e-20, 0.0)];
        assert_eq!(degree(&p, 1e-14), Some(1));
        assert_eq!(degree(&[c64(0.0, 0.0)], 1e-14), None);
    }
}
