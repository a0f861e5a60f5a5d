//! Adaptive Dormand-Prince 5(4) integration of complex systems
//! `dy/ds = f(s, y)` along a real parameter.

use crate::{CoreError, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step as a fraction of the interval.
    pub initial_fraction: f64,
    /// Steps below this fraction of the interval count as collapse.
    pub min_fraction: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            initial_fraction: 0.01,
            min_fraction: 1e-12,
            max_steps: 200_000,
        }
    }
}

/// Step statistics, additive over consecutive integrations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl OdeStats {
    pub fn merge(self, other: Self) -> Self {
        Self {
            accepted: self.accepted + other.accepted,
            rejected: self.rejected + other.rejected,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine<const N: usize>(y: &[C64; N], h: f64, terms: &[(f64, &[C64; N])]) -> [C64; N] {
    let mut out = *y;
    for (w, k) in terms {
        for i in 0..N {
            out[i] += k[i] * (h * w);
        }
    }
    out
}

/// Integrates from `s0` to `s1` (either direction) and returns the end state.
pub fn integrate<const N: usize, F>(
    mut f: F,
    s0: f64,
    s1: f64,
    y0: [C64; N],
    opts: &OdeOptions,
) -> Result<([C64; N], OdeStats), CoreError>
where
    F: FnMut(f64, &[C64; N]) -> Result<[C64; N], CoreError>,
{
    let mut stats = OdeStats::default();
    let span = s1 - s0;
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = span.signum();
    let total = span.abs();
    let h_min = total * opts.min_fraction;
    let mut h = total * opts.initial_fraction;
    let mut s = s0;
    let mut y = y0;
    let mut k1 = f(s, &y)?;
    stats.evaluations += 1;
    loop {
        let remaining = (s1 - s) * dir;
        if remaining <= total * 1e-15 {
            return Ok((y, stats));
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(CoreError::StepSizeCollapse { at: s });
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let hs = step * dir;
        let k2 = f(s + C2 * hs, &combine(&y, hs, &[(A21, &k1)]))?;
        let k3 = f(s + C3 * hs, &combine(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(s + C4 * hs, &combine(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(
            s + C5 * hs,
            &combine(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = f(
            s + hs,
            &combine(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = combine(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(s + hs, &y_new)?;
        stats.evaluations += 6;
        let mut err = 0f64;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / sc);
        }
        if !err.is_finite() {
            stats.rejected += 1;
            h = step * 0.2;
        } else if err <= 1.0 {
            stats.accepted += 1;
            s = if last { s1 } else { s + hs };
            y = y_new;
            k1 = k7;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * factor;
            continue;
        } else {
            stats.rejected += 1;
            h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h < h_min {
            return Err(CoreError::StepSizeCollapse { at: s });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn exponential_growth_and_rotation() {
        let lambda = c64(-0.3, 2.0);
        let (y, stats) = integrate(
            |_, y: &[C64; 1]| Ok([lambda * y[0]]),
            0.0,
            3.0,
            [c64(1.0, 0.0)],
            &OdeOptions::default(),
        )
        .unwrap();
        let exact = (lambda * 3.0).exp();
        assert!((y[0] - exact).norm() < 1e-9);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn backward_integration_inverts_forward() {
        let f = |s: f64, y: &[C64; 2]| Ok([y[1], -y[0] * (1.0 + 0.1 * s)]);
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..OdeOptions::default() };
        let (mid, _) = integrate(f, 0.0, 2.0, [c64(1.0, 0.5), c64(0.0, 1.0)], &opts).unwrap();
        let (back, _) = integrate(f, 2.0, 0.0, mid, &opts).unwrap();
        assert!((back[0] - c64(1.0, 0.5)).norm() < 1e-9);
        assert!((back[1] - c64(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn branch_point_collapses_step() {
        // y = sqrt(1 - s) has a square-root branch point at s = 1
        let res = integrate(|_, y: &[C64; 1]| Ok([-0.5 / y[0]]), 0.0, 2.0, [c64(1.0, 0.0)], &OdeOptions::default());
        assert!(matches!(res, Err(CoreError::StepSizeCollapse { .. })));
    }

    #[test]
    fn zero_length_is_identity() {
        let (y, stats) = integrate(|_, y: &[C64; 1]| Ok([*y.first().unwrap()]), 1.0, 1.0, [c64(2.0, 0.0)], &OdeOptions::default()).unwrap();
        assert_eq!(y[0], c64(2.0, 0.0));
        assert_eq!(stats.accepted, 0);
    }
}
