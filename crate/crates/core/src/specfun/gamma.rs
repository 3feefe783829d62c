//! Log-gamma for complex and real arguments.
//!
//! Arguments are shifted up by the recurrence until `|s| >= 10`, then the
//! Stirling series with eight Bernoulli terms is applied. The truncation
//! error at `|s| = 10` is below 2e-18, so the result is limited by the
//! rounding of the shift sum only.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k (2k - 1)), k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const STIRLING_RADIUS: f64 = 10.0;

/// Smallest distance from `s` to a non-positive integer.
pub fn pole_distance(s: Complex64) -> f64 {
    let nearest = s.re.round().min(0.0);
    (s - nearest).norm()
}

/// Principal branch of log Gamma(s).
///
/// The branch satisfies `ln_gamma(s + 1) = ln_gamma(s) + ln(s)` with the
/// principal complex logarithm, so it is continuous off the negative real
/// axis and agrees with the real log-gamma on the positive axis.
pub fn log_gamma_complex(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::invalid("s", "argument must be finite"));
    }
    let distance = pole_distance(s);
    if distance < 1e-12 {
        return Err(Error::PoleProximity {
            re: s.re,
            im: s.im,
            distance,
        });
    }
    Ok(ln_gamma_c(s))
}

/// Unchecked complex log-gamma used inside integrands. Poles give +inf.
#[inline]
pub(crate) fn ln_gamma_c(s: Complex64) -> Complex64 {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    if z.re < 0.0 {
        let n = (-z.re).ceil();
        for k in 0..n as usize {
            shift += (s + k as f64).ln();
        }
        z = s + n;
    }
    while z.norm_sqr() < STIRLING_RADIUS * STIRLING_RADIUS {
        shift += z.ln();
        z += 1.0;
    }
    stirling_c(z) - shift
}

#[inline]
fn stirling_c(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(STIRLING[7], 0.0);
    for &c in STIRLING[..7].iter().rev() {
        series = series * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series * inv
}

/// log |Gamma(x)| for real `x`; `+inf` at the poles.
pub fn ln_abs_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // reflection keeps the shift short for large negative x
        let sin = (PI * x).sin().abs();
        return PI.ln() - sin.ln() - ln_abs_gamma(1.0 - x);
    }
    let mut z = x;
    let mut prod = 1.0;
    while z < STIRLING_RADIUS {
        prod *= z;
        z += 1.0;
    }
    stirling_r(z) - prod.ln()
}

/// log Gamma(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    ln_abs_gamma(x)
}

#[inline]
fn stirling_r(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = STIRLING[7];
    for &c in STIRLING[..7].iter().rev() {
        series = series * inv2 + c;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series * inv
}

/// log of the binomial coefficient C(n, k).
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    assert!(k <= n, "binomial C({n}, {k}) undefined");
    ln_gamma(f64::from(n) + 1.0) - ln_gamma(f64::from(k) + 1.0) - ln_gamma(f64::from(n - k) + 1.0)
}
