//! Direct numerical integration of the defining integrals, used to check
//! the closed forms through an independent route.

use std::cell::RefCell;
use std::f64::consts::LN_2;

use super::{ccdf_eq, cdf_eq, CapacityBound, ModulationScheme};
use crate::channel::{FsoLink, RfConfig};
use crate::error::{Error, Result};
use crate::specfun::ln_gamma;
use crate::specfun::quad::{integrate_gk, Quadrature};

/// Relative tolerance requested from every oracle quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-9;
/// Neglected mass at either end of an integration range.
const TAIL: f64 = 1e-15;
const MAX_SEGMENTS: usize = 4000;

/// Decade breakpoints of `ln x` on `[lo, hi]`.
fn log_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let n = ((b - a) / std::f64::consts::LN_10).ceil().max(1.0) as usize;
    (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

/// `integral f(x) dx` over `[lo, hi]` in the variable `y = ln x`.
fn integrate_log<F: Fn(f64) -> Result<f64>>(
    f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let q = integrate_gk(
        |y| {
            let x = y.exp();
            match f(x) {
                Ok(v) => v * x,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        &log_breaks(lo, hi),
        abs_tol,
        QUADRATURE_REL_TOL,
        MAX_SEGMENTS,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(q),
    }
}

/// Walk outward by decades until `done(x)` holds.
fn decade_search<F: Fn(f64) -> Result<bool>>(start: f64, factor: f64, done: F) -> Result<f64> {
    let mut x = start;
    for _ in 0..60 {
        if done(x)? {
            return Ok(x);
        }
        x *= factor;
    }
    Ok(x)
}

/// CDF of the end-to-end SNR from its definition
/// `integral F_rf(g (1 + R / x)) f_fso(x) dx`.
pub fn cdf_eq_quadrature(gamma_th: f64, rf: &RfConfig, link: &FsoLink) -> Result<Quadrature> {
    if !(gamma_th > 0.0) {
        return Err(Error::invalid("gamma_th", "threshold must be positive"));
    }
    let terms = rf.terms();
    let re = crate::channel::re_constant(rf);
    let lo = decade_search(link.mu, 0.1, |x| Ok(link.snr_cdf(x)? < TAIL))?;
    let hi = decade_search(link.mu, 10.0, |x| Ok(1.0 - link.snr_cdf(x)? < TAIL))?;
    integrate_log(
        |x| Ok(terms.cdf(gamma_th * (1.0 + re / x)) * link.snr_pdf(x)?),
        lo,
        hi,
        1e-16,
    )
}

/// Average BER from `q^p / (2 Gamma(p)) integral g^(p-1) exp(-q g) F(g) dg`.
pub fn avg_ber_quadrature(
    scheme: ModulationScheme,
    rf: &RfConfig,
    link: &FsoLink,
) -> Result<Quadrature> {
    let (p, q) = scheme.pq();
    let pre = (p * q.ln() - LN_2 - ln_gamma(p)).exp();
    let density = |g: f64| -> Result<f64> {
        Ok(pre * g.powf(p - 1.0) * (-q * g).exp() * cdf_eq(g, rf, link)?)
    };
    // mass below g is at most pre F(g) g^p / p
    let lo = decade_search(1e-2 / q, 0.1, |g| {
        Ok(pre * cdf_eq(g, rf, link)? * g.powf(p) / p < TAIL)
    })?;
    let hi = 40.0 / q;
    let mut out = integrate_log(density, lo, hi, 1e-17)?;
    // the exponential tail beyond hi, with F bounded by one
    out.error += pre * (-q * hi).exp() / q;
    Ok(out)
}

/// Ergodic capacity from `B / ln 2 integral s / (1 + s g) (1 - F(g)) dg`.
pub fn capacity_quadrature(
    rf: &RfConfig,
    link: &FsoLink,
    bandwidth: f64,
    bound: CapacityBound,
) -> Result<Quadrature> {
    let s = bound.snr_factor();
    let terms = rf.terms();
    // the end-to-end SNR never exceeds the RF-hop SNR
    let hi = decade_search(rf.mu, 2.0, |g| Ok(terms.ccdf(g) < 1e-13))?;
    let lo = 1e-12 / s;
    let q = integrate_log(
        |g| Ok(s / (1.0 + s * g) * ccdf_eq(g, rf, link)?),
        lo,
        hi,
        1e-14,
    )?;
    let scale = bandwidth / LN_2;
    Ok(Quadrature {
        value: q.value * scale,
        error: (q.error + lo * s) * scale,
        evaluations: q.evaluations,
    })
}
