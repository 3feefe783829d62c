//! Univariate Meijer G-function on the positive real axis.
//!
//! The function is evaluated from its Mellin-Barnes definition
//!
//! ```text
//! G(z) = 1/(2 pi i) * Integral over Re s = c of K(s) z^s ds,
//! K(s) = prod_{j<=m} Gamma(b_j - s) prod_{j<=n} Gamma(1 - a_j + s)
//!      / (prod_{j>m} Gamma(1 - b_j + s) prod_{j>n} Gamma(a_j - s))
//! ```
//!
//! along a vertical line that separates the right poles `b_j + k` from the
//! left poles `a_j - 1 - k`. Because the integrand is conjugate-symmetric for
//! real parameters and argument, only `Im s >= 0` is integrated. Products of
//! gamma functions are summed as log-gammas and exponentiated once.
//!
//! Coincident parameters (double poles) need no special treatment on this
//! route, which is the reason it is used instead of residue series.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::kernel::{
    decay_height, edge_distance, graded_breaks, margin, minimise, search_interval, GammaKernel,
};
use super::quad::{panel_nodes, refine};
use crate::error::{Error, Result};

pub const DEFAULT_TARGET: f64 = 1e-8;

/// Relative magnitude at which the contour tail is cut.
const TAIL: f64 = 1e-18;
const MAX_LEVELS: usize = 12;
const POLE_GUARD: f64 = 1e-9;
const POLE_SHIFT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub z: f64,
}

impl MeijerGSpec {
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>, z: f64) -> Result<Self> {
        let spec = MeijerGSpec { m, n, a, b, z };
        spec.validate()?;
        Ok(spec)
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    /// Convergence index m + n - (p + q)/2.
    pub fn delta(&self) -> f64 {
        (self.m + self.n) as f64 - 0.5 * (self.p() + self.q()) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.m > self.q() || self.n > self.p() {
            return Err(Error::InvalidSpec(format!(
                "order (m={}, n={}) exceeds (q={}, p={})",
                self.m,
                self.n,
                self.q(),
                self.p()
            )));
        }
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "argument z = {} must be positive",
                self.z
            )));
        }
        if self.a.iter().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("parameters must be finite".into()));
        }
        Ok(())
    }

    pub(crate) fn kernel(&self) -> GammaKernel {
        GammaKernel::meijer(self.m, self.n, &self.a, &self.b)
    }
}

/// Vertical contour and stopping rule for a Mellin-Barnes quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig {
    /// Re s of the contour.
    pub abscissa: f64,
    /// Truncation of |Im s|.
    pub half_height: f64,
    /// Initial number of uniform panels on [0, half_height].
    pub panels: usize,
    pub target_rel_err: f64,
}

impl ContourConfig {
    /// Contour through the real saddle of |K(s) z^s| with the default target.
    pub fn auto(spec: &MeijerGSpec) -> Result<Self> {
        Self::auto_with_target(spec, DEFAULT_TARGET)
    }

    pub fn auto_with_target(spec: &MeijerGSpec, target_rel_err: f64) -> Result<Self> {
        let kernel = checked_kernel(spec)?;
        let strip = kernel.strip();
        let ln_z = spec.z.ln();
        let keep_out = margin(strip, 0.05);
        let (lo, hi) = search_interval(strip, keep_out, 80.0);
        let abscissa = minimise(|c| kernel.log_r(c) + c * ln_z, lo, hi, 64);
        Ok(Self::around(&kernel, ln_z, abscissa, target_rel_err))
    }

    /// Default height and panel count for a given abscissa.
    pub fn at_abscissa(spec: &MeijerGSpec, abscissa: f64, target_rel_err: f64) -> Result<Self> {
        let kernel = checked_kernel(spec)?;
        Ok(Self::around(&kernel, spec.z.ln(), abscissa, target_rel_err))
    }

    fn around(kernel: &GammaKernel, ln_z: f64, abscissa: f64, target_rel_err: f64) -> Self {
        let half_height = decay_height(
            |t| kernel.log_c(Complex64::new(abscissa, t)).re,
            TAIL.ln(),
            0.5,
            4000.0,
        )
        .unwrap_or(4000.0);
        let width = panel_width(ln_z, kernel.len());
        let panels = (half_height / width).ceil().max(1.0) as usize;
        ContourConfig {
            abscissa,
            half_height,
            panels,
            target_rel_err,
        }
    }
}

fn panel_width(ln_z: f64, gammas: usize) -> f64 {
    (2.0 * PI / (ln_z.abs() + gammas as f64)).min(1.0)
}

/// Value of a contour quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourEstimate {
    pub value: f64,
    /// Absolute difference between the last two refinement levels.
    pub error: f64,
    /// Integral of the integrand modulus; bounds the attainable accuracy.
    pub magnitude: f64,
    /// Number of panels at the accepted level.
    pub panels: usize,
    pub contour: ContourConfig,
    /// Self-consistency residual after each refinement.
    pub residuals: [f64; MAX_LEVELS],
    pub levels: usize,
}

impl ContourEstimate {
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error
        } else {
            self.error / self.value.abs()
        }
    }
}

fn checked_kernel(spec: &MeijerGSpec) -> Result<GammaKernel> {
    spec.validate()?;
    let delta = spec.delta();
    if delta <= 0.0 {
        return Err(Error::NonConvergent { delta, axis: None });
    }
    let kernel = spec.kernel();
    let (left, right) = kernel.strip();
    if left >= right {
        return Err(Error::ContourBlocked {
            left,
            right,
            axis: None,
        });
    }
    Ok(kernel)
}

/// Validate a caller-supplied abscissa and move it off near-coincident poles.
pub(crate) fn admit_abscissa(c: f64, strip: (f64, f64)) -> Result<f64> {
    let (left, right) = strip;
    if !(c > left - POLE_GUARD && c < right + POLE_GUARD) || !c.is_finite() {
        return Err(Error::InvalidContour {
            abscissa: c,
            left,
            right,
        });
    }
    if c - left < POLE_GUARD {
        let room = right - left;
        return Ok(left + POLE_SHIFT.min(0.5 * room));
    }
    if right - c < POLE_GUARD {
        let room = right - left;
        return Ok(right - POLE_SHIFT.min(0.5 * room));
    }
    Ok(c)
}

/// Meijer G-function value with the default or a supplied contour.
pub fn meijer_g(spec: &MeijerGSpec, contour: Option<&ContourConfig>) -> Result<f64> {
    meijer_g_estimate(spec, contour).map(|e| e.value)
}

pub fn meijer_g_estimate(
    spec: &MeijerGSpec,
    contour: Option<&ContourConfig>,
) -> Result<ContourEstimate> {
    let kernel = checked_kernel(spec)?;
    let mut cfg = match contour {
        Some(c) => *c,
        None => ContourConfig::auto(spec)?,
    };
    if !(cfg.target_rel_err > 0.0 && cfg.target_rel_err < 1.0) {
        return Err(Error::invalid("target_rel_err", "must lie in (0, 1)"));
    }
    if !(cfg.half_height > 0.0) || cfg.panels == 0 {
        return Err(Error::invalid(
            "contour",
            "half_height must be positive and panels non-zero",
        ));
    }
    let strip = kernel.strip();
    cfg.abscissa = admit_abscissa(cfg.abscissa, strip)?;
    integrate_line(
        &kernel,
        spec.z.ln(),
        cfg,
        edge_distance(cfg.abscissa, strip),
    )
}

fn integrate_line(
    kernel: &GammaKernel,
    ln_z: f64,
    cfg: ContourConfig,
    pole_distance: f64,
) -> Result<ContourEstimate> {
    let c = cfg.abscissa;
    let width = cfg.half_height / cfg.panels as f64;
    let mut breaks = graded_breaks(cfg.half_height, width, pole_distance.min(width));
    let mut residuals = [f64::NAN; MAX_LEVELS];
    let mut previous: Option<f64> = None;
    let floor_factor = 64.0 * f64::EPSILON;
    // sums are kept relative to the peak of the first level so that results
    // far below the smallest normal double still converge
    let mut log_scale: Option<f64> = None;
    for level in 0..MAX_LEVELS {
        let (nodes, weights) = panel_nodes(&breaks);
        let logs: Vec<Complex64> = nodes
            .iter()
            .map(|t| {
                let s = Complex64::new(c, *t);
                kernel.log_c(s) + s * ln_z
            })
            .collect();
        let shift = *log_scale.get_or_insert_with(|| {
            logs.iter()
                .map(|l| l.re)
                .filter(|r| r.is_finite())
                .fold(f64::NEG_INFINITY, f64::max)
        });
        let shift = if shift.is_finite() { shift } else { 0.0 };
        let mut sum = 0.0;
        let mut magnitude = 0.0;
        for (l, w) in logs.iter().zip(&weights) {
            let v = (l - shift).exp();
            if v.re.is_finite() {
                sum += w * v.re;
                magnitude += w * v.norm();
            }
        }
        let scaled = sum / PI;
        let scaled_magnitude = magnitude / PI;
        let unscale = shift.exp();
        let value = scaled * unscale;
        let magnitude = scaled_magnitude * unscale;
        if let Some(prev) = previous {
            let residual = (scaled - prev).abs();
            residuals[level - 1] = residual * unscale;
            let allowed = (cfg.target_rel_err * scaled.abs()).max(floor_factor * scaled_magnitude);
            if residual <= allowed {
                return Ok(ContourEstimate {
                    value,
                    error: residual * unscale,
                    magnitude,
                    panels: breaks.len() - 1,
                    contour: cfg,
                    residuals,
                    levels: level + 1,
                });
            }
            if level + 1 == MAX_LEVELS {
                return Err(Error::AccuracyNotReached {
                    estimate: value,
                    residual: residual * unscale,
                    panels: breaks.len() - 1,
                    axis: None,
                });
            }
        }
        previous = Some(scaled);
        breaks = refine(&breaks);
    }
    unreachable!("loop returns on the last level")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: usize, n: usize, a: &[f64], b: &[f64], z: f64) -> f64 {
        let spec = MeijerGSpec::new(m, n, a.to_vec(), b.to_vec(), z).unwrap();
        meijer_g(&spec, None).unwrap()
    }

    #[test]
    fn elementary_reductions() {
        assert!((g(1, 0, &[], &[0.0], 1.0) - (-1.0f64).exp()).abs() < 1e-12);
        assert!((g(1, 1, &[0.0], &[0.0], 1.0) - 0.5).abs() < 1e-12);
        // G^{1,0}_{0,1}(z | b) = z^b e^{-z}
        let z: f64 = 2.5;
        assert!((g(1, 0, &[], &[0.7], z) - z.powf(0.7) * (-z).exp()).abs() < 1e-11);
    }

    #[test]
    fn bessel_double_pole() {
        // 2 K_0(2), mpmath
        assert!((g(2, 0, &[], &[0.0, 0.0], 1.0) - 0.227_787_745_499_066_87).abs() < 1e-10);
    }

    #[test]
    fn order_errors() {
        let err = MeijerGSpec::new(2, 0, vec![], vec![0.0], 1.0).unwrap_err();
        assert_eq!(err.kind(), "InvalidSpec");
        assert!(MeijerGSpec::new(1, 0, vec![], vec![0.0], 0.0).is_err());
        // delta = 1 - 3/2 < 0
        let spec = MeijerGSpec::new(1, 0, vec![0.5, 0.2], vec![0.0], 1.0).unwrap();
        assert_eq!(meijer_g(&spec, None).unwrap_err().kind(), "NonConvergent");
        // left pole a-1 = 1.5 to the right of b = 0
        let spec = MeijerGSpec::new(1, 1, vec![2.5], vec![0.0], 1.0).unwrap();
        assert_eq!(meijer_g(&spec, None).unwrap_err().kind(), "ContourBlocked");
    }

    #[test]
    fn abscissa_on_a_pole_is_shifted_inward() {
        assert_eq!(admit_abscissa(0.0, (-1.0, 0.0)).unwrap(), -0.25);
        assert_eq!(admit_abscissa(-0.5, (-0.5, -0.3)).unwrap(), -0.4);
        assert!(admit_abscissa(0.5, (-1.0, 0.0)).is_err());
    }
}
