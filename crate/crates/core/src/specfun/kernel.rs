//! Gamma-product kernels of Mellin-Barnes integrands and the contour
//! placement helpers shared by the univariate and bivariate evaluators.

use num_complex::Complex64;

use super::gamma::{ln_abs_gamma, ln_gamma_c};

/// `prod Gamma(minus_j - s) prod Gamma(plus_j + s) / (prod Gamma(den_plus_j + s) prod Gamma(den_minus_j - s))`
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct GammaKernel {
    pub minus: Vec<f64>,
    pub plus: Vec<f64>,
    pub den_plus: Vec<f64>,
    pub den_minus: Vec<f64>,
}

impl GammaKernel {
    /// Standard Meijer G kernel of order (m, n, p, q).
    pub fn meijer(m: usize, n: usize, a: &[f64], b: &[f64]) -> Self {
        GammaKernel {
            minus: b[..m].to_vec(),
            plus: a[..n].iter().map(|a| 1.0 - a).collect(),
            den_plus: b[m..].iter().map(|b| 1.0 - b).collect(),
            den_minus: a[n..].to_vec(),
        }
    }

    /// Coupling kernel in `u = s + t`: the first `m` a-parameters enter as
    /// `Gamma(a_j + u)`, the first `n` b-parameters as `Gamma(1 - b_j - u)`;
    /// the rest divide as `Gamma(1 - a_j - u)` and `Gamma(b_j + u)`.
    pub fn coupling(m: usize, n: usize, a: &[f64], b: &[f64]) -> Self {
        GammaKernel {
            minus: b[..n].iter().map(|b| 1.0 - b).collect(),
            plus: a[..m].to_vec(),
            den_plus: b[n..].to_vec(),
            den_minus: a[m..].iter().map(|a| 1.0 - a).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.minus.len() + self.plus.len() + self.den_plus.len() + self.den_minus.len()
    }

    /// Exponential decay rate, in units of pi |Im s|, of the kernel modulus.
    pub fn delta(&self) -> f64 {
        (self.minus.len() + self.plus.len()) as f64 - 0.5 * self.len() as f64
    }

    /// Open strip (left, right) of Re s free of kernel poles.
    pub fn strip(&self) -> (f64, f64) {
        let left = self
            .plus
            .iter()
            .map(|p| -p)
            .fold(f64::NEG_INFINITY, f64::max);
        let right = self.minus.iter().copied().fold(f64::INFINITY, f64::min);
        (left, right)
    }

    #[inline]
    pub fn log_c(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &b in &self.minus {
            acc += ln_gamma_c(b - s);
        }
        for &c in &self.plus {
            acc += ln_gamma_c(c + s);
        }
        for &d in &self.den_plus {
            acc -= ln_gamma_c(d + s);
        }
        for &e in &self.den_minus {
            acc -= ln_gamma_c(e - s);
        }
        acc
    }

    /// log of the kernel modulus on the real axis.
    pub fn log_r(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &b in &self.minus {
            acc += ln_abs_gamma(b - x);
        }
        for &c in &self.plus {
            acc += ln_abs_gamma(c + x);
        }
        for &d in &self.den_plus {
            acc -= ln_abs_gamma(d + x);
        }
        for &e in &self.den_minus {
            acc -= ln_abs_gamma(e - x);
        }
        acc
    }

    pub fn has_denominators(&self) -> bool {
        !(self.den_plus.is_empty() && self.den_minus.is_empty())
    }
}

/// Distance from `c` to the nearest edge of the strip.
pub(crate) fn edge_distance(c: f64, (left, right): (f64, f64)) -> f64 {
    (c - left).min(right - c)
}

/// Keep-out margin from the strip edges used for automatic placement.
pub(crate) fn margin((left, right): (f64, f64), preferred: f64) -> f64 {
    let width = right - left;
    if width.is_finite() {
        preferred.min(0.25 * width)
    } else {
        preferred
    }
}

/// Finite search interval inside the strip.
pub(crate) fn search_interval(strip: (f64, f64), margin: f64, reach: f64) -> (f64, f64) {
    let (left, right) = strip;
    match (left.is_finite(), right.is_finite()) {
        (true, true) => (left + margin, right - margin),
        (true, false) => (left + margin, left + reach),
        (false, true) => (right - reach, right - margin),
        (false, false) => (-reach, reach),
    }
}

/// Minimise a real function over [lo, hi] by grid scan plus golden section.
pub(crate) fn minimise<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize) -> f64 {
    if hi <= lo {
        return 0.5 * (lo + hi);
    }
    let step = (hi - lo) / grid as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..=grid {
        let x = lo + step * i as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    if !best.1.is_finite() {
        return 0.5 * (lo + hi);
    }
    let mut a = (best.0 - step).max(lo);
    let mut b = (best.0 + step).min(hi);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..48 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (a + b);
    if f(x) <= best.1 {
        x
    } else {
        best.0
    }
}

/// Smallest height beyond which `log_mag(t)` stays below `log_peak + log_rel`.
///
/// Steps outward in increments of `step`; `log_mag` must eventually decay.
pub(crate) fn decay_height<F: Fn(f64) -> f64>(
    log_mag: F,
    log_rel: f64,
    step: f64,
    limit: f64,
) -> Option<f64> {
    let mut peak = log_mag(0.0);
    let mut t = 0.0;
    let mut below = 0;
    while t < limit {
        t += step;
        let v = log_mag(t);
        if v > peak || peak.is_nan() {
            peak = v;
        }
        if v < peak + log_rel {
            below += 1;
            if below >= 2 {
                return Some(t);
            }
        } else {
            below = 0;
        }
    }
    None
}

/// Panel breakpoints on [0, top]: geometric from `fine` up to `width`, then uniform.
pub(crate) fn graded_breaks(top: f64, width: f64, fine: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let width = width.min(top);
    if fine < width {
        let mut x = fine.max(1e-6 * width);
        while x < 0.75 * width {
            breaks.push(x);
            x *= 2.0;
        }
    }
    let count = ((top - width) / width).ceil().max(0.0) as usize;
    let step = if count > 0 {
        (top - width) / count as f64
    } else {
        0.0
    };
    breaks.push(width);
    for k in 1..=count {
        breaks.push(width + step * k as f64);
    }
    breaks
}
