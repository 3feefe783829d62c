//! Bivariate Meijer G-function (extended generalized form) on the positive
//! quadrant, by a double Mellin-Barnes contour quadrature.
//!
//! ```text
//! G(x, y) = 1/(2 pi i)^2 Integral Integral C(s + t) K1(s) K2(t) x^s y^t ds dt
//! ```
//!
//! `K1`, `K2` are ordinary Meijer kernels and `C` is the coupling block
//! described at [`GammaBlock`]. Both contours are vertical lines; the pair of
//! abscissae must lie in the product of the two strips with `Re(s + t)` in the
//! coupling strip.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::kernel::{decay_height, edge_distance, graded_breaks, minimise, GammaKernel};
use super::meijer::{ContourConfig, MeijerGSpec};
use super::quad::{panel_nodes, refine};
use crate::error::{Axis, Error, Result};

pub const DEFAULT_TARGET: f64 = 1e-6;

const TAIL: f64 = 1e-18;
const MAX_LEVELS: usize = 8;
/// Pairs whose modulus bound is this far below the peak are skipped.
const PRUNE: f64 = 1e-22;
const POLE_GUARD: f64 = 1e-9;

/// Parameter block of order (m, n) with rows `a` (length p) and `b` (length q).
///
/// As an inner block it is an ordinary Meijer kernel. As the coupling block
/// in `u = s + t` the first `m` entries of `a` contribute `Gamma(a_j + u)`,
/// the first `n` entries of `b` contribute `Gamma(1 - b_j - u)`, and the
/// remaining entries divide as `Gamma(1 - a_j - u)` and `Gamma(b_j + u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaBlock {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl GammaBlock {
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>) -> Self {
        GammaBlock { m, n, a, b }
    }

    fn finite(&self) -> bool {
        self.a.iter().chain(&self.b).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Egbmgf2Spec {
    pub outer: GammaBlock,
    pub first: GammaBlock,
    pub second: GammaBlock,
    pub x: f64,
    pub y: f64,
}

impl Egbmgf2Spec {
    /// The kernel `Integral_0^inf e^{-u} G^{1,1}_{1,1}(A u | 0; 0) G^{6,0}_{1,6}(B u | ..) du`
    /// that appears in the ergodic capacity.
    pub fn capacity_kernel(psi2: f64, alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        let spec = Egbmgf2Spec {
            outer: GammaBlock::new(1, 0, vec![1.0], vec![]),
            first: GammaBlock::new(1, 1, vec![0.0], vec![0.0]),
            second: GammaBlock::new(
                6,
                0,
                vec![0.5 * (psi2 + 2.0)],
                chi_row(psi2, alpha, beta).to_vec(),
            ),
            x: a,
            y: b,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (block, axis) in [(&self.first, "first"), (&self.second, "second")] {
            if block.m > block.b.len() || block.n > block.a.len() {
                return Err(Error::InvalidSpec(format!(
                    "{axis} block order (m={}, n={}) exceeds (q={}, p={})",
                    block.m,
                    block.n,
                    block.b.len(),
                    block.a.len()
                )));
            }
        }
        if self.outer.m > self.outer.a.len() || self.outer.n > self.outer.b.len() {
            return Err(Error::InvalidSpec(
                "outer block order exceeds its rows".into(),
            ));
        }
        if ![&self.outer, &self.first, &self.second]
            .iter()
            .all(|b| b.finite())
        {
            return Err(Error::InvalidSpec("parameters must be finite".into()));
        }
        for (v, name) in [(self.x, "x"), (self.y, "y")] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "argument {name} = {v} must be positive"
                )));
            }
        }
        Ok(())
    }

    /// First inner block as a univariate spec at argument `x`.
    pub fn first_spec(&self) -> MeijerGSpec {
        let b = &self.first;
        MeijerGSpec {
            m: b.m,
            n: b.n,
            a: b.a.clone(),
            b: b.b.clone(),
            z: self.x,
        }
    }

    pub fn second_spec(&self) -> MeijerGSpec {
        let b = &self.second;
        MeijerGSpec {
            m: b.m,
            n: b.n,
            a: b.a.clone(),
            b: b.b.clone(),
            z: self.y,
        }
    }
}

/// `(psi^2/2, alpha/2, (alpha+1)/2, beta/2, (beta+1)/2, 0)`.
pub fn chi_row(psi2: f64, alpha: f64, beta: f64) -> [f64; 6] {
    [
        0.5 * psi2,
        0.5 * alpha,
        0.5 * (alpha + 1.0),
        0.5 * beta,
        0.5 * (beta + 1.0),
        0.0,
    ]
}

struct Kernels {
    s: GammaKernel,
    t: GammaKernel,
    u: GammaKernel,
    strip_s: (f64, f64),
    strip_t: (f64, f64),
    strip_u: (f64, f64),
    ln_x: f64,
    ln_y: f64,
}

impl Kernels {
    fn new(spec: &Egbmgf2Spec) -> Result<Self> {
        spec.validate()?;
        let s = GammaKernel::meijer(spec.first.m, spec.first.n, &spec.first.a, &spec.first.b);
        let t = GammaKernel::meijer(spec.second.m, spec.second.n, &spec.second.a, &spec.second.b);
        let u = GammaKernel::coupling(spec.outer.m, spec.outer.n, &spec.outer.a, &spec.outer.b);
        let (ds, dt, du) = (s.delta(), t.delta(), u.delta());
        if ds + du <= 0.0 {
            return Err(Error::NonConvergent {
                delta: ds + du,
                axis: Some(Axis::S),
            });
        }
        if dt + du <= 0.0 {
            return Err(Error::NonConvergent {
                delta: dt + du,
                axis: Some(Axis::T),
            });
        }
        if ds + dt <= 0.0 {
            return Err(Error::NonConvergent {
                delta: ds + dt,
                axis: Some(Axis::S),
            });
        }
        let (strip_s, strip_t, strip_u) = (s.strip(), t.strip(), u.strip());
        for (strip, axis) in [(strip_s, Axis::S), (strip_t, Axis::T)] {
            if strip.0 >= strip.1 {
                return Err(Error::ContourBlocked {
                    left: strip.0,
                    right: strip.1,
                    axis: Some(axis),
                });
            }
        }
        let lowest = strip_s.0 + strip_t.0;
        let highest = strip_s.1 + strip_t.1;
        if strip_u.0 >= strip_u.1 || lowest >= strip_u.1 || highest <= strip_u.0 {
            return Err(Error::ContourBlocked {
                left: strip_u.0.max(lowest),
                right: strip_u.1.min(highest),
                axis: Some(Axis::T),
            });
        }
        Ok(Kernels {
            s,
            t,
            u,
            strip_s,
            strip_t,
            strip_u,
            ln_x: spec.x.ln(),
            ln_y: spec.y.ln(),
        })
    }

    fn log_f(&self, s: Complex64, t: Complex64) -> Complex64 {
        self.s.log_c(s) + self.t.log_c(t) + self.u.log_c(s + t) + s * self.ln_x + t * self.ln_y
    }

    fn log_r(&self, cs: f64, ct: f64) -> f64 {
        self.s.log_r(cs)
            + self.t.log_r(ct)
            + self.u.log_r(cs + ct)
            + cs * self.ln_x
            + ct * self.ln_y
    }

    /// Distance of (cs, ct) to the nearest pole line, in the coupling sense.
    fn clearance(&self, cs: f64, ct: f64) -> f64 {
        edge_distance(cs, self.strip_s)
            .min(edge_distance(ct, self.strip_t))
            .min(edge_distance(cs + ct, self.strip_u))
    }

    /// Real saddle of the integrand modulus inside the legal region.
    fn saddle(&self) -> (f64, f64) {
        let keep = |strip: (f64, f64)| {
            let w = strip.1 - strip.0;
            if w.is_finite() {
                0.2f64.min(0.25 * w)
            } else {
                0.2
            }
        };
        let (ms, mt, mu) = (keep(self.strip_s), keep(self.strip_t), keep(self.strip_u));
        let range = |strip: (f64, f64), m: f64| match (strip.0.is_finite(), strip.1.is_finite()) {
            (true, true) => (strip.0 + m, strip.1 - m),
            (true, false) => (strip.0 + m, strip.0 + 40.0),
            (false, true) => (strip.1 - 40.0, strip.1 - m),
            (false, false) => (-40.0, 40.0),
        };
        let (s_lo, s_hi) = range(self.strip_s, ms);
        let (t_lo, t_hi) = range(self.strip_t, mt);
        let admissible =
            |cs: f64, ct: f64| cs + ct > self.strip_u.0 + mu && cs + ct < self.strip_u.1 - mu;
        let objective = |cs: f64, ct: f64| {
            if admissible(cs, ct) {
                self.log_r(cs, ct)
            } else {
                f64::INFINITY
            }
        };
        let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
        let scan =
            |best: &mut (f64, f64, f64), lo_s: f64, hi_s: f64, lo_t: f64, hi_t: f64, n: usize| {
                for i in 0..=n {
                    let cs = lo_s + (hi_s - lo_s) * i as f64 / n as f64;
                    for j in 0..=n {
                        let ct = lo_t + (hi_t - lo_t) * j as f64 / n as f64;
                        let v = objective(cs, ct);
                        if v < best.2 {
                            *best = (cs, ct, v);
                        }
                    }
                }
            };
        scan(&mut best, s_lo, s_hi, t_lo, t_hi, 40);
        if !best.2.is_finite() {
            // coupling strip is narrow: walk its centre line instead
            let mid_u = 0.5 * (self.strip_u.0.max(s_lo + t_lo) + self.strip_u.1.min(s_hi + t_hi));
            let cs = minimise(
                |cs| {
                    let ct = mid_u - cs;
                    if ct > t_lo - mt && ct < t_hi + mt {
                        self.log_r(cs, ct)
                    } else {
                        f64::INFINITY
                    }
                },
                s_lo,
                s_hi,
                64,
            );
            return (cs, mid_u - cs);
        }
        let mut hs = (s_hi - s_lo) / 40.0;
        let mut ht = (t_hi - t_lo) / 40.0;
        for _ in 0..2 {
            let (cs, ct) = (best.0, best.1);
            scan(
                &mut best,
                (cs - hs).max(s_lo),
                (cs + hs).min(s_hi),
                (ct - ht).max(t_lo),
                (ct + ht).min(t_hi),
                10,
            );
            hs /= 5.0;
            ht /= 5.0;
        }
        (best.0, best.1)
    }

    /// Heights along each axis, taken over the axis and the anti-diagonal
    /// where the coupling block stops decaying.
    fn heights(&self, cs: f64, ct: f64) -> (f64, f64) {
        let log_rel = TAIL.ln();
        let at = |sig: f64, tau: f64| {
            self.log_f(Complex64::new(cs, sig), Complex64::new(ct, tau))
                .re
        };
        let h = |g: &dyn Fn(f64) -> f64| decay_height(g, log_rel, 0.5, 4000.0).unwrap_or(4000.0);
        let ts = h(&|x| at(x, 0.0)).max(h(&|x| at(x, -x)));
        let tt = h(&|x| at(0.0, x))
            .max(h(&|x| at(0.0, -x)))
            .max(h(&|x| at(x, -x)));
        (ts, tt)
    }

    fn contours(&self, target: f64) -> (ContourConfig, ContourConfig) {
        let (cs, ct) = self.saddle();
        let (ts, tt) = self.heights(cs, ct);
        let config = |c: f64, top: f64, ln_z: f64, gammas: usize| {
            let width = (2.0 * PI / (ln_z.abs() + gammas as f64)).min(1.0);
            ContourConfig {
                abscissa: c,
                half_height: top,
                panels: (top / width).ceil().max(1.0) as usize,
                target_rel_err: target,
            }
        };
        let gammas = self.u.len();
        (
            config(cs, ts, self.ln_x, self.s.len() + gammas),
            config(ct, tt, self.ln_y, self.t.len() + gammas),
        )
    }
}

/// Value of a double contour quadrature with per-axis error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgbmgfEstimate {
    pub value: f64,
    /// Change in the value when the s-axis panels are halved.
    pub error_s: f64,
    pub error_t: f64,
    /// Integral of the integrand modulus.
    pub magnitude: f64,
    pub panels_s: usize,
    pub panels_t: usize,
    pub contour_s: ContourConfig,
    pub contour_t: ContourConfig,
}

impl EgbmgfEstimate {
    pub fn rel_error(&self) -> f64 {
        (self.error_s + self.error_t) / self.value.abs().max(f64::MIN_POSITIVE)
    }
}

/// Automatic contours for both axes.
pub fn egbmgf_contours(spec: &Egbmgf2Spec) -> Result<(ContourConfig, ContourConfig)> {
    egbmgf_contours_with_target(spec, DEFAULT_TARGET)
}

/// Automatic contours refined until both axes reach `target` relative error.
pub fn egbmgf_contours_with_target(
    spec: &Egbmgf2Spec,
    target: f64,
) -> Result<(ContourConfig, ContourConfig)> {
    Ok(Kernels::new(spec)?.contours(target))
}

pub fn egbmgf(
    spec: &Egbmgf2Spec,
    contour_s: Option<&ContourConfig>,
    contour_t: Option<&ContourConfig>,
) -> Result<f64> {
    egbmgf_estimate(spec, contour_s, contour_t).map(|e| e.value)
}

pub fn egbmgf_estimate(
    spec: &Egbmgf2Spec,
    contour_s: Option<&ContourConfig>,
    contour_t: Option<&ContourConfig>,
) -> Result<EgbmgfEstimate> {
    let kernels = Kernels::new(spec)?;
    let (cfg_s, cfg_t) = match (contour_s, contour_t) {
        (Some(s), Some(t)) => (*s, *t),
        (s, t) => {
            let (auto_s, auto_t) = kernels.contours(DEFAULT_TARGET);
            (s.copied().unwrap_or(auto_s), t.copied().unwrap_or(auto_t))
        }
    };
    for cfg in [&cfg_s, &cfg_t] {
        if !(cfg.target_rel_err > 0.0 && cfg.target_rel_err < 1.0) {
            return Err(Error::invalid("target_rel_err", "must lie in (0, 1)"));
        }
        if !(cfg.half_height > 0.0) || cfg.panels == 0 {
            return Err(Error::invalid(
                "contour",
                "half_height must be positive and panels non-zero",
            ));
        }
    }
    let (cs, ct) = (cfg_s.abscissa, cfg_t.abscissa);
    for (c, strip) in [
        (cs, kernels.strip_s),
        (ct, kernels.strip_t),
        (cs + ct, kernels.strip_u),
    ] {
        if !(c.is_finite() && c > strip.0 && c < strip.1) {
            return Err(Error::InvalidContour {
                abscissa: c,
                left: strip.0,
                right: strip.1,
            });
        }
    }
    let clearance = kernels.clearance(cs, ct);
    if clearance < POLE_GUARD {
        return Err(Error::InvalidContour {
            abscissa: cs,
            left: kernels.strip_s.0,
            right: kernels.strip_s.1,
        });
    }
    integrate_plane(&kernels, cfg_s, cfg_t, clearance)
}

struct Grid {
    breaks_s: Vec<f64>,
    breaks_t: Vec<f64>,
}

fn symmetric(half: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = half.iter().rev().map(|x| -x).collect();
    out.extend_from_slice(&half[1..]);
    out
}

fn integrate_plane(
    k: &Kernels,
    cfg_s: ContourConfig,
    cfg_t: ContourConfig,
    clearance: f64,
) -> Result<EgbmgfEstimate> {
    let (cs, ct) = (cfg_s.abscissa, cfg_t.abscissa);
    let width_s = cfg_s.half_height / cfg_s.panels as f64;
    let width_t = cfg_t.half_height / cfg_t.panels as f64;
    let mut grid = Grid {
        breaks_s: graded_breaks(cfg_s.half_height, width_s, clearance.min(width_s)),
        breaks_t: symmetric(&graded_breaks(
            cfg_t.half_height,
            width_t,
            clearance.min(width_t),
        )),
    };
    let target = cfg_s.target_rel_err.max(cfg_t.target_rel_err);
    let peak = k.log_r(cs, ct);
    let mut current = plane_sum(k, cs, ct, &grid.breaks_s, &grid.breaks_t, peak);
    let (mut levels_s, mut levels_t) = (0, 0);
    loop {
        let fine_s = refine(&grid.breaks_s);
        let fine_t = refine(&grid.breaks_t);
        let with_s = plane_sum(k, cs, ct, &fine_s, &grid.breaks_t, peak);
        let with_t = plane_sum(k, cs, ct, &grid.breaks_s, &fine_t, peak);
        let err_s = (with_s.0 - current.0).abs();
        let err_t = (with_t.0 - current.0).abs();
        let floor = 64.0 * f64::EPSILON * current.1;
        let allowed = (target * current.0.abs()).max(floor);
        if err_s + err_t <= allowed {
            return Ok(EgbmgfEstimate {
                value: current.0,
                error_s: err_s,
                error_t: err_t,
                magnitude: current.1,
                panels_s: grid.breaks_s.len() - 1,
                panels_t: grid.breaks_t.len() - 1,
                contour_s: cfg_s,
                contour_t: cfg_t,
            });
        }
        if err_s >= err_t {
            levels_s += 1;
            if levels_s > MAX_LEVELS {
                return Err(Error::AccuracyNotReached {
                    estimate: current.0,
                    residual: err_s,
                    panels: grid.breaks_s.len() - 1,
                    axis: Some(Axis::S),
                });
            }
            grid.breaks_s = fine_s;
            current = with_s;
        } else {
            levels_t += 1;
            if levels_t > MAX_LEVELS {
                return Err(Error::AccuracyNotReached {
                    estimate: current.0,
                    residual: err_t,
                    panels: grid.breaks_t.len() - 1,
                    axis: Some(Axis::T),
                });
            }
            grid.breaks_t = fine_t;
            current = with_t;
        }
    }
}

/// Tensor-product quadrature over `[0, Ts] x [-Tt, Tt]`; returns (value, L1 mass).
fn plane_sum(
    k: &Kernels,
    cs: f64,
    ct: f64,
    breaks_s: &[f64],
    breaks_t: &[f64],
    peak: f64,
) -> (f64, f64) {
    let (ns, ws) = panel_nodes(breaks_s);
    let (nt, wt) = panel_nodes(breaks_t);
    let col: Vec<(Complex64, Complex64, f64)> = nt
        .iter()
        .zip(&wt)
        .map(|(&tau, &w)| {
            let t = Complex64::new(ct, tau);
            (t, k.t.log_c(t) + t * k.ln_y, w)
        })
        .collect();
    // |Gamma(w)| <= Gamma(Re w) when Re w > 0, which bounds the coupling
    // block on the whole grid when it has no denominators.
    let coupling_bound = if k.u.has_denominators() {
        None
    } else {
        Some(k.u.log_r(cs + ct))
    };
    let cut = peak + PRUNE.ln();
    let rows: Vec<(f64, f64)> = ns
        .par_iter()
        .zip(ws.par_iter())
        .map(|(&sig, &w_s)| {
            let s = Complex64::new(cs, sig);
            let row = k.s.log_c(s) + s * k.ln_x;
            let mut sum = 0.0;
            let mut mass = 0.0;
            for (t, col_log, w_t) in &col {
                let sep = row + col_log;
                if let Some(bound) = coupling_bound {
                    if sep.re + bound < cut {
                        continue;
                    }
                }
                let v = (sep + k.u.log_c(s + t)).exp();
                if v.re.is_finite() {
                    sum += w_t * v.re;
                    mass += w_t * v.norm();
                }
            }
            (w_s * sum, w_s * mass)
        })
        .collect();
    let (mut sum, mut mass) = (0.0, 0.0);
    for (v, m) in rows {
        sum += v;
        mass += m;
    }
    let scale = 1.0 / (2.0 * PI * PI);
    (sum * scale, mass * scale)
}
