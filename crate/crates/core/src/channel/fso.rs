//! FSO hop: Gamma-Gamma scintillation with Gaussian-beam pointing loss.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{erf, ln_gamma, meijer_g, MeijerGSpec};

/// Turbulence strengths outside this span trigger a warning.
pub const CN2_RANGE: (f64, f64) = (1e-17, 1e-13);

/// Jitter used to approximate perfect pointing: `a_deq / (2 * 1000)`.
pub const NO_POINTING_DIVISOR: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoConfig {
    /// Link length, m.
    pub length: f64,
    /// Refractive-index structure parameter, m^(-2/3).
    pub cn2: f64,
    /// Optical wavelength, m.
    pub wavelength: f64,
    /// Detector aperture radius, m.
    pub aperture_radius: f64,
    /// Beam radius at the waist, m.
    pub waist_radius: f64,
    /// Phase-front radius of curvature, m; infinite for a collimated beam.
    pub curvature_radius: f64,
    /// Standard deviation of the pointing jitter per axis, m.
    pub jitter_std: f64,
    /// Electrical SNR of the hop, linear.
    pub mu: f64,
    /// Deterministic intensity attenuation in (0, 1].
    pub path_loss: f64,
}

/// Turbulence conditions used throughout the evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Turbulence {
    Weak,
    Moderate,
    Strong,
}

impl Turbulence {
    pub const ALL: [Turbulence; 3] = [Turbulence::Weak, Turbulence::Moderate, Turbulence::Strong];

    pub fn cn2(self) -> f64 {
        match self {
            Turbulence::Weak => 6e-15,
            Turbulence::Moderate => 2e-14,
            Turbulence::Strong => 5e-14,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Turbulence::Weak => "weak",
            Turbulence::Moderate => "moderate",
            Turbulence::Strong => "strong",
        }
    }
}

impl FsoConfig {
    /// 2 km collimated link at 1.55 um with 5 cm aperture, waist and jitter.
    pub fn reference(cn2: f64, mu: f64) -> Self {
        FsoConfig {
            length: 2000.0,
            cn2,
            wavelength: 1.55e-6,
            aperture_radius: 0.05,
            waist_radius: 0.05,
            curvature_radius: f64::INFINITY,
            jitter_std: 0.05,
            mu,
            path_loss: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.length, "fso.d"),
            (self.wavelength, "fso.lambda"),
            (self.aperture_radius, "fso.a"),
            (self.waist_radius, "fso.a0"),
            (self.mu, "fso.mu"),
        ];
        for (v, field) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be positive, got {v}")));
            }
        }
        if !(self.curvature_radius > 0.0) {
            return Err(Error::invalid(
                "fso.f0",
                "radius of curvature must be positive",
            ));
        }
        if !(self.cn2.is_finite() && self.cn2 > 0.0) {
            return Err(Error::invalid(
                "fso.cn2",
                format!("must be positive, got {}", self.cn2),
            ));
        }
        if !(self.jitter_std.is_finite() && self.jitter_std >= 0.0) {
            return Err(Error::invalid("fso.sigma_s", "must be non-negative"));
        }
        if !(self.path_loss > 0.0 && self.path_loss <= 1.0) {
            return Err(Error::invalid("fso.path_loss", "must lie in (0, 1]"));
        }
        if self.cn2 < CN2_RANGE.0 || self.cn2 > CN2_RANGE.1 {
            log::warn!(
                "Cn2 = {:e} lies outside the weak-to-strong span [{:e}, {:e}]",
                self.cn2,
                CN2_RANGE.0,
                CN2_RANGE.1
            );
        }
        Ok(())
    }
}

/// Turbulence and beam quantities derived from an [`FsoConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedFsoParams {
    pub rytov_variance: f64,
    /// Gamma-Gamma shape of the large-scale eddies.
    pub large_scale: f64,
    /// Gamma-Gamma shape of the small-scale eddies.
    pub small_scale: f64,
    /// 2 pi / wavelength, 1/m.
    pub wave_number: f64,
    /// Curvature parameter `1 - d / F0`.
    pub curvature: f64,
    /// Fresnel ratio at the receiver `2 d / (k a0^2)`.
    pub fresnel: f64,
    /// `fresnel / (curvature^2 + fresnel^2)`.
    pub fresnel_ratio: f64,
    /// Beam radius at the receiver, m.
    pub beam_radius: f64,
    /// Aperture-to-beam ratio that sets the collected fraction.
    pub aperture_ratio: f64,
    /// Equivalent beam radius at the receiver, m.
    pub equivalent_beam_radius: f64,
    /// Fraction of power collected with zero misalignment.
    pub collected_fraction: f64,
    /// Equivalent beam radius over twice the jitter.
    pub pointing_ratio: f64,
    /// Mean pointing loss relative to the collected fraction.
    pub pointing_mean: f64,
}

impl DerivedFsoParams {
    pub fn pointing_ratio_sq(&self) -> f64 {
        self.pointing_ratio * self.pointing_ratio
    }
}

/// Quantities that do not depend on the jitter.
struct Beam {
    rytov: f64,
    large: f64,
    small: f64,
    k: f64,
    curvature: f64,
    fresnel: f64,
    ratio: f64,
    w: f64,
    v: f64,
    weq: f64,
    a0: f64,
}

fn beam(cfg: &FsoConfig) -> Beam {
    let k = 2.0 * PI / cfg.wavelength;
    let rytov = 1.23 * cfg.cn2 * k.powf(7.0 / 6.0) * cfg.length.powf(11.0 / 6.0);
    let r125 = rytov.powf(6.0 / 5.0);
    let large = 1.0 / ((0.49 * rytov / (1.0 + 1.11 * r125).powf(7.0 / 6.0)).exp_m1());
    let small = 1.0 / ((0.51 * rytov / (1.0 + 0.69 * r125).powf(5.0 / 6.0)).exp_m1());
    let curvature = 1.0 - cfg.length / cfg.curvature_radius;
    let fresnel = 2.0 * cfg.length / (k * cfg.waist_radius * cfg.waist_radius);
    let ratio = fresnel / (curvature * curvature + fresnel * fresnel);
    let w = cfg.waist_radius * ((curvature + fresnel) * (1.0 + 1.63 * r125 * ratio)).sqrt();
    let v = PI.sqrt() * cfg.aperture_radius / (2f64.sqrt() * w);
    let erf_v = erf(v);
    let weq = w * (PI.sqrt() * erf_v / (2.0 * v * (-v * v).exp())).sqrt();
    Beam {
        rytov,
        large,
        small,
        k,
        curvature,
        fresnel,
        ratio,
        w,
        v,
        weq,
        a0: erf_v * erf_v,
    }
}

pub fn derive_fso(cfg: &FsoConfig) -> Result<DerivedFsoParams> {
    cfg.validate()?;
    if cfg.jitter_std == 0.0 {
        return Err(Error::DegenerateJitter);
    }
    let b = beam(cfg);
    if !(b.curvature + b.fresnel > 0.0) {
        return Err(Error::invalid(
            "fso.f0",
            "beam radius at the receiver is not real",
        ));
    }
    let psi = b.weq / (2.0 * cfg.jitter_std);
    let psi2 = psi * psi;
    Ok(DerivedFsoParams {
        rytov_variance: b.rytov,
        large_scale: b.large,
        small_scale: b.small,
        wave_number: b.k,
        curvature: b.curvature,
        fresnel: b.fresnel,
        fresnel_ratio: b.ratio,
        beam_radius: b.w,
        aperture_ratio: b.v,
        equivalent_beam_radius: b.weq,
        collected_fraction: b.a0,
        pointing_ratio: psi,
        pointing_mean: psi2 / (psi2 + 1.0),
    })
}

/// Stand-in for perfect pointing: the jitter is set to `a_deq / 2000`.
pub fn derive_fso_no_pointing(cfg: &FsoConfig) -> Result<DerivedFsoParams> {
    cfg.validate()?;
    let weq = beam(cfg).weq;
    derive_fso(&FsoConfig {
        jitter_std: weq / NO_POINTING_DIVISOR,
        ..*cfg
    })
}

/// FSO hop ready for evaluation: derived parameters and the effective SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoLink {
    pub params: DerivedFsoParams,
    /// Electrical SNR including the squared path loss, linear.
    pub mu: f64,
}

impl FsoLink {
    pub fn new(cfg: &FsoConfig) -> Result<Self> {
        Ok(FsoLink {
            params: derive_fso(cfg)?,
            mu: cfg.mu * cfg.path_loss * cfg.path_loss,
        })
    }

    pub fn with_params(params: DerivedFsoParams, mu: f64) -> Self {
        FsoLink { params, mu }
    }

    /// Argument scale `alpha beta kappa / sqrt(mu)` of the SNR-domain kernels.
    fn snr_scale(&self) -> f64 {
        let p = &self.params;
        p.large_scale * p.small_scale * p.pointing_mean / self.mu.sqrt()
    }

    fn log_norm(&self) -> f64 {
        let p = &self.params;
        p.pointing_ratio_sq().ln() - ln_gamma(p.large_scale) - ln_gamma(p.small_scale)
    }

    pub fn snr_pdf(&self, g2: f64) -> Result<f64> {
        fso_snr_pdf(g2, &self.params, self.mu)
    }

    pub fn snr_cdf(&self, g2: f64) -> Result<f64> {
        if g2 <= 0.0 {
            return Ok(0.0);
        }
        let p = &self.params;
        let psi2 = p.pointing_ratio_sq();
        let spec = MeijerGSpec::new(
            3,
            1,
            vec![1.0, psi2 + 1.0],
            vec![psi2, p.large_scale, p.small_scale, 0.0],
            self.snr_scale() * g2.sqrt(),
        )?;
        Ok((self.log_norm().exp() * meijer_g(&spec, None)?).clamp(0.0, 1.0))
    }

    /// SNR produced by a normalised intensity sample.
    pub fn snr_from_intensity(&self, intensity: f64) -> f64 {
        let p = &self.params;
        let r = intensity / (p.pointing_mean * p.collected_fraction);
        self.mu * r * r
    }
}

/// Density of the FSO-hop SNR.
pub fn fso_snr_pdf(g2: f64, params: &DerivedFsoParams, mu: f64) -> Result<f64> {
    if !(g2 > 0.0) {
        return Err(Error::invalid("g2", "SNR must be positive"));
    }
    let link = FsoLink::with_params(*params, mu);
    let psi2 = params.pointing_ratio_sq();
    let spec = MeijerGSpec::new(
        3,
        0,
        vec![psi2 + 1.0],
        vec![psi2, params.large_scale, params.small_scale],
        link.snr_scale() * g2.sqrt(),
    )?;
    Ok((link.log_norm() - (2.0 * g2).ln()).exp() * meijer_g(&spec, None)?)
}

/// Density of the received intensity normalised to unit mean turbulence.
pub fn fso_intensity_pdf(intensity: f64, params: &DerivedFsoParams) -> Result<f64> {
    if !(intensity > 0.0) {
        return Err(Error::invalid("intensity", "must be positive"));
    }
    let (a, b) = (params.large_scale, params.small_scale);
    let psi2 = params.pointing_ratio_sq();
    let a0 = params.collected_fraction;
    let spec = MeijerGSpec::new(
        3,
        0,
        vec![psi2],
        vec![psi2 - 1.0, a - 1.0, b - 1.0],
        a * b * intensity / a0,
    )?;
    let log_pre = psi2.ln() + (a * b / a0).ln() - ln_gamma(a) - ln_gamma(b);
    Ok(log_pre.exp() * meijer_g(&spec, None)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn weak() -> FsoConfig {
        FsoConfig {
            length: 2000.0,
            cn2: 6e-15,
            wavelength: 1.55e-6,
            aperture_radius: 0.05,
            waist_radius: 0.05,
            curvature_radius: f64::INFINITY,
            jitter_std: 0.05,
            mu: 100.0,
            path_loss: 1.0,
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        ((a - b) / b).abs() < tol
    }

    #[test]
    fn derived_values_match_scripted_evaluation() {
        // 40-digit mpmath evaluation of the same chain
        let cases = [
            (
                6e-15,
                0.425_697_290_297_470_6,
                6.600_691_973_919_505,
                5.053_573_766_851_191,
                0.687_869_222_390_519,
                0.900_772_018_912_108_6,
            ),
            (
                2e-14,
                1.418_990_967_658_235_4,
                4.079_297_725_897_728,
                2.046_460_217_265_600_6,
                0.533_679_157_704_234_8,
                0.991_220_749_827_295_2,
            ),
            (
                5e-14,
                3.547_477_419_145_588_4,
                4.236_293_627_839_288,
                1.356_423_144_567_865_7,
                0.330_278_935_122_385_1,
                1.238_534_688_457_081_3,
            ),
        ];
        for (cn2, rytov, a, b, a0, psi) in cases {
            let p = derive_fso(&FsoConfig { cn2, ..weak() }).unwrap();
            assert!(close(p.rytov_variance, rytov, 1e-12));
            assert!(close(p.large_scale, a, 1e-11));
            assert!(close(p.small_scale, b, 1e-11));
            assert!(close(p.collected_fraction, a0, 1e-12));
            assert!(close(p.pointing_ratio, psi, 1e-12));
            assert!(close(p.fresnel, 0.394_704_258_867_900_43, 1e-12));
            assert!(close(p.fresnel_ratio, 0.341_501_278_795_295_9, 1e-12));
        }
    }

    #[test]
    fn short_link_has_negligible_turbulence() {
        let p = derive_fso(&FsoConfig {
            length: 1.0,
            ..weak()
        })
        .unwrap();
        assert!(p.large_scale > 1e3 && p.small_scale > 1e3);
    }

    #[test]
    fn unit_pointing_ratio() {
        let weq = derive_fso(&weak()).unwrap().equivalent_beam_radius;
        let p = derive_fso(&FsoConfig {
            jitter_std: weq / 2.0,
            ..weak()
        })
        .unwrap();
        assert!((p.pointing_ratio - 1.0).abs() < 1e-15);
        assert!((p.pointing_mean - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_jitter_is_degenerate() {
        let err = derive_fso(&FsoConfig {
            jitter_std: 0.0,
            ..weak()
        })
        .unwrap_err();
        assert_eq!(err, Error::DegenerateJitter);
        let p = derive_fso_no_pointing(&weak()).unwrap();
        assert!((p.pointing_ratio - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn snr_cdf_matches_integrated_pdf() {
        use crate::specfun::quad::integrate_tanh_sinh;
        let link = FsoLink::new(&weak()).unwrap();
        let x = 30.0;
        let q =
            integrate_tanh_sinh(|g, _, _| link.snr_pdf(g).unwrap(), 0.0, x, 1e-10, 0.0).unwrap();
        let c = link.snr_cdf(x).unwrap();
        assert!((q.value - c).abs() < 1e-8, "{} vs {c}", q.value);
    }
}
