//! Closed-form end-to-end metrics: CDF of the combined SNR, average BER and
//! ergodic capacity.
//!
//! All three are finite sums over the exponential components of the RF law
//! (see [`SelectionTerms`]), each multiplied by a Meijer G-function of the
//! turbulence and pointing parameters:
//!
//! ```text
//! F(g)  = 1 - sum_i w_i exp(-c_i g) K G^{6,0}_{1,6}(B c_i g | (psi^2+2)/2; chi)
//! BER   = 1/2 - K' sum_i w_i (1 + c_i/q)^-p G^{6,1}_{2,6}(B c_i/(c_i+q) | 1-p, (psi^2+2)/2; chi)
//! C     = K / ln 2 sum_i w_i (s / c_i) G2(s / c_i, B)
//! ```
//!
//! with `B = alpha^2 beta^2 kappa^2 R / (16 mu2)` and `G2` the bivariate kernel
//! of [`Egbmgf2Spec::capacity_kernel`].

mod oracle;

use std::f64::consts::{LN_2, PI};
use std::fmt;

use crate::channel::{re_constant, FsoLink, RfConfig, SelectionTerms};
use crate::error::{Error, Result};
use crate::specfun::{chi_row, egbmgf, ln_gamma, meijer_g, Egbmgf2Spec, MeijerGSpec};
use crate::sum::sum_by_magnitude;

pub use oracle::{avg_ber_quadrature, capacity_quadrature, cdf_eq_quadrature, QUADRATURE_REL_TOL};

/// Parameter row `(psi^2/2, alpha/2, (alpha+1)/2, beta/2, (beta+1)/2, 0)` shared by every kernel.
pub fn shape_row(link: &FsoLink) -> [f64; 6] {
    let p = &link.params;
    chi_row(p.pointing_ratio_sq(), p.large_scale, p.small_scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModulationScheme {
    Bpsk,
    Dbpsk,
}

impl ModulationScheme {
    pub const ALL: [ModulationScheme; 2] = [ModulationScheme::Bpsk, ModulationScheme::Dbpsk];

    /// Shape `p` and rate `q` of the conditional error probability
    /// `Gamma(p, q g) / (2 Gamma(p))`.
    pub fn pq(self) -> (f64, f64) {
        match self {
            ModulationScheme::Bpsk => (0.5, 1.0),
            ModulationScheme::Dbpsk => (1.0, 1.0),
        }
    }

    /// Error probability at a fixed SNR.
    pub fn conditional_ber(self, snr: f64) -> f64 {
        match self {
            ModulationScheme::Bpsk => 0.5 * crate::specfun::erfc(snr.sqrt()),
            ModulationScheme::Dbpsk => 0.5 * (-snr).exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModulationScheme::Bpsk => "bpsk",
            ModulationScheme::Dbpsk => "dbpsk",
        }
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModulationScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(ModulationScheme::Bpsk),
            "dbpsk" => Ok(ModulationScheme::Dbpsk),
            other => Err(Error::invalid(
                "modulation",
                format!("unknown scheme `{other}`"),
            )),
        }
    }
}

/// Factor applied to the SNR inside the capacity logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapacityBound {
    /// `log2(1 + e/(2 pi) g)`, the intensity-modulation lower bound.
    #[default]
    Intensity,
    /// `log2(1 + g)`.
    Shannon,
}

impl CapacityBound {
    pub fn snr_factor(self) -> f64 {
        match self {
            CapacityBound::Intensity => std::f64::consts::E / (2.0 * PI),
            CapacityBound::Shannon => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Cdf,
    Ber(ModulationScheme),
    Capacity,
}

impl Metric {
    pub fn name(self) -> String {
        match self {
            Metric::Cdf => "cdf".into(),
            Metric::Ber(m) => format!("ber_{m}"),
            Metric::Capacity => "capacity".into(),
        }
    }

    pub fn is_probability(self) -> bool {
        !matches!(self, Metric::Capacity)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cdf" | "outage" => Ok(Metric::Cdf),
            "capacity" => Ok(Metric::Capacity),
            "ber" | "ber_bpsk" => Ok(Metric::Ber(ModulationScheme::Bpsk)),
            "ber_dbpsk" => Ok(Metric::Ber(ModulationScheme::Dbpsk)),
            other => Err(Error::invalid(
                "metric",
                format!("unknown metric `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Quadrature,
    Mc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Quadrature => "quadrature",
            Method::Mc => "mc",
        }
    }
}

/// One evaluated metric at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfPoint {
    pub mu1_db: f64,
    pub mu2_db: f64,
    pub rho: f64,
    pub relays: u32,
    pub order: u32,
    pub metric: Metric,
    pub value: f64,
    pub method: Method,
    /// Zero for deterministic methods.
    pub std_err: f64,
}

/// Quantities shared by the three closed forms.
pub(crate) struct Kernel {
    terms: SelectionTerms,
    psi2: f64,
    alpha: f64,
    beta: f64,
    chi: [f64; 6],
    /// `alpha^2 beta^2 kappa^2 R / (16 mu2)`
    scale: f64,
}

impl Kernel {
    pub(crate) fn new(rf: &RfConfig, link: &FsoLink) -> Result<Self> {
        rf.validate()?;
        let p = &link.params;
        let re = re_constant(rf);
        let ab = p.large_scale * p.small_scale * p.pointing_mean;
        Ok(Kernel {
            terms: rf.terms(),
            psi2: p.pointing_ratio_sq(),
            alpha: p.large_scale,
            beta: p.small_scale,
            chi: shape_row(link),
            scale: ab * ab * re / (16.0 * link.mu),
        })
    }

    /// log of `2^(alpha+beta-3) psi^2 / (pi Gamma(alpha) Gamma(beta))`.
    fn log_norm(&self) -> f64 {
        (self.alpha + self.beta - 3.0) * LN_2 + self.psi2.ln()
            - PI.ln()
            - ln_gamma(self.alpha)
            - ln_gamma(self.beta)
    }

    pub(crate) fn ccdf(&self, gamma: f64) -> Result<f64> {
        let mut parts = Vec::with_capacity(self.terms.len());
        for t in self.terms.iter() {
            let decay = t.rate * gamma;
            if decay > 745.0 {
                continue;
            }
            let g = self.laplace(self.scale * decay)?;
            parts.push(t.sign * (t.log_weight - decay).exp() * g);
        }
        Ok(sum_by_magnitude(&mut parts).clamp(0.0, 1.0))
    }

    fn upper(&self) -> f64 {
        0.5 * (self.psi2 + 2.0)
    }

    /// `K G^{6,0}_{1,6}(z)`: the Laplace transform of the inverse FSO SNR.
    fn laplace(&self, z: f64) -> Result<f64> {
        let spec = MeijerGSpec::new(6, 0, vec![self.upper()], self.chi.to_vec(), z)?;
        Ok(self.log_norm().exp() * meijer_g(&spec, None)?)
    }
}

/// CDF of the end-to-end SNR at a threshold.
pub fn cdf_eq(gamma_th: f64, rf: &RfConfig, link: &FsoLink) -> Result<f64> {
    Ok((1.0 - ccdf_eq(gamma_th, rf, link)?).clamp(0.0, 1.0))
}

/// Complementary CDF of the end-to-end SNR, free of the `1 - F` cancellation.
pub fn ccdf_eq(gamma_th: f64, rf: &RfConfig, link: &FsoLink) -> Result<f64> {
    if !(gamma_th > 0.0) {
        if gamma_th == 0.0 {
            return Ok(1.0);
        }
        return Err(Error::invalid("gamma_th", "threshold must be non-negative"));
    }
    Kernel::new(rf, link)?.ccdf(gamma_th)
}

/// Average bit error rate.
pub fn avg_ber(scheme: ModulationScheme, rf: &RfConfig, link: &FsoLink) -> Result<f64> {
    let k = Kernel::new(rf, link)?;
    let (p, q) = scheme.pq();
    let log_pre = k.log_norm() - LN_2 - ln_gamma(p);
    let mut parts = Vec::with_capacity(k.terms.len());
    for t in k.terms.iter() {
        let ratio = t.rate / q;
        let z = k.scale * t.rate / (t.rate + q);
        let spec = MeijerGSpec::new(6, 1, vec![1.0 - p, k.upper()], k.chi.to_vec(), z)?;
        let g = meijer_g(&spec, None)?;
        parts.push(t.sign * (t.log_weight + log_pre - p * ratio.ln_1p()).exp() * g);
    }
    Ok((0.5 - sum_by_magnitude(&mut parts)).clamp(0.0, 0.5))
}

/// Ergodic capacity in bit/s for a bandwidth in Hz (bit/s/Hz when 1).
pub fn ergodic_capacity(rf: &RfConfig, link: &FsoLink, bandwidth: f64) -> Result<f64> {
    ergodic_capacity_with(rf, link, bandwidth, CapacityBound::Intensity)
}

pub fn ergodic_capacity_with(
    rf: &RfConfig,
    link: &FsoLink,
    bandwidth: f64,
    bound: CapacityBound,
) -> Result<f64> {
    if !(bandwidth > 0.0) {
        return Err(Error::invalid("bandwidth", "must be positive"));
    }
    let k = Kernel::new(rf, link)?;
    let s = bound.snr_factor();
    let mut parts = Vec::with_capacity(k.terms.len());
    for t in k.terms.iter() {
        let a = s / t.rate;
        let spec = Egbmgf2Spec::capacity_kernel(k.psi2, k.alpha, k.beta, a, k.scale)?;
        let g = egbmgf(&spec, None, None)?;
        parts.push(t.sign * (t.log_weight + k.log_norm()).exp() * a * g);
    }
    Ok((bandwidth * sum_by_magnitude(&mut parts) / LN_2).max(0.0))
}

/// Evaluate one metric in closed form.
pub fn evaluate(metric: Metric, gamma_th: f64, rf: &RfConfig, link: &FsoLink) -> Result<f64> {
    match metric {
        Metric::Cdf => cdf_eq(gamma_th, rf, link),
        Metric::Ber(m) => avg_ber(m, rf, link),
        Metric::Capacity => ergodic_capacity(rf, link, 1.0),
    }
}
