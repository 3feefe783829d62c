//! Physical link budget as an alternative to specifying the hop SNRs.

use super::fso::DerivedFsoParams;
use crate::error::{Error, Result};

/// Relative tolerance when a budget and explicit SNRs are both given.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Source transmit power, W.
    pub source_power: f64,
    /// Noise variance at the relay, W.
    pub relay_noise: f64,
    /// Noise variance at the destination, W.
    pub destination_noise: f64,
    /// Optical transmit power, W.
    pub optical_power: f64,
    /// Optical-to-electrical conversion, A/W.
    pub responsivity: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            (self.source_power, "link_budget.ps"),
            (self.relay_noise, "link_budget.sigma2_sr"),
            (self.destination_noise, "link_budget.sigma2_rd"),
            (self.optical_power, "link_budget.pt"),
            (self.responsivity, "link_budget.eta"),
        ];
        for (v, field) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Average SNR of the RF hop.
    pub fn rf_snr(&self) -> f64 {
        self.source_power / self.relay_noise
    }

    /// Electrical SNR of the FSO hop.
    pub fn fso_snr(&self, params: &DerivedFsoParams) -> f64 {
        let e = self.responsivity
            * self.optical_power
            * params.pointing_mean
            * params.collected_fraction;
        e * e / self.destination_noise
    }

    /// Squared fixed relay gain for a given relay-gain constant.
    pub fn relay_gain_sq(&self, re_const: f64) -> f64 {
        1.0 / (self.relay_noise * re_const)
    }

    /// Check explicitly given SNRs against the budget.
    pub fn check(&self, rf_snr: f64, fso_snr: f64, params: &DerivedFsoParams) -> Result<()> {
        self.validate()?;
        for (given, derived, field) in [
            (rf_snr, self.rf_snr(), "rf.mu1_db"),
            (fso_snr, self.fso_snr(params), "fso.mu2_db"),
        ] {
            if ((given - derived) / derived).abs() > CONSISTENCY_TOL {
                return Err(Error::invalid(
                    field,
                    format!("given SNR {given} disagrees with link budget {derived}"),
                ));
            }
        }
        Ok(())
    }
}
