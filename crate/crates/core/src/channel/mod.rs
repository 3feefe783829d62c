//! Physical model of the two hops and of the relay combining.

mod budget;
mod fso;
mod rf;

pub use budget::{LinkBudget, CONSISTENCY_TOL};
pub use fso::{
    derive_fso, derive_fso_no_pointing, fso_intensity_pdf, fso_snr_pdf, DerivedFsoParams,
    FsoConfig, FsoLink, Turbulence, CN2_RANGE, NO_POINTING_DIVISOR,
};
pub use rf::{re_constant, rf_cdf, rf_pdf, RfConfig, SelectionTerms, Term, MAX_RELAYS};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// End-to-end SNR of a fixed-gain amplify-and-forward relay.
pub fn gamma_eq(g1: f64, g2: f64, re_const: f64) -> f64 {
    if g2.is_infinite() {
        return g1;
    }
    g1 * g2 / (g2 + re_const)
}

/// Both hops of the system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub rf: RfConfig,
    pub fso: FsoConfig,
}

impl ChannelConfig {
    /// Best of two relays, `rho = 0.72`, both hops at 20 dB, reference optics.
    pub fn reference(turbulence: Turbulence) -> Self {
        ChannelConfig {
            rf: RfConfig {
                relays: 2,
                order: 2,
                rho: 0.72,
                mu: 100.0,
            },
            fso: FsoConfig::reference(turbulence.cn2(), 100.0),
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        self.rf.validate()?;
        self.fso.validate()
    }

    pub fn link(&self) -> crate::Result<FsoLink> {
        FsoLink::new(&self.fso)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combining_examples() {
        assert_eq!(gamma_eq(10.0, 20.0, 5.0), 8.0);
        assert_eq!(gamma_eq(0.0, 20.0, 5.0), 0.0);
        assert_eq!(gamma_eq(3.0, f64::INFINITY, 5.0), 3.0);
        assert!((gamma_eq(3.0, 1e15, 5.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn decibels() {
        assert!((db_to_linear(20.0) - 100.0).abs() < 1e-12);
        assert!((linear_to_db(1000.0) - 30.0).abs() < 1e-12);
    }
}
