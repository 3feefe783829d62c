//! RF hop: SNR of the relay picked by partial selection on outdated CSI.
//!
//! The source ranks `M` relays by outdated channel estimates and uses the
//! `l`-th worst. The true SNR of that relay is an exponential mixture
//!
//! ```text
//! f(x) = sum_i w_i c_i exp(-c_i x),   F(x) = sum_i w_i (1 - exp(-c_i x))
//! ```
//!
//! with `i = 0..l-1`, `k = M - l + i`, `c_i = (k + 1) / ((k (1 - rho) + 1) mu)`
//! and `w_i = l C(M, l) C(l-1, i) (-1)^i / (k + 1)`. The weights sum to one.

use crate::error::{Error, Result};
use crate::specfun::ln_binomial;
use crate::sum::sum_by_magnitude;

/// Largest relay count; binomials are formed in log space up to here.
pub const MAX_RELAYS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfConfig {
    /// Number of candidate relays.
    pub relays: u32,
    /// Rank of the selected relay, 1 = worst, `relays` = best.
    pub order: u32,
    /// Power correlation between the outdated estimate and the actual channel.
    pub rho: f64,
    /// Average SNR of the hop, linear.
    pub mu: f64,
}

impl RfConfig {
    pub fn new(relays: u32, order: u32, rho: f64, mu: f64) -> Result<Self> {
        let cfg = RfConfig {
            relays,
            order,
            rho,
            mu,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_db(relays: u32, order: u32, rho: f64, mu_db: f64) -> Result<Self> {
        Self::new(relays, order, rho, super::db_to_linear(mu_db))
    }

    pub fn validate(&self) -> Result<()> {
        if self.relays == 0 || self.relays > MAX_RELAYS {
            return Err(Error::invalid(
                "rf.relays",
                format!("must lie in [1, {MAX_RELAYS}], got {}", self.relays),
            ));
        }
        if self.order == 0 || self.order > self.relays {
            return Err(Error::invalid(
                "rf.order",
                format!("must lie in [1, {}], got {}", self.relays, self.order),
            ));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid(
                "rf.rho",
                format!("must lie in [0, 1], got {}", self.rho),
            ));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::invalid("rf.mu", "average SNR must be positive"));
        }
        Ok(())
    }

    pub fn terms(&self) -> SelectionTerms {
        SelectionTerms::new(self)
    }
}

/// One exponential component of the selected-relay SNR law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub index: u32,
    /// log |w_i|
    pub log_weight: f64,
    /// sign of w_i
    pub sign: f64,
    /// decay rate c_i
    pub rate: f64,
}

impl Term {
    pub fn weight(&self) -> f64 {
        self.sign * self.log_weight.exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTerms {
    terms: Vec<Term>,
}

impl SelectionTerms {
    pub fn new(cfg: &RfConfig) -> Self {
        let (m, l) = (cfg.relays, cfg.order);
        let head = f64::from(l).ln() + ln_binomial(m, l);
        let terms = (0..l)
            .map(|i| {
                let k = f64::from(m - l + i);
                let outdated = k * (1.0 - cfg.rho) + 1.0;
                Term {
                    index: i,
                    log_weight: head + ln_binomial(l - 1, i) - (k + 1.0).ln(),
                    sign: if i % 2 == 0 { 1.0 } else { -1.0 },
                    rate: (k + 1.0) / (outdated * cfg.mu),
                }
            })
            .collect();
        SelectionTerms { terms }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate<F: Fn(&Term) -> f64>(&self, f: F) -> f64 {
        let mut parts: Vec<f64> = self.terms.iter().map(f).collect();
        sum_by_magnitude(&mut parts)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.accumulate(|t| t.sign * (t.log_weight + t.rate.ln() - t.rate * x).exp())
            .max(0.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.accumulate(|t| -t.weight() * (-t.rate * x).exp_m1())
            .clamp(0.0, 1.0)
    }

    pub fn ccdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        self.accumulate(|t| t.sign * (t.log_weight - t.rate * x).exp())
            .clamp(0.0, 1.0)
    }

    /// Mean SNR of the selected relay.
    pub fn mean(&self) -> f64 {
        self.accumulate(|t| t.weight() / t.rate)
    }

    /// Smallest rate; the CCDF decays no slower than `exp(-rate x)`.
    pub fn slowest_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.rate)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn rf_pdf(x: f64, cfg: &RfConfig) -> f64 {
    cfg.terms().pdf(x)
}

pub fn rf_cdf(x: f64, cfg: &RfConfig) -> f64 {
    cfg.terms().cdf(x)
}

/// Fixed relay-gain constant `1 + E[SNR of the selected relay]`.
pub fn re_constant(cfg: &RfConfig) -> f64 {
    1.0 + cfg.terms().mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quad::integrate_gk;

    fn cfg(m: u32, l: u32, rho: f64, mu: f64) -> RfConfig {
        RfConfig::new(m, l, rho, mu).unwrap()
    }

    #[test]
    fn weights_sum_to_one() {
        for m in 1..=8 {
            for l in 1..=m {
                let t = cfg(m, l, 0.3, 10.0).terms();
                let s: f64 = t.iter().map(Term::weight).sum();
                assert!((s - 1.0).abs() < 1e-12, "M={m} l={l}: {s}");
            }
        }
    }

    #[test]
    fn uncorrelated_selection_is_plain_exponential() {
        let mu = 7.0;
        for m in 1..=6 {
            for l in 1..=m {
                let c = cfg(m, l, 0.0, mu);
                for x in [0.0, 0.5, 3.0, 20.0] {
                    let want = (-x / mu).exp() / mu;
                    assert!((rf_pdf(x, &c) - want).abs() < 1e-10);
                    assert!((rf_cdf(x, &c) + (-x / mu).exp_m1()).abs() < 1e-10);
                }
                assert!((re_constant(&c) - (1.0 + mu)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn best_of_two_with_perfect_estimates() {
        let c = cfg(2, 2, 1.0, 10.0);
        assert!((re_constant(&c) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_is_integral_of_pdf() {
        let c = cfg(4, 4, 0.5, 5.0);
        let q = integrate_gk(|x| rf_pdf(x, &c), &[0.0, 5.0], 1e-14, 1e-13, 200).unwrap();
        assert!((q.value - rf_cdf(5.0, &c)).abs() < 1e-10);
        assert!((rf_cdf(5e3, &c) - 1.0).abs() < 1e-12);
        assert_eq!(rf_cdf(0.0, &c), 0.0);
    }

    #[test]
    fn large_relay_counts_stay_finite() {
        let c = cfg(64, 1, 0.5, 10.0);
        let p = rf_pdf(1.0, &c);
        assert!(p.is_finite() && p > 0.0);
    }

    #[test]
    fn rejects_bad_order() {
        let err = RfConfig::new(2, 3, 0.5, 1.0).unwrap_err();
        assert!(err.to_string().contains("rf.order"));
        assert!(RfConfig::new(2, 1, 1.5, 1.0).is_err());
    }
}
