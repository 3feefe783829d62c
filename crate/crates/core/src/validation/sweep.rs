use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::report::{ComparisonReport, ReportHeader, ReportRow};
use crate::analytics::{self, Metric};
use crate::channel::{db_to_linear, ChannelConfig, FsoLink, RfConfig};
use crate::error::{Error, Result};
use crate::mc::{self, SimPlan};

/// Quantity on the horizontal axis of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Mu1Db,
    Mu2Db,
    /// Both hops at the same average SNR.
    MuDb,
    /// Pointing jitter standard deviation, m.
    SigmaS,
    Rho,
    /// Relay count. The selected rank follows it when the fixed config picks
    /// the best relay (`order == relays`), otherwise it stays fixed.
    Relays,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Mu1Db => "mu1_db",
            SweepVariable::Mu2Db => "mu2_db",
            SweepVariable::MuDb => "mu_db",
            SweepVariable::SigmaS => "sigma_s",
            SweepVariable::Rho => "rho",
            SweepVariable::Relays => "relays",
        }
    }

    /// The fixed configuration with this variable set to `x`.
    pub fn apply(self, fixed: &ChannelConfig, x: f64) -> Result<ChannelConfig> {
        let mut c = *fixed;
        match self {
            SweepVariable::Mu1Db => c.rf.mu = db_to_linear(x),
            SweepVariable::Mu2Db => c.fso.mu = db_to_linear(x),
            SweepVariable::MuDb => {
                c.rf.mu = db_to_linear(x);
                c.fso.mu = db_to_linear(x);
            }
            SweepVariable::SigmaS => c.fso.jitter_std = x,
            SweepVariable::Rho => c.rf.rho = x,
            SweepVariable::Relays => {
                if x.fract() != 0.0 || x < 1.0 {
                    return Err(Error::invalid("sweep.range", "relay counts must be whole"));
                }
                let best = fixed.rf.order == fixed.rf.relays;
                c.rf.relays = x as u32;
                if best {
                    c.rf.order = c.rf.relays;
                }
            }
        }
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "mu1_db" => SweepVariable::Mu1Db,
            "mu2_db" => SweepVariable::Mu2Db,
            "mu_db" | "mu1=mu2_db" => SweepVariable::MuDb,
            "sigma_s" => SweepVariable::SigmaS,
            "rho" => SweepVariable::Rho,
            "relays" | "m" => SweepVariable::Relays,
            other => {
                return Err(Error::invalid(
                    "sweep.variable",
                    format!("unknown variable `{other}`"),
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start <= self.stop) {
            return Err(Error::invalid("sweep.range", "need start <= stop"));
        }
        if !(self.step > 0.0) {
            return Err(Error::invalid("sweep.range", "step must be positive"));
        }
        Ok(())
    }

    /// Grid `start, start + step, ...` up to and including `stop`.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compare {
    Analytic,
    Mc,
    Both,
}

impl FromStr for Compare {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Compare::Analytic),
            "mc" => Ok(Compare::Mc),
            "both" => Ok(Compare::Both),
            other => Err(Error::invalid(
                "sweep.compare",
                format!("expected analytic, mc or both, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: SweepRange,
    pub fixed: ChannelConfig,
    pub metrics: Vec<Metric>,
    pub compare: Compare,
    /// Outage threshold, linear.
    pub gamma_th: f64,
    /// Sample count, seed and streams for simulated points.
    pub sim: SimPlan,
    /// `|z|` above which a compared point fails.
    pub z_threshold: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.range.validate()?;
        if self.metrics.is_empty() {
            return Err(Error::invalid("sweep.metrics", "no metric requested"));
        }
        self.fixed.validate()
    }

    fn plan(&self) -> SimPlan {
        SimPlan {
            metrics: self.metrics.clone(),
            gamma_th: self.gamma_th,
            ..self.sim.clone()
        }
    }
}

fn evaluate_point(spec: &SweepSpec, x: f64) -> Vec<ReportRow> {
    const SUITE: &str = "sweep";
    let case = format!("{}={x}", spec.variable);
    let setup = spec
        .variable
        .apply(&spec.fixed, x)
        .and_then(|c| Ok((c.rf, c.link()?)));
    let (rf, link): (RfConfig, FsoLink) = match setup {
        Ok(v) => v,
        Err(e) => {
            return spec
                .metrics
                .iter()
                .map(|m| ReportRow::failed(SUITE, case.clone(), x, m.name(), &e))
                .collect()
        }
    };
    let simulated = match spec.compare {
        Compare::Analytic => None,
        _ => Some(mc::estimate(&spec.plan(), &rf, &link)),
    };
    spec.metrics
        .iter()
        .map(|&m| {
            let analytic = match spec.compare {
                Compare::Mc => None,
                _ => Some(analytics::evaluate(m, spec.gamma_th, &rf, &link)),
            };
            let mc = simulated.as_ref().map(|r| match r {
                Ok(r) => Ok(*r.get(m).expect("metric requested in plan")),
                Err(e) => Err(e.clone()),
            });
            match (analytic, mc) {
                (Some(Err(e)), _) | (_, Some(Err(e))) => {
                    log::error!("{case} {m}: {e}");
                    ReportRow::failed(SUITE, case.clone(), x, m.name(), &e)
                }
                (Some(Ok(a)), Some(Ok(e))) => {
                    ReportRow::z(SUITE, case.clone(), x, m.name(), a, e, spec.z_threshold)
                }
                (a, e) => ReportRow::evaluated(
                    SUITE,
                    case.clone(),
                    x,
                    m.name(),
                    a.map(|v| v.unwrap()),
                    e.map(|v| v.unwrap()),
                ),
            }
        })
        .collect()
}

/// Evaluates every grid point; points run concurrently, rows stay in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<ComparisonReport> {
    spec.validate()?;
    let rows: Vec<ReportRow> = spec
        .range
        .points()
        .into_par_iter()
        .map(|x| evaluate_point(spec, x))
        .collect::<Vec<_>>()
        .concat();
    let header = ReportHeader {
        seed: spec.sim.seed,
        samples: spec.sim.samples,
        streams: spec.sim.streams,
        z_threshold: spec.z_threshold,
        tolerances: Vec::new(),
        suites: vec!["sweep".into()],
    };
    Ok(ComparisonReport::new(header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::ModulationScheme;
    use crate::channel::Turbulence;

    fn spec(variable: SweepVariable, range: SweepRange, compare: Compare) -> SweepSpec {
        SweepSpec {
            variable,
            range,
            fixed: ChannelConfig::reference(Turbulence::Weak),
            metrics: vec![Metric::Ber(ModulationScheme::Bpsk)],
            compare,
            gamma_th: 1.0,
            sim: SimPlan::new(20_000, 1, vec![]),
            z_threshold: 3.0,
        }
    }

    #[test]
    fn grid_includes_both_ends() {
        let r = SweepRange {
            start: 0.0,
            stop: 40.0,
            step: 2.0,
        };
        let p = r.points();
        assert_eq!(p.len(), 21);
        assert_eq!(p[20], 40.0);
        assert!(SweepRange { step: 0.0, ..r }.validate().is_err());
        assert!(SweepRange {
            start: 5.0,
            stop: 1.0,
            step: 1.0
        }
        .validate()
        .is_err());
    }

    #[test]
    fn ber_falls_along_the_diagonal() {
        let s = spec(
            SweepVariable::MuDb,
            SweepRange {
                start: 0.0,
                stop: 40.0,
                step: 2.0,
            },
            Compare::Analytic,
        );
        let report = run_sweep(&s).unwrap();
        assert!(report.passed());
        let ber: Vec<f64> = report.rows.iter().map(|r| r.analytic.unwrap()).collect();
        assert_eq!(ber.len(), 21);
        assert!(ber.windows(2).all(|w| w[1] < w[0]), "{ber:?}");
    }

    #[test]
    fn bad_points_become_failing_rows() {
        let s = spec(
            SweepVariable::Rho,
            SweepRange {
                start: 0.5,
                stop: 1.5,
                step: 0.5,
            },
            Compare::Analytic,
        );
        let report = run_sweep(&s).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert_eq!(report.summary.failures, 1);
        assert!(report.rows[2].note.contains("rf.rho"));
    }

    #[test]
    fn best_relay_tracks_relay_count() {
        let fixed = ChannelConfig::reference(Turbulence::Weak);
        let c = SweepVariable::Relays.apply(&fixed, 5.0).unwrap();
        assert_eq!((c.rf.relays, c.rf.order), (5, 5));
        let mut worst = fixed;
        worst.rf.order = 1;
        let c = SweepVariable::Relays.apply(&worst, 5.0).unwrap();
        assert_eq!((c.rf.relays, c.rf.order), (5, 1));
    }
}
