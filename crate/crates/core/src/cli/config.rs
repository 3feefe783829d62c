//! TOML run configuration.
//!
//! [`FileConfig`] mirrors the file layout one-to-one and is what gets echoed
//! into output headers. [`RunConfig`] is the resolved, linear-scale model; it
//! is built from a normalised `FileConfig` and is the only place dB values are
//! converted.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytics::Metric;
use crate::channel::{
    db_to_linear, linear_to_db, ChannelConfig, FsoConfig, LinkBudget, RfConfig, Turbulence,
};
use crate::error::Error;
use crate::mc::{self, SimPlan};
use crate::validation::{Compare, Suite, SweepRange, SweepSpec, SweepVariable, ValidationConfig};

/// Problem with the configuration, reported with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn missing(field: &str) -> ConfigError {
    ConfigError(format!("missing required field `{field}`"))
}

fn require<T>(v: Option<T>, field: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| missing(field))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfSection {
    #[serde(alias = "m", skip_serializing_if = "Option::is_none")]
    pub relays: Option<u32>,
    #[serde(alias = "l", skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu1_db: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FsoSection {
    /// Link length, m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Refractive-index structure parameter, m^-2/3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cn2: Option<f64>,
    /// Wavelength, µm.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Receiver aperture radius, m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Beam waist radius at the transmitter, m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    /// Phase-front radius of curvature, m. Absent means a collimated beam.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0: Option<f64>,
    /// Pointing jitter standard deviation, m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu2_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_loss: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_sr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2_rd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

/// A threshold given either as a number (linear) or a string like `"3dB"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    Linear(f64),
    Text(String),
}

impl Threshold {
    pub fn linear(&self) -> Result<f64, ConfigError> {
        let v = match self {
            Threshold::Linear(v) => *v,
            Threshold::Text(s) => parse_threshold(s)?,
        };
        if !(v.is_finite() && v > 0.0) {
            return Err(ConfigError(format!(
                "invalid `analysis.gamma_th`: must be positive, got {v}"
            )));
        }
        Ok(v)
    }
}

impl FromStr for Threshold {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        parse_threshold(s)?;
        Ok(match s.trim().parse::<f64>() {
            Ok(v) => Threshold::Linear(v),
            Err(_) => Threshold::Text(s.trim().to_string()),
        })
    }
}

fn parse_threshold(s: &str) -> Result<f64, ConfigError> {
    let t = s.trim();
    let bad = || ConfigError(format!("invalid `analysis.gamma_th`: cannot parse `{s}`"));
    match t.strip_suffix("dB").or_else(|| t.strip_suffix("db")) {
        Some(db) => db
            .trim()
            .parse::<f64>()
            .map(db_to_linear)
            .map_err(|_| bad()),
        None => t.parse::<f64>().map_err(|_| bad()),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Vec<String>>,
    /// Outage threshold, linear or `"<x>dB"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_th: Option<Threshold>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Used by `validate`; `analyze` and `simulate` fix the method themselves.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub streams: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_db: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// The configuration file as written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rf: Option<RfSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fso: Option<FsoSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link_budget: Option<BudgetSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

/// Default metrics when `[analysis].metrics` is absent.
pub const DEFAULT_METRICS: [&str; 3] = ["cdf", "ber_bpsk", "capacity"];

impl FileConfig {
    /// Parses TOML; syntax and unknown-key errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("config error: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config tables serialise")
    }

    /// The weak-turbulence reference system at 20 dB on both hops.
    pub fn reference() -> Self {
        let c = ChannelConfig::reference(Turbulence::Weak);
        FileConfig {
            rf: Some(RfSection {
                relays: Some(c.rf.relays),
                order: Some(c.rf.order),
                rho: Some(c.rf.rho),
                mu1_db: Some(20.0),
            }),
            fso: Some(FsoSection {
                d: Some(c.fso.length),
                cn2: Some(c.fso.cn2),
                lambda: Some(c.fso.wavelength * 1e6),
                a: Some(c.fso.aperture_radius),
                a0: Some(c.fso.waist_radius),
                f0: None,
                sigma_s: Some(c.fso.jitter_std),
                mu2_db: Some(20.0),
                path_loss: Some(c.fso.path_loss),
            }),
            ..Default::default()
        }
    }

    fn rf(&self) -> RfSection {
        self.rf.clone().unwrap_or_default()
    }

    fn fso(&self) -> FsoSection {
        self.fso.clone().unwrap_or_default()
    }

    fn budget(&self) -> Result<Option<LinkBudget>, ConfigError> {
        let Some(b) = &self.link_budget else {
            return Ok(None);
        };
        let budget = LinkBudget {
            source_power: require(b.ps, "link_budget.ps")?,
            relay_noise: require(b.sigma2_sr, "link_budget.sigma2_sr")?,
            destination_noise: require(b.sigma2_rd, "link_budget.sigma2_rd")?,
            optical_power: require(b.pt, "link_budget.pt")?,
            responsivity: require(b.eta, "link_budget.eta")?,
        };
        budget.validate()?;
        Ok(Some(budget))
    }

    /// Fills every optional value with its effective default so the echo is
    /// self-contained.
    pub fn normalised(mut self) -> Result<Self, ConfigError> {
        let budget = self.budget()?;
        let rf = self.rf();
        let fso = self.fso();

        let mut rf_out = RfSection {
            relays: Some(require(rf.relays, "rf.relays")?),
            order: Some(require(rf.order, "rf.order")?),
            rho: Some(require(rf.rho, "rf.rho")?),
            mu1_db: rf.mu1_db,
        };
        let mut fso_out = FsoSection {
            d: Some(require(fso.d, "fso.d")?),
            cn2: Some(require(fso.cn2, "fso.cn2")?),
            lambda: Some(require(fso.lambda, "fso.lambda")?),
            a: Some(require(fso.a, "fso.a")?),
            a0: Some(require(fso.a0, "fso.a0")?),
            f0: fso.f0.filter(|f| f.is_finite()),
            sigma_s: Some(require(fso.sigma_s, "fso.sigma_s")?),
            mu2_db: fso.mu2_db,
            path_loss: Some(fso.path_loss.unwrap_or(1.0)),
        };
        if budget.is_none() {
            rf_out.mu1_db = Some(require(rf.mu1_db, "rf.mu1_db")?);
            fso_out.mu2_db = Some(require(fso.mu2_db, "fso.mu2_db")?);
        }
        self.rf = Some(rf_out);
        self.fso = Some(fso_out);

        let analysis = self.analysis.clone().unwrap_or_default();
        self.analysis = Some(AnalysisSection {
            metrics: Some(
                analysis
                    .metrics
                    .unwrap_or_else(|| DEFAULT_METRICS.iter().map(|s| s.to_string()).collect()),
            ),
            gamma_th: Some(analysis.gamma_th.unwrap_or(Threshold::Text("0dB".into()))),
        });

        if let Some(s) = &self.sweep {
            self.sweep = Some(SweepSection {
                variable: Some(require(s.variable.clone(), "sweep.variable")?),
                start: Some(require(s.start, "sweep.start")?),
                stop: Some(require(s.stop, "sweep.stop")?),
                step: Some(require(s.step, "sweep.step")?),
                compare: Some(s.compare.clone().unwrap_or_else(|| "both".into())),
            });
        }

        let sim = self.sim.clone().unwrap_or_default();
        self.sim = Some(SimSection {
            samples: Some(sim.samples.unwrap_or(1_000_000)),
            seed: Some(sim.seed.unwrap_or(mc::DEFAULT_SEED)),
            streams: Some(sim.streams.unwrap_or(mc::DEFAULT_STREAMS)),
        });

        let v = self.validation.clone().unwrap_or_default();
        let d = ValidationConfig::default();
        self.validation = Some(ValidationSection {
            suites: Some(
                v.suites
                    .unwrap_or_else(|| Suite::ALL.iter().map(|s| s.name().to_string()).collect()),
            ),
            samples: Some(v.samples.unwrap_or(d.samples)),
            histogram_samples: Some(v.histogram_samples.unwrap_or(d.histogram_samples)),
            bins: Some(v.bins.unwrap_or(d.bins)),
            grid_db: Some(v.grid_db.unwrap_or(d.grid_db)),
            tolerances: v.tolerances,
        });
        Ok(self)
    }

    /// Resolves a normalised config into the linear-scale run model.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let rf = self.rf();
        let fso = self.fso();
        let budget = self.budget()?;

        let mut fso_cfg = FsoConfig {
            length: require(fso.d, "fso.d")?,
            cn2: require(fso.cn2, "fso.cn2")?,
            wavelength: require(fso.lambda, "fso.lambda")? * 1e-6,
            aperture_radius: require(fso.a, "fso.a")?,
            waist_radius: require(fso.a0, "fso.a0")?,
            curvature_radius: fso.f0.unwrap_or(f64::INFINITY),
            jitter_std: require(fso.sigma_s, "fso.sigma_s")?,
            mu: 1.0,
            path_loss: fso.path_loss.unwrap_or(1.0),
        };
        let mut rf_cfg = RfConfig {
            relays: require(rf.relays, "rf.relays")?,
            order: require(rf.order, "rf.order")?,
            rho: require(rf.rho, "rf.rho")?,
            mu: 1.0,
        };
        rf_cfg.validate()?;
        fso_cfg.validate()?;

        match budget {
            None => {
                rf_cfg.mu = db_to_linear(require(rf.mu1_db, "rf.mu1_db")?);
                fso_cfg.mu = db_to_linear(require(fso.mu2_db, "fso.mu2_db")?);
            }
            Some(b) => {
                let params = crate::channel::derive_fso(&fso_cfg)?;
                rf_cfg.mu = match rf.mu1_db {
                    Some(db) => db_to_linear(db),
                    None => b.rf_snr(),
                };
                fso_cfg.mu = match fso.mu2_db {
                    Some(db) => db_to_linear(db),
                    None => b.fso_snr(&params),
                };
                b.check(rf_cfg.mu, fso_cfg.mu, &params)?;
                log::info!(
                    "link budget: mu1 = {:.3} dB, mu2 = {:.3} dB",
                    linear_to_db(rf_cfg.mu),
                    linear_to_db(fso_cfg.mu)
                );
            }
        }
        let channel = ChannelConfig {
            rf: rf_cfg,
            fso: fso_cfg,
        };
        channel.validate()?;

        let analysis = self.analysis.clone().unwrap_or_default();
        let metrics = analysis
            .metrics
            .unwrap_or_else(|| DEFAULT_METRICS.iter().map(|s| s.to_string()).collect())
            .iter()
            .map(|m| {
                m.parse::<Metric>().map_err(|_| {
                    ConfigError(format!("invalid `analysis.metrics`: unknown metric `{m}`"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if metrics.is_empty() {
            return Err(ConfigError("invalid `analysis.metrics`: empty list".into()));
        }
        let gamma_th = analysis
            .gamma_th
            .unwrap_or(Threshold::Linear(1.0))
            .linear()?;

        let sim_s = self.sim.clone().unwrap_or_default();
        let mut sim = SimPlan::new(
            sim_s.samples.unwrap_or(1_000_000),
            sim_s.seed.unwrap_or(mc::DEFAULT_SEED),
            metrics.clone(),
        )
        .with_streams(sim_s.streams.unwrap_or(mc::DEFAULT_STREAMS))
        .with_threshold(gamma_th);
        sim.metrics = metrics.clone();
        sim.validate()?;

        let sweep = match &self.sweep {
            None => None,
            Some(s) => Some(SweepSpec {
                variable: require(s.variable.clone(), "sweep.variable")?
                    .parse::<SweepVariable>()?,
                range: SweepRange {
                    start: require(s.start, "sweep.start")?,
                    stop: require(s.stop, "sweep.stop")?,
                    step: require(s.step, "sweep.step")?,
                },
                fixed: channel,
                metrics: metrics.clone(),
                compare: s.compare.as_deref().unwrap_or("both").parse::<Compare>()?,
                gamma_th,
                sim: sim.clone(),
                z_threshold: 3.0,
            }),
        };
        if let Some(s) = &sweep {
            s.validate()?;
        }

        let v = self.validation.clone().unwrap_or_default();
        let mut validation = ValidationConfig {
            channel,
            seed: sim.seed,
            streams: sim.streams,
            ..ValidationConfig::default()
        };
        if let Some(n) = v.samples {
            validation.samples = n;
        }
        if let Some(n) = v.histogram_samples {
            validation.histogram_samples = n;
        }
        if let Some(n) = v.bins {
            validation.bins = n;
        }
        if let Some(g) = v.grid_db {
            validation.grid_db = g;
        }
        for (name, value) in v.tolerances.iter().flatten() {
            validation.tolerances.set(name, *value).map_err(|_| {
                ConfigError(format!(
                    "invalid `validation.tolerances.{name}`: unknown tolerance"
                ))
            })?;
        }
        let suites = v
            .suites
            .unwrap_or_else(|| Suite::ALL.iter().map(|s| s.name().to_string()).collect())
            .iter()
            .map(|s| {
                s.parse::<Suite>().map_err(|_| {
                    ConfigError(format!("invalid `validation.suites`: unknown suite `{s}`"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let out = self.output.clone().unwrap_or_default();
        Ok(RunConfig {
            channel,
            budget,
            metrics,
            gamma_th,
            sweep,
            sim,
            validation,
            suites,
            output: out.path,
            format: out.format.unwrap_or_default(),
        })
    }

    /// Draws a seed from the clock when none is configured and returns it.
    pub fn ensure_seed(&mut self) -> u64 {
        let sim = self.sim.get_or_insert_with(Default::default);
        *sim.seed.get_or_insert_with(fresh_seed)
    }
}

fn fresh_seed() -> u64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    let t = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(mc::DEFAULT_SEED);
    // Stay below 2^53 so the echoed value survives JSON readers that use doubles.
    (t ^ (t >> 29)) & ((1 << 53) - 1)
}

/// Fully resolved run model.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub channel: ChannelConfig,
    pub budget: Option<LinkBudget>,
    pub metrics: Vec<Metric>,
    /// Outage threshold, linear.
    pub gamma_th: f64,
    pub sweep: Option<SweepSpec>,
    pub sim: SimPlan,
    pub validation: ValidationConfig,
    pub suites: Vec<Suite>,
    pub output: Option<PathBuf>,
    pub format: Format,
}
