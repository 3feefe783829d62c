use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::report::{ComparisonReport, ReportHeader, ReportRow};
use crate::analytics::{
    self, avg_ber, avg_ber_quadrature, capacity_quadrature, cdf_eq, cdf_eq_quadrature,
    ergodic_capacity, CapacityBound, Metric, ModulationScheme,
};
use crate::channel::{db_to_linear, ChannelConfig, FsoLink, RfConfig, Turbulence};
use crate::error::{Error, Result};
use crate::mc::{self, IntensitySampler, SimPlan};
use crate::specfun::quad::integrate_gk;
use crate::specfun::{chi_row, meijer_g, ContourConfig, MeijerGSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Specfun,
    Distributions,
    ClosedForm,
    MonteCarlo,
    Qualitative,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Specfun,
        Suite::Distributions,
        Suite::ClosedForm,
        Suite::MonteCarlo,
        Suite::Qualitative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Distributions => "distributions",
            Suite::ClosedForm => "closed_form",
            Suite::MonteCarlo => "monte_carlo",
            Suite::Qualitative => "qualitative",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| {
                Error::invalid(
                    "suite",
                    format!("unknown suite `{s}`; expected specfun, distributions, closed_form, monte_carlo or qualitative"),
                )
            })
    }
}

/// Pass thresholds of every check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Elementary Meijer G identities, relative.
    pub identity: f64,
    /// Bessel reduction against its series, relative.
    pub bessel: f64,
    /// Moving the contour inside the strip, relative.
    pub contour: f64,
    /// CDF closed form against quadrature, absolute.
    pub cdf_abs: f64,
    /// BER closed form against quadrature, relative.
    pub ber_rel: f64,
    /// Capacity closed form against quadrature, relative.
    pub capacity_rel: f64,
    /// Largest accepted `|z|` for simulated comparisons.
    pub z: f64,
    /// Relative spread allowed across a floor.
    pub floor_flatness: f64,
    /// Relative spread across selection ranks when estimates are useless.
    pub selection_invariance: f64,
    /// Same, along a jitter sweep of the BER.
    pub jitter_invariance: f64,
    /// Minimum capacity gain per 10 dB when both hops improve, bit/s/Hz.
    pub no_floor_gain: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-9,
            bessel: 1e-8,
            contour: 1e-8,
            cdf_abs: 1e-5,
            ber_rel: 1e-5,
            capacity_rel: 5e-3,
            z: 3.0,
            floor_flatness: 1e-2,
            selection_invariance: 1e-6,
            jitter_invariance: 1e-8,
            no_floor_gain: 1.0,
        }
    }
}

impl Tolerances {
    pub fn entries(&self) -> Vec<(String, f64)> {
        [
            ("identity", self.identity),
            ("bessel", self.bessel),
            ("contour", self.contour),
            ("cdf_abs", self.cdf_abs),
            ("ber_rel", self.ber_rel),
            ("capacity_rel", self.capacity_rel),
            ("z", self.z),
            ("floor_flatness", self.floor_flatness),
            ("selection_invariance", self.selection_invariance),
            ("jitter_invariance", self.jitter_invariance),
            ("no_floor_gain", self.no_floor_gain),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    /// Sets a tolerance by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "identity" => &mut self.identity,
            "bessel" => &mut self.bessel,
            "contour" => &mut self.contour,
            "cdf_abs" => &mut self.cdf_abs,
            "ber_rel" => &mut self.ber_rel,
            "capacity_rel" => &mut self.capacity_rel,
            "z" => &mut self.z,
            "floor_flatness" => &mut self.floor_flatness,
            "selection_invariance" => &mut self.selection_invariance,
            "jitter_invariance" => &mut self.jitter_invariance,
            "no_floor_gain" => &mut self.no_floor_gain,
            other => {
                return Err(Error::invalid(
                    format!("validation.tolerances.{other}"),
                    "unknown tolerance",
                ))
            }
        };
        if !(value >= 0.0) {
            return Err(Error::invalid(
                format!("validation.tolerances.{name}"),
                "must be non-negative",
            ));
        }
        *slot = value;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    /// Base system; the suites vary SNRs, turbulence and selection around it.
    pub channel: ChannelConfig,
    /// Average SNRs of the comparison grid, dB, applied to both hops.
    pub grid_db: Vec<f64>,
    /// Simulated samples per grid point.
    pub samples: u64,
    /// Draws per histogram.
    pub histogram_samples: u64,
    pub bins: usize,
    pub seed: u64,
    pub streams: u32,
    pub tolerances: Tolerances,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            channel: ChannelConfig::reference(Turbulence::Weak),
            grid_db: vec![10.0, 20.0, 30.0],
            samples: 1_000_000,
            histogram_samples: 10_000_000,
            bins: 50,
            seed: mc::DEFAULT_SEED,
            streams: mc::DEFAULT_STREAMS,
            tolerances: Tolerances::default(),
        }
    }
}

impl ValidationConfig {
    fn at(&self, turbulence: Turbulence, mu1_db: f64, mu2_db: f64) -> ChannelConfig {
        let mut c = self.channel;
        c.fso.cn2 = turbulence.cn2();
        c.rf.mu = db_to_linear(mu1_db);
        c.fso.mu = db_to_linear(mu2_db);
        c
    }

    fn grid(&self) -> Vec<(Turbulence, f64, f64)> {
        let mut g = Vec::new();
        for t in Turbulence::ALL {
            for &m1 in &self.grid_db {
                for &m2 in &self.grid_db {
                    g.push((t, m1, m2));
                }
            }
        }
        g
    }

    fn header(&self, suites: &[Suite]) -> ReportHeader {
        ReportHeader {
            seed: self.seed,
            samples: self.samples,
            streams: self.streams,
            z_threshold: self.tolerances.z,
            tolerances: self.tolerances.entries(),
            suites: suites.iter().map(|s| s.name().to_string()).collect(),
        }
    }
}

fn case(t: Turbulence, mu1: f64, mu2: f64) -> String {
    format!("{} mu1={mu1}dB mu2={mu2}dB", t.name())
}

/// Runs `f`, turning an error into a failing row.
fn row_or_fail(
    suite: Suite,
    case: &str,
    x: f64,
    metric: &str,
    f: impl FnOnce() -> Result<ReportRow>,
) -> ReportRow {
    f().unwrap_or_else(|e| {
        log::error!("{suite} {case} {metric}: {e}");
        ReportRow::failed(suite.name(), case, x, metric, &e)
    })
}

// ---------------------------------------------------------------- specfun

/// `K_0(x)` from its power series, independent of the contour integral.
fn bessel_k0_series(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    let q = 0.25 * x * x;
    let lead = -((0.5 * x).ln() + EULER);
    let (mut term, mut harmonic, mut sum) = (1.0, 0.0, lead);
    for k in 1..100 {
        let k = f64::from(k);
        term *= q / (k * k);
        harmonic += 1.0 / k;
        sum += term * (lead + harmonic);
        if term < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn specfun_rows(cfg: &ValidationConfig) -> Vec<ReportRow> {
    const S: &str = "specfun";
    let tol = &cfg.tolerances;
    let g = |m, n, a: &[f64], b: &[f64], z| {
        MeijerGSpec::new(m, n, a.to_vec(), b.to_vec(), z).and_then(|s| meijer_g(&s, None))
    };
    let mut rows = Vec::new();
    for z in [0.01, 0.1, 1.0, 10.0, 100.0] {
        rows.push(row_or_fail(
            Suite::Specfun,
            "exp identity",
            z,
            "G10_01",
            || {
                Ok(ReportRow::relative(
                    S,
                    "exp identity",
                    z,
                    "G10_01",
                    g(1, 0, &[], &[0.0], z)?,
                    (-z).exp(),
                    tol.identity,
                ))
            },
        ));
        rows.push(row_or_fail(
            Suite::Specfun,
            "rational identity",
            z,
            "G11_11",
            || {
                Ok(ReportRow::relative(
                    S,
                    "rational identity",
                    z,
                    "G11_11",
                    g(1, 1, &[0.0], &[0.0], z)?,
                    1.0 / (1.0 + z),
                    tol.identity,
                ))
            },
        ));
    }
    for z in [0.05, 0.5, 1.0, 2.0, 6.0] {
        rows.push(row_or_fail(
            Suite::Specfun,
            "bessel reduction",
            z,
            "G20_02",
            || {
                Ok(ReportRow::relative(
                    S,
                    "bessel reduction",
                    z,
                    "G20_02",
                    g(2, 0, &[], &[0.0, 0.0], z)?,
                    2.0 * bessel_k0_series(2.0 * z.sqrt()),
                    tol.bessel,
                ))
            },
        ));
    }

    // a turbulence kernel evaluated on several contours
    let link = cfg.channel.link();
    let contour_rows = link.and_then(|link| {
        let p = &link.params;
        let psi2 = p.pointing_ratio_sq();
        let chi = chi_row(psi2, p.large_scale, p.small_scale);
        let spec = MeijerGSpec::new(6, 0, vec![0.5 * (psi2 + 2.0)], chi.to_vec(), 0.7)?;
        let auto = meijer_g(&spec, None)?;
        Ok([-0.05, -0.5, -1.5, -3.0]
            .into_iter()
            .map(|c| {
                row_or_fail(Suite::Specfun, "contour invariance", c, "G60_16", || {
                    let cc = ContourConfig::at_abscissa(&spec, c, 1e-10)?;
                    Ok(ReportRow::relative(
                        S,
                        "contour invariance",
                        c,
                        "G60_16",
                        meijer_g(&spec, Some(&cc))?,
                        auto,
                        tol.contour,
                    ))
                })
            })
            .collect::<Vec<_>>())
    });
    match contour_rows {
        Ok(r) => rows.extend(r),
        Err(e) => rows.push(ReportRow::failed(
            S,
            "contour invariance",
            f64::NAN,
            "G60_16",
            &e,
        )),
    }

    // bivariate kernel through the capacity, against quadrature of the CCDF
    let points = [
        (10.0, 10.0),
        (20.0, 20.0),
        (30.0, 30.0),
        (10.0, 30.0),
        (30.0, 10.0),
    ];
    let t = Turbulence::ALL
        .into_iter()
        .find(|t| t.cn2() == cfg.channel.fso.cn2)
        .unwrap_or(Turbulence::Weak);
    rows.par_extend(points.into_par_iter().map(|(m1, m2)| {
        let c = cfg.at(t, m1, m2);
        let name = format!("bivariate kernel {}", case(t, m1, m2));
        row_or_fail(Suite::Specfun, &name, m1, "capacity", || {
            let link = c.link()?;
            let closed = ergodic_capacity(&c.rf, &link, 1.0)?;
            let q = capacity_quadrature(&c.rf, &link, 1.0, CapacityBound::Intensity)?;
            Ok(ReportRow::relative(
                S,
                &name,
                m1,
                "capacity",
                closed,
                q.value,
                tol.capacity_rel,
            ))
        })
    }));
    rows
}

/// Identity, Bessel, contour and bivariate-kernel checks at default settings.
pub fn verify_special_functions() -> ComparisonReport {
    run_suite(Suite::Specfun, &ValidationConfig::default())
}

// ---------------------------------------------------------- distributions

/// `integral f` over `[a, b]`, keeping the first evaluation error.
fn integrate_density(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    let failure: Cell<Option<Error>> = Cell::new(None);
    let q = integrate_gk(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        &[a, b],
        1e-15,
        1e-10,
        200,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(q.value),
    }
}

/// Largest per-bin `|z|` of observed counts against bin probabilities, with its bin.
fn worst_bin(counts: &[u64], probs: &[f64], n: u64) -> (f64, usize) {
    let n = n as f64;
    counts
        .iter()
        .zip(probs)
        .enumerate()
        .map(|(k, (&c, &p))| {
            let z = (c as f64 - n * p) / (n * p * (1.0 - p)).sqrt();
            (z.abs(), k)
        })
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a })
}

/// Bins `x` on edges `lo * r^k`; `None` outside.
fn log_bin(x: f64, lo: f64, log_ratio: f64, bins: usize) -> Option<usize> {
    let k = (x / lo).ln() / log_ratio;
    (k >= 0.0 && k < bins as f64).then_some(k as usize)
}

fn histogram<F>(cfg: &ValidationConfig, salt: u64, bin_of: F) -> Vec<u64>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Option<usize> + Sync,
{
    let parts = mc::map_streams(
        cfg.seed ^ salt,
        cfg.streams,
        cfg.histogram_samples,
        |rng, count| {
            let mut h = vec![0u64; cfg.bins];
            for _ in 0..count {
                if let Some(k) = bin_of(rng) {
                    h[k] += 1;
                }
            }
            h
        },
    );
    let mut total = vec![0u64; cfg.bins];
    for p in parts {
        for (t, c) in total.iter_mut().zip(p) {
            *t += c;
        }
    }
    total
}

/// Point where an increasing `f` crosses `target`, by bisection in `ln x`.
fn crossing(f: impl Fn(f64) -> Result<f64>, target: f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m.exp())? < target {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// Central mass kept inside the histogram range.
const TAIL_MASS: f64 = 1e-3;

fn rf_histogram_row(cfg: &ValidationConfig, rf: RfConfig, salt: u64) -> Result<ReportRow> {
    let terms = rf.terms();
    let hi = crossing(
        |x| Ok(terms.cdf(x)),
        1.0 - TAIL_MASS,
        rf.mu * 1e-6,
        rf.mu * 1e3,
    )?;
    let width = hi / cfg.bins as f64;
    let probs = (0..cfg.bins)
        .map(|k| {
            let a = k as f64 * width;
            integrate_density(|x| Ok(terms.pdf(x)), a, a + width)
        })
        .collect::<Result<Vec<f64>>>()?;
    let counts = histogram(cfg, salt, |rng| {
        let x = mc::sample_rf_selected(&rf, rng);
        let k = (x / width) as usize;
        (k < cfg.bins).then_some(k)
    });
    let (z, k) = worst_bin(&counts, &probs, cfg.histogram_samples);
    let name = format!("rf M={} l={} rho={}", rf.relays, rf.order, rf.rho);
    Ok(ReportRow::holds(
        "distributions",
        name,
        "selected-relay snr pdf",
        z,
        cfg.tolerances.z,
        format!(
            "worst of {} linear bins on [0, {hi:.4e}] is bin {k}; {} draws",
            cfg.bins, cfg.histogram_samples
        ),
    ))
}

fn fso_histogram_rows(cfg: &ValidationConfig, t: Turbulence, salt: u64) -> Result<[ReportRow; 2]> {
    let mut c = cfg.channel;
    c.fso.cn2 = t.cn2();
    let link = c.link()?;
    let p = link.params;
    let mean = p.pointing_mean * p.collected_fraction;
    let to_intensity = |g: f64| mean * (g / link.mu).sqrt();
    let g_lo = crossing(
        |g| link.snr_cdf(g),
        TAIL_MASS,
        link.mu * 1e-16,
        link.mu * 1e6,
    )?;
    let g_hi = crossing(
        |g| link.snr_cdf(g),
        1.0 - TAIL_MASS,
        link.mu * 1e-16,
        link.mu * 1e6,
    )?;
    let (lo, hi) = (to_intensity(g_lo), to_intensity(g_hi));
    let log_ratio = (hi / lo).ln() / cfg.bins as f64;
    let edge = |k: usize| lo * (log_ratio * k as f64).exp();
    let intensity_probs = (0..cfg.bins)
        .map(|k| {
            integrate_density(
                |i| crate::channel::fso_intensity_pdf(i, &p),
                edge(k),
                edge(k + 1),
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    let snr = |i: f64| link.snr_from_intensity(i);
    let snr_probs = (0..cfg.bins)
        .map(|k| integrate_density(|g| link.snr_pdf(g), snr(edge(k)), snr(edge(k + 1))))
        .collect::<Result<Vec<f64>>>()?;
    let sampler = IntensitySampler::new(&p)?;
    let counts = histogram(cfg, salt, |rng| {
        log_bin(sampler.sample(rng), lo, log_ratio, cfg.bins)
    });
    let n = cfg.histogram_samples;
    let note = |k: usize| {
        format!(
            "worst of {} log bins on [{lo:.4e}, {hi:.4e}] is bin {k}; {n} draws",
            cfg.bins
        )
    };
    let (zi, ki) = worst_bin(&counts, &intensity_probs, n);
    let (zs, ks) = worst_bin(&counts, &snr_probs, n);
    Ok([
        ReportRow::holds(
            "distributions",
            t.name(),
            "intensity pdf",
            zi,
            cfg.tolerances.z,
            note(ki),
        ),
        ReportRow::holds(
            "distributions",
            t.name(),
            "fso snr pdf",
            zs,
            cfg.tolerances.z,
            note(ks),
        ),
    ])
}

fn distribution_rows(cfg: &ValidationConfig) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let mu = cfg.channel.rf.mu;
    for (i, (m, l, rho)) in [(2, 2, 0.72), (4, 1, 0.5), (4, 4, 0.5)]
        .into_iter()
        .enumerate()
    {
        let name = format!("rf M={m} l={l} rho={rho}");
        rows.push(row_or_fail(
            Suite::Distributions,
            &name,
            f64::NAN,
            "pdf",
            || rf_histogram_row(cfg, RfConfig::new(m, l, rho, mu)?, 0x100 + i as u64),
        ));
    }
    for (i, t) in Turbulence::ALL.into_iter().enumerate() {
        match fso_histogram_rows(cfg, t, 0x200 + i as u64) {
            Ok(r) => rows.extend(r),
            Err(e) => rows.push(ReportRow::failed(
                "distributions",
                t.name(),
                f64::NAN,
                "intensity pdf",
                &e,
            )),
        }
    }
    rows
}

// ------------------------------------------------------------ closed form

fn closed_form_rows(cfg: &ValidationConfig) -> Vec<ReportRow> {
    const S: &str = "closed_form";
    let tol = cfg.tolerances;
    cfg.grid()
        .into_par_iter()
        .map(|(t, m1, m2)| {
            let c = cfg.at(t, m1, m2);
            let name = case(t, m1, m2);
            let link = match c.link() {
                Ok(l) => l,
                Err(e) => return vec![ReportRow::failed(S, name, m1, "all", &e)],
            };
            let rf = c.rf;
            let mut rows = vec![row_or_fail(Suite::ClosedForm, &name, m1, "cdf", || {
                let q = cdf_eq_quadrature(1.0, &rf, &link)?;
                Ok(ReportRow::absolute(
                    S,
                    &name,
                    m1,
                    "cdf",
                    cdf_eq(1.0, &rf, &link)?,
                    q.value,
                    tol.cdf_abs,
                ))
            })];
            for scheme in ModulationScheme::ALL {
                let metric = Metric::Ber(scheme).name();
                rows.push(row_or_fail(Suite::ClosedForm, &name, m1, &metric, || {
                    let q = avg_ber_quadrature(scheme, &rf, &link)?;
                    Ok(ReportRow::relative(
                        S,
                        &name,
                        m1,
                        &metric,
                        avg_ber(scheme, &rf, &link)?,
                        q.value,
                        tol.ber_rel,
                    ))
                }));
            }
            rows.push(row_or_fail(
                Suite::ClosedForm,
                &name,
                m1,
                "capacity",
                || {
                    let q = capacity_quadrature(&rf, &link, 1.0, CapacityBound::Intensity)?;
                    Ok(ReportRow::relative(
                        S,
                        &name,
                        m1,
                        "capacity",
                        ergodic_capacity(&rf, &link, 1.0)?,
                        q.value,
                        tol.capacity_rel,
                    ))
                },
            ));
            rows
        })
        .collect::<Vec<_>>()
        .concat()
}

// ------------------------------------------------------------ monte carlo

fn monte_carlo_rows(cfg: &ValidationConfig) -> Vec<ReportRow> {
    const S: &str = "monte_carlo";
    let metrics = vec![
        Metric::Cdf,
        Metric::Ber(ModulationScheme::Bpsk),
        Metric::Capacity,
    ];
    let plan = SimPlan::new(cfg.samples, cfg.seed, metrics.clone())
        .with_streams(cfg.streams)
        .with_threshold(1.0);
    cfg.grid()
        .into_iter()
        .flat_map(|(t, m1, m2)| {
            let c = cfg.at(t, m1, m2);
            let name = case(t, m1, m2);
            let run = c
                .link()
                .and_then(|link| Ok((link, mc::estimate(&plan, &c.rf, &link)?)));
            match run {
                Err(e) => vec![ReportRow::failed(S, name, m1, "all", &e)],
                Ok((link, report)) => metrics
                    .par_iter()
                    .map(|&m| {
                        row_or_fail(Suite::MonteCarlo, &name, m1, &m.name(), || {
                            let a = analytics::evaluate(m, 1.0, &c.rf, &link)?;
                            let e = *report.get(m).expect("metric in plan");
                            Ok(ReportRow::z(S, &name, m1, m.name(), a, e, cfg.tolerances.z))
                        })
                    })
                    .collect(),
            }
        })
        .collect()
}

// ------------------------------------------------------------ qualitative

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    (max - min) / min.abs()
}

/// Number of adjacent pairs that break strict monotonicity in the given direction.
fn violations(values: &[f64], increasing: bool) -> f64 {
    values
        .windows(2)
        .filter(|w| {
            if increasing {
                w[1] <= w[0]
            } else {
                w[1] >= w[0]
            }
        })
        .count() as f64
}

/// `E[log2(1 + s g)]` over the RF hop alone, by quadrature of its density.
fn rf_only_capacity(rf: &RfConfig, bound: CapacityBound) -> Result<f64> {
    let terms = rf.terms();
    let s = bound.snr_factor();
    let hi = 40.0 / terms.slowest_rate();
    let mut breaks = vec![0.0];
    breaks.extend((-3..=2).map(|k| rf.mu * 10f64.powi(k)).filter(|&x| x < hi));
    breaks.push(hi);
    let q = integrate_gk(
        |g| (s * g).ln_1p() * terms.pdf(g),
        &breaks,
        1e-15,
        1e-12,
        1000,
    )?;
    Ok(q.value / std::f64::consts::LN_2)
}

fn fmt_values(values: &[f64]) -> String {
    let v: Vec<String> = values.iter().map(|v| format!("{v:.6e}")).collect();
    v.join(" ")
}

struct Qualitative<'a> {
    cfg: &'a ValidationConfig,
}

impl Qualitative<'_> {
    const S: &'static str = "qualitative";

    fn eval(&self, c: &ChannelConfig, metric: Metric) -> Result<f64> {
        let link: FsoLink = c.link()?;
        analytics::evaluate(metric, 1.0, &c.rf, &link)
    }

    fn series(&self, configs: &[ChannelConfig], metric: Metric) -> Result<Vec<f64>> {
        configs.par_iter().map(|c| self.eval(c, metric)).collect()
    }

    fn ber_floor(&self) -> Vec<ReportRow> {
        let tol = self.cfg.tolerances;
        let ber = Metric::Ber(ModulationScheme::Bpsk);
        let mu1 = [60.0, 65.0, 70.0, 75.0, 80.0];
        let mut floors = Vec::new();
        let mut rows = Vec::new();
        for t in Turbulence::ALL {
            let configs: Vec<_> = mu1.iter().map(|&m| self.cfg.at(t, m, 30.0)).collect();
            let name = format!("ber floor {} mu2=30dB mu1=60..80dB", t.name());
            rows.push(row_or_fail(
                Suite::Qualitative,
                &name,
                f64::NAN,
                &ber.name(),
                || {
                    let v = self.series(&configs, ber)?;
                    floors.push((t, v[v.len() - 1]));
                    Ok(ReportRow::holds(
                        Self::S,
                        &name,
                        ber.name(),
                        spread(&v),
                        tol.floor_flatness,
                        format!("relative spread of {}", fmt_values(&v)),
                    ))
                },
            ));
        }
        if floors.len() == 3 {
            let v: Vec<f64> = floors.iter().map(|f| f.1).collect();
            rows.push(ReportRow::holds(
                Self::S,
                "ber floor ordered weak < moderate < strong",
                ber.name(),
                violations(&v, true),
                0.0,
                format!("floors at mu1=80dB: {}", fmt_values(&v)),
            ));
        }
        rows
    }

    fn selection_invariance(&self) -> Vec<ReportRow> {
        let tol = self.cfg.tolerances;
        let mut base = self.cfg.channel;
        base.rf.relays = 4;
        base.rf.rho = 0.0;
        let ranks: Vec<ChannelConfig> = (1..=4)
            .map(|l| {
                let mut c = base;
                c.rf.order = l;
                c
            })
            .collect();
        let mut rows = Vec::new();
        for metric in [Metric::Ber(ModulationScheme::Bpsk), Metric::Capacity] {
            let name = "rho=0 M=4 rank l=1..4";
            rows.push(row_or_fail(
                Suite::Qualitative,
                name,
                f64::NAN,
                &metric.name(),
                || {
                    let v = self.series(&ranks, metric)?;
                    Ok(ReportRow::holds(
                        Self::S,
                        name,
                        metric.name(),
                        spread(&v),
                        tol.selection_invariance,
                        format!("relative spread of {}", fmt_values(&v)),
                    ))
                },
            ));
        }
        // BER against jitter: worst and best rank coincide
        let ber = Metric::Ber(ModulationScheme::Bpsk);
        for sigma in [0.05, 0.1, 0.2, 0.3] {
            let name = format!("rho=0 M=4 l=1 vs l=4 sigma_s={sigma}m");
            rows.push(row_or_fail(
                Suite::Qualitative,
                &name,
                sigma,
                &ber.name(),
                || {
                    let mut lo = ranks[0];
                    let mut hi = ranks[3];
                    lo.fso.jitter_std = sigma;
                    hi.fso.jitter_std = sigma;
                    let v = self.series(&[lo, hi], ber)?;
                    Ok(ReportRow::relative(
                        Self::S,
                        &name,
                        sigma,
                        ber.name(),
                        v[0],
                        v[1],
                        tol.jitter_invariance,
                    ))
                },
            ));
        }
        // capacity against the relay count with the best relay
        let name = "rho=0 capacity vs M=1..6 (l=M)";
        rows.push(row_or_fail(
            Suite::Qualitative,
            name,
            f64::NAN,
            "capacity",
            || {
                let configs: Vec<_> = (1..=6)
                    .map(|m| {
                        let mut c = base;
                        c.rf.relays = m;
                        c.rf.order = m;
                        c
                    })
                    .collect();
                let v = self.series(&configs, Metric::Capacity)?;
                Ok(ReportRow::holds(
                    Self::S,
                    name,
                    "capacity",
                    spread(&v),
                    tol.selection_invariance,
                    format!("relative spread of {}", fmt_values(&v)),
                ))
            },
        ));
        rows
    }

    fn correlation_trends(&self) -> Vec<ReportRow> {
        let rhos = [0.0, 0.25, 0.5, 0.72, 0.9, 1.0];
        let mut rows = Vec::new();
        for (l, better) in [(4, true), (1, false)] {
            let configs: Vec<ChannelConfig> = rhos
                .iter()
                .map(|&rho| {
                    let mut c = self.cfg.channel;
                    c.rf.relays = 4;
                    c.rf.order = l;
                    c.rf.rho = rho;
                    c
                })
                .collect();
            let verb = if better { "improves" } else { "degrades" };
            for (metric, rising) in [
                (Metric::Ber(ModulationScheme::Bpsk), !better),
                (Metric::Capacity, better),
            ] {
                let name = format!("M=4 l={l} {verb} with rho");
                rows.push(row_or_fail(
                    Suite::Qualitative,
                    &name,
                    f64::NAN,
                    &metric.name(),
                    || {
                        let v = self.series(&configs, metric)?;
                        Ok(ReportRow::holds(
                            Self::S,
                            &name,
                            metric.name(),
                            violations(&v, rising),
                            0.0,
                            format!("rho = 0..1: {}", fmt_values(&v)),
                        ))
                    },
                ));
            }
        }
        rows
    }

    fn capacity_floor(&self) -> Vec<ReportRow> {
        let tol = self.cfg.tolerances;
        let t = Turbulence::Weak;
        let mut rows = Vec::new();
        for regime in Turbulence::ALL {
            let name = format!("capacity floor {} mu1=20dB mu2=60 vs 80dB", regime.name());
            rows.push(row_or_fail(
                Suite::Qualitative,
                &name,
                f64::NAN,
                "capacity",
                || {
                    let configs = [
                        self.cfg.at(regime, 20.0, 60.0),
                        self.cfg.at(regime, 20.0, 80.0),
                    ];
                    let v = self.series(&configs, Metric::Capacity)?;
                    Ok(ReportRow::holds(
                        Self::S,
                        &name,
                        "capacity",
                        ((v[1] - v[0]) / v[1]).abs(),
                        tol.floor_flatness,
                        format!("60/80 dB: {}", fmt_values(&v)),
                    ))
                },
            ));
        }
        // with the RF hop fixed the capacity saturates at the RF-only value
        let name = "capacity floor mu1=20dB mu2=80dB vs RF-only limit";
        rows.push(row_or_fail(
            Suite::Qualitative,
            name,
            f64::NAN,
            "capacity",
            || {
                let configs: Vec<_> = [60.0, 70.0, 80.0]
                    .iter()
                    .map(|&m2| self.cfg.at(t, 20.0, m2))
                    .collect();
                let mut v = self.series(&configs, Metric::Capacity)?;
                let limit = rf_only_capacity(&configs[0].rf, CapacityBound::Intensity)?;
                let last = v[v.len() - 1];
                v.push(limit);
                Ok(ReportRow::holds(
                    Self::S,
                    name,
                    "capacity",
                    ((limit - last) / limit).abs(),
                    tol.floor_flatness,
                    format!(
                        "gap at 80 dB to the RF-only limit; 60/70/80 dB and limit: {}",
                        fmt_values(&v)
                    ),
                ))
            },
        ));
        let name = "capacity rises towards the RF-only limit";
        rows.push(row_or_fail(
            Suite::Qualitative,
            name,
            f64::NAN,
            "capacity",
            || {
                let configs: Vec<_> = [40.0, 50.0, 60.0, 70.0, 80.0]
                    .iter()
                    .map(|&m2| self.cfg.at(t, 20.0, m2))
                    .collect();
                let mut v = self.series(&configs, Metric::Capacity)?;
                v.push(rf_only_capacity(&configs[0].rf, CapacityBound::Intensity)?);
                Ok(ReportRow::holds(
                    Self::S,
                    name,
                    "capacity",
                    violations(&v, true),
                    0.0,
                    format!("mu2 = 40..80 dB then limit: {}", fmt_values(&v)),
                ))
            },
        ));
        let name = "no capacity floor mu1=mu2=20..80dB";
        rows.push(row_or_fail(
            Suite::Qualitative,
            name,
            f64::NAN,
            "capacity",
            || {
                let configs: Vec<_> = [20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0]
                    .iter()
                    .map(|&m| self.cfg.at(t, m, m))
                    .collect();
                let v = self.series(&configs, Metric::Capacity)?;
                let short = v
                    .windows(2)
                    .filter(|w| w[1] - w[0] < tol.no_floor_gain)
                    .count() as f64;
                Ok(ReportRow::holds(
                    Self::S,
                    name,
                    "capacity",
                    short,
                    0.0,
                    format!(
                        "steps below {} bit/s/Hz per 10 dB among {}",
                        tol.no_floor_gain,
                        fmt_values(&v)
                    ),
                ))
            },
        ));
        rows
    }

    fn geometry(&self) -> Vec<ReportRow> {
        let mut rows = Vec::new();
        let base = self.cfg.channel;
        let name = "capacity falls with link length 2000m vs 6000m";
        rows.push(row_or_fail(
            Suite::Qualitative,
            name,
            f64::NAN,
            "capacity",
            || {
                let configs: Vec<_> = [2000.0, 6000.0]
                    .iter()
                    .map(|&d| {
                        let mut c = base;
                        c.fso.length = d;
                        c
                    })
                    .collect();
                let v = self.series(&configs, Metric::Capacity)?;
                Ok(ReportRow::holds(
                    Self::S,
                    name,
                    "capacity",
                    violations(&v, false),
                    0.0,
                    fmt_values(&v),
                ))
            },
        ));
        let name = "capacity falls with normalised jitter sigma_s/a = 0.5..2";
        rows.push(row_or_fail(
            Suite::Qualitative,
            name,
            f64::NAN,
            "capacity",
            || {
                let configs: Vec<_> = [0.5, 1.0, 1.5, 2.0]
                    .iter()
                    .map(|&r| {
                        let mut c = base;
                        c.fso.jitter_std = r * c.fso.aperture_radius;
                        c
                    })
                    .collect();
                let v = self.series(&configs, Metric::Capacity)?;
                Ok(ReportRow::holds(
                    Self::S,
                    name,
                    "capacity",
                    violations(&v, false),
                    0.0,
                    fmt_values(&v),
                ))
            },
        ));
        rows
    }
}

fn qualitative_rows(cfg: &ValidationConfig) -> Vec<ReportRow> {
    let q = Qualitative { cfg };
    let mut rows = q.ber_floor();
    rows.extend(q.selection_invariance());
    rows.extend(q.correlation_trends());
    rows.extend(q.capacity_floor());
    rows.extend(q.geometry());
    rows
}

pub fn run_suite(suite: Suite, cfg: &ValidationConfig) -> ComparisonReport {
    log::info!("running suite {suite}");
    let rows = match suite {
        Suite::Specfun => specfun_rows(cfg),
        Suite::Distributions => distribution_rows(cfg),
        Suite::ClosedForm => closed_form_rows(cfg),
        Suite::MonteCarlo => monte_carlo_rows(cfg),
        Suite::Qualitative => qualitative_rows(cfg),
    };
    ComparisonReport::new(cfg.header(&[suite]), rows)
}

pub fn run_suites(suites: &[Suite], cfg: &ValidationConfig) -> ComparisonReport {
    let mut report = ComparisonReport::new(cfg.header(&[]), Vec::new());
    for &s in suites {
        report.extend(run_suite(s, cfg));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_oracle_matches_known_k0() {
        // K_0(1) and K_0(2) to 16 digits
        assert!((bessel_k0_series(1.0) - 0.421_024_438_240_708_3).abs() < 1e-15);
        assert!((bessel_k0_series(2.0) - 0.113_893_872_749_533_4).abs() < 1e-15);
    }

    #[test]
    fn monotonicity_counts() {
        assert_eq!(violations(&[1.0, 2.0, 3.0], true), 0.0);
        assert_eq!(violations(&[1.0, 2.0, 2.0, 1.0], true), 2.0);
        assert_eq!(violations(&[3.0, 2.0, 1.0], false), 0.0);
        assert!((spread(&[1.0, 1.01, 0.99]) - 0.02 / 0.99).abs() < 1e-15);
    }

    #[test]
    fn special_function_suite_passes() {
        let r = verify_special_functions();
        assert!(r.passed(), "{:#?}", r.failures().collect::<Vec<_>>());
        let exp1 = r
            .rows
            .iter()
            .find(|r| r.case == "exp identity" && r.x == 1.0)
            .unwrap();
        assert!((exp1.analytic.unwrap() - (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn a_tolerance_of_1e_15_fails_rows() {
        let mut cfg = ValidationConfig::default();
        cfg.tolerances.set("capacity_rel", 1e-15).unwrap();
        let r = run_suite(Suite::Specfun, &cfg);
        assert!(!r.passed());
        assert!(r.failures().all(|row| row.metric == "capacity"));
        assert!(cfg.tolerances.set("nope", 1.0).is_err());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("closed-form".parse::<Suite>().unwrap(), Suite::ClosedForm);
    }
}
