//! Monte Carlo simulation of the full link.
//!
//! Each sample draws the outdated estimates of all relays, picks the `l`-th
//! weakest, mixes in the innovation to get the actual RF channel, draws a
//! turbulence and pointing intensity for the optical hop, and combines both
//! with the fixed relay gain. Error rates use the conditional error
//! probability at the drawn SNR rather than simulated bits.
//!
//! Work is split into `streams` independent ChaCha8 streams keyed by
//! `(seed, stream index)`. Streams are reduced in index order, so the result
//! does not depend on how many threads ran them.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{CapacityBound, Metric};
use crate::channel::{gamma_eq, re_constant, DerivedFsoParams, FsoLink, RfConfig, MAX_RELAYS};
use crate::error::{Error, Result};
use crate::sum::Neumaier;

/// Below this many samples confidence intervals are flagged as unreliable.
pub const MIN_SAMPLES: u64 = 10_000;
pub const DEFAULT_STREAMS: u32 = 64;
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimPlan {
    pub samples: u64,
    pub seed: u64,
    pub streams: u32,
    #[serde(serialize_with = "metric_names")]
    pub metrics: Vec<Metric>,
    /// Outage threshold for [`Metric::Cdf`], linear.
    pub gamma_th: f64,
    #[serde(skip)]
    pub bound: CapacityBound,
}

fn metric_names<S: serde::Serializer>(m: &[Metric], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|m| m.name()))
}

impl SimPlan {
    pub fn new(samples: u64, seed: u64, metrics: Vec<Metric>) -> Self {
        SimPlan {
            samples,
            seed,
            streams: DEFAULT_STREAMS,
            metrics,
            gamma_th: 1.0,
            bound: CapacityBound::Intensity,
        }
    }

    pub fn with_streams(mut self, streams: u32) -> Self {
        self.streams = streams;
        self
    }

    pub fn with_threshold(mut self, gamma_th: f64) -> Self {
        self.gamma_th = gamma_th;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::invalid("sim.samples", "need at least two samples"));
        }
        if self.streams == 0 {
            return Err(Error::invalid("sim.streams", "need at least one stream"));
        }
        if self.metrics.is_empty() {
            return Err(Error::invalid("sim.metrics", "no estimator requested"));
        }
        if self.metrics.contains(&Metric::Cdf) && !(self.gamma_th > 0.0) {
            return Err(Error::invalid("gamma_th", "threshold must be positive"));
        }
        Ok(())
    }

    /// Samples assigned to stream `k`; the remainder goes to the first streams.
    pub fn stream_samples(&self, k: u32) -> u64 {
        split(self.samples, self.streams, k)
    }
}

fn split(samples: u64, streams: u32, k: u32) -> u64 {
    let s = u64::from(streams);
    samples / s + u64::from(u64::from(k) < samples % s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub std_err: f64,
    pub n: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `(x - mean) / std_err`, or zero when both agree exactly.
    pub fn z_score(&self, x: f64) -> f64 {
        let d = x - self.mean;
        if d == 0.0 {
            0.0
        } else {
            d / self.std_err
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub estimates: Vec<(Metric, McEstimate)>,
    /// Non-fatal problems such as [`Error::InsufficientSamples`].
    pub warnings: Vec<Error>,
}

impl McReport {
    pub fn get(&self, metric: Metric) -> Option<&McEstimate> {
        self.estimates
            .iter()
            .find(|(m, _)| *m == metric)
            .map(|(_, e)| e)
    }
}

/// Stream `k` of the generator family keyed by `seed`.
pub fn stream_rng(seed: u64, k: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(k));
    rng
}

/// Runs `work(rng, count)` on every stream and returns the results in stream order.
pub fn map_streams<T, F>(seed: u64, streams: u32, samples: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    (0..streams)
        .into_par_iter()
        .map(|k| work(&mut stream_rng(seed, k), split(samples, streams, k)))
        .collect()
}

/// Runs `f` inside a dedicated pool of `threads` workers.
pub fn with_threads<T, F>(threads: usize, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    Ok(pool.install(f))
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    (
        re * std::f64::consts::FRAC_1_SQRT_2,
        im * std::f64::consts::FRAC_1_SQRT_2,
    )
}

/// Outdated and actual unit-mean power gains of the selected relay.
pub fn sample_rf_pair<R: Rng + ?Sized>(rf: &RfConfig, rng: &mut R) -> (f64, f64) {
    let m = rf.relays as usize;
    debug_assert!(m <= MAX_RELAYS as usize);
    let mut amp = [(0.0, 0.0); MAX_RELAYS as usize];
    let mut power = [0.0; MAX_RELAYS as usize];
    for (a, p) in amp.iter_mut().zip(power.iter_mut()).take(m) {
        *a = complex_normal(rng);
        *p = a.0 * a.0 + a.1 * a.1;
    }
    let mut ranked = power;
    let (_, &mut target, _) =
        ranked[..m].select_nth_unstable_by(rf.order as usize - 1, f64::total_cmp);
    let pick = power[..m].iter().position(|&p| p == target).unwrap_or(0);
    let (er, ei) = amp[pick];
    let (wr, wi) = complex_normal(rng);
    let (a, b) = (rf.rho.sqrt(), (1.0 - rf.rho).sqrt());
    let (hr, hi) = (a * er + b * wr, a * ei + b * wi);
    (target, hr * hr + hi * hi)
}

/// One draw of the RF-hop SNR of the selected relay.
pub fn sample_rf_selected<R: Rng + ?Sized>(rf: &RfConfig, rng: &mut R) -> f64 {
    rf.mu * sample_rf_pair(rf, rng).1
}

/// Turbulence and pointing draws for one set of derived parameters.
#[derive(Debug, Clone, Copy)]
pub struct IntensitySampler {
    large: Gamma<f64>,
    small: Gamma<f64>,
    collected: f64,
    /// `1 / psi^2`; the pointing loss is `exp(-E / psi^2)` with `E ~ Exp(1)`.
    spread: f64,
}

impl IntensitySampler {
    pub fn new(p: &DerivedFsoParams) -> Result<Self> {
        let gamma = |shape: f64, field: &'static str| {
            Gamma::new(shape, 1.0 / shape).map_err(|e| Error::invalid(field, e.to_string()))
        };
        Ok(IntensitySampler {
            large: gamma(p.large_scale, "alpha")?,
            small: gamma(p.small_scale, "beta")?,
            collected: p.collected_fraction,
            spread: 1.0 / p.pointing_ratio_sq(),
        })
    }

    /// Unit-mean turbulence gain `X Y`.
    pub fn turbulence<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.large.sample(rng) * self.small.sample(rng)
    }

    /// Pointing gain `A0 exp(-2 r^2 / w^2)` with Rayleigh displacement `r`.
    pub fn pointing<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = rng.sample(Exp1);
        self.collected * (-e * self.spread).exp()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.turbulence(rng) * self.pointing(rng)
    }
}

/// One draw of the received optical intensity.
pub fn sample_fso_intensity<R: Rng + ?Sized>(params: &DerivedFsoParams, rng: &mut R) -> f64 {
    match IntensitySampler::new(params) {
        Ok(s) => s.sample(rng),
        Err(_) => f64::NAN,
    }
}

/// Draws end-to-end SNR samples.
#[derive(Debug, Clone, Copy)]
pub struct LinkSampler {
    pub rf: RfConfig,
    pub link: FsoLink,
    intensity: IntensitySampler,
    re: f64,
}

impl LinkSampler {
    pub fn new(rf: &RfConfig, link: &FsoLink) -> Result<Self> {
        rf.validate()?;
        Ok(LinkSampler {
            rf: *rf,
            link: *link,
            intensity: IntensitySampler::new(&link.params)?,
            re: re_constant(rf),
        })
    }

    pub fn rf_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_rf_selected(&self.rf, rng)
    }

    pub fn fso_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.link.snr_from_intensity(self.intensity.sample(rng))
    }

    pub fn intensity<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.intensity.sample(rng)
    }

    pub fn end_to_end<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g1 = self.rf_snr(rng);
        let g2 = self.fso_snr(rng);
        gamma_eq(g1, g2, self.re)
    }
}

fn functional(metric: Metric, plan: &SimPlan, g: f64) -> f64 {
    match metric {
        Metric::Cdf => f64::from(u8::from(g < plan.gamma_th)),
        Metric::Ber(m) => m.conditional_ber(g),
        Metric::Capacity => (plan.bound.snr_factor() * g).ln_1p() / std::f64::consts::LN_2,
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: Neumaier,
    squares: Neumaier,
    n: u64,
}

impl Moments {
    fn add(&mut self, x: f64) {
        self.sum.add(x);
        self.squares.add(x * x);
        self.n += 1;
    }

    fn merge(&mut self, o: &Moments) {
        self.sum.merge(&o.sum);
        self.squares.merge(&o.squares);
        self.n += o.n;
    }

    fn estimate(&self, seed: u64) -> McEstimate {
        let n = self.n as f64;
        let mean = self.sum.value() / n;
        let var = ((self.squares.value() - self.sum.value() * mean) / (n - 1.0)).max(0.0);
        McEstimate {
            mean,
            std_err: (var / n).sqrt(),
            n: self.n,
            seed,
        }
    }
}

/// Simulates the link and estimates every metric in the plan.
pub fn estimate(plan: &SimPlan, rf: &RfConfig, link: &FsoLink) -> Result<McReport> {
    plan.validate()?;
    let sampler = LinkSampler::new(rf, link)?;
    let mut warnings = Vec::new();
    if plan.samples < MIN_SAMPLES {
        log::warn!(
            "{} samples is below {MIN_SAMPLES}; standard errors are unreliable",
            plan.samples
        );
        warnings.push(Error::InsufficientSamples {
            requested: plan.samples,
            minimum: MIN_SAMPLES,
        });
    }
    let metrics = &plan.metrics;
    let per_stream = map_streams(plan.seed, plan.streams, plan.samples, |rng, count| {
        let mut acc = vec![Moments::default(); metrics.len()];
        for _ in 0..count {
            let g = sampler.end_to_end(rng);
            for (a, &m) in acc.iter_mut().zip(metrics) {
                a.add(functional(m, plan, g));
            }
        }
        acc
    });
    let mut total = vec![Moments::default(); metrics.len()];
    for stream in &per_stream {
        for (t, s) in total.iter_mut().zip(stream) {
            t.merge(s);
        }
    }
    Ok(McReport {
        estimates: metrics
            .iter()
            .zip(&total)
            .map(|(&m, t)| (m, t.estimate(plan.seed)))
            .collect(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::ModulationScheme;
    use crate::channel::{db_to_linear, derive_fso, FsoConfig};

    pub(crate) fn weak_link(mu2_db: f64) -> FsoLink {
        FsoLink::new(&FsoConfig::reference(6e-15, db_to_linear(mu2_db))).unwrap()
    }

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn perfect_estimates_pick_the_best_of_two() {
        let rf = RfConfig::new(2, 2, 1.0, 3.0).unwrap();
        let mut rng = stream_rng(1, 0);
        let xs: Vec<f64> = (0..200_000)
            .map(|_| sample_rf_selected(&rf, &mut rng))
            .collect();
        let (m, se) = mean_and_se(&xs);
        assert!((m - 4.5).abs() < 3.0 * se, "{m} +- {se}");
    }

    /// Kolmogorov-Smirnov distance against `Exp(mu)`.
    fn ks_exponential(xs: &mut [f64], mu: f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = -(-x / mu).exp_m1();
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn uninformative_selection_is_exponential() {
        let n = 1_000_000;
        // 99% critical value of the one-sample KS statistic
        let crit = 1.628 / (n as f64).sqrt();
        for (m, l, rho) in [(4, 1, 0.0), (4, 4, 0.0), (1, 1, 0.9)] {
            let rf = RfConfig::new(m, l, rho, 2.0).unwrap();
            let mut rng = stream_rng(7, m + l);
            let mut xs: Vec<f64> = (0..n).map(|_| sample_rf_selected(&rf, &mut rng)).collect();
            let d = ks_exponential(&mut xs, 2.0);
            assert!(d < crit, "M={m} l={l} rho={rho}: D={d}");
        }
    }

    fn correlation(s: &[f64; 5], n: f64) -> f64 {
        let (mx, my) = (s[0] / n, s[1] / n);
        (s[4] / n - mx * my) / ((s[2] / n - mx * mx) * (s[3] / n - my * my)).sqrt()
    }

    #[test]
    fn power_correlation_matches_rho() {
        let (n, streams) = (10_000_000u64, 40u32);
        for rho in [0.25, 0.5, 0.72] {
            let rf = RfConfig::new(1, 1, rho, 1.0).unwrap();
            // one coefficient per stream; their spread gives the standard error
            let per_stream = map_streams(11, streams, n, |rng, count| {
                let mut s = [0.0f64; 5];
                for _ in 0..count {
                    let (x, y) = sample_rf_pair(&rf, rng);
                    s[0] += x;
                    s[1] += y;
                    s[2] += x * x;
                    s[3] += y * y;
                    s[4] += x * y;
                }
                correlation(&s, count as f64)
            });
            let (r, se) = mean_and_se(&per_stream);
            assert!((r - rho).abs() < 3.0 * se, "rho={rho}: r={r} se={se}");
        }
    }

    #[test]
    fn perfect_alignment_collects_a0() {
        let mut cfg = FsoConfig::reference(6e-15, 100.0);
        let p = derive_fso(&cfg).unwrap();
        cfg.jitter_std = p.equivalent_beam_radius * 1e-6;
        let p = derive_fso(&cfg).unwrap();
        let s = IntensitySampler::new(&p).unwrap();
        let mut rng = stream_rng(3, 0);
        for _ in 0..10_000 {
            assert!((s.pointing(&mut rng) - p.collected_fraction).abs() < 1e-9);
        }
    }

    #[test]
    fn turbulence_has_unit_mean() {
        let link = weak_link(20.0);
        let s = IntensitySampler::new(&link.params).unwrap();
        let parts = map_streams(5, 16, 10_000_000, |rng, count| {
            let mut m = Moments::default();
            for _ in 0..count {
                m.add(s.turbulence(rng));
            }
            m
        });
        let mut t = Moments::default();
        parts.iter().for_each(|p| t.merge(p));
        let e = t.estimate(5);
        assert!((e.mean - 1.0).abs() < 3.0 * e.std_err, "{e:?}");
    }

    #[test]
    fn threshold_far_above_mean_gives_certain_outage() {
        let rf = RfConfig::from_db(2, 2, 0.72, 20.0).unwrap();
        let plan = SimPlan::new(20_000, 1, vec![Metric::Cdf]).with_threshold(rf.mu * 1e6);
        let r = estimate(&plan, &rf, &weak_link(20.0)).unwrap();
        assert_eq!(r.get(Metric::Cdf).unwrap().mean, 1.0);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn strong_optical_hop_reduces_to_rf_only() {
        use crate::specfun::quad::integrate_gk;
        let rf = RfConfig::from_db(4, 2, 0.5, 10.0).unwrap();
        let link = weak_link(120.0);
        let scheme = ModulationScheme::Bpsk;
        let plan = SimPlan::new(2_000_000, 9, vec![Metric::Ber(scheme)]);
        let r = estimate(&plan, &rf, &link).unwrap();
        let e = r.get(Metric::Ber(scheme)).unwrap();
        let terms = rf.terms();
        let want = integrate_gk(
            |g| scheme.conditional_ber(g) * terms.pdf(g),
            &[0.0, 1.0, 10.0, 100.0, 1000.0],
            1e-15,
            1e-12,
            500,
        )
        .unwrap()
        .value;
        assert!(e.z_score(want).abs() < 3.0, "{want} vs {e:?}");
    }

    #[test]
    fn identical_plans_reproduce_bit_exactly_across_threads() {
        let rf = RfConfig::from_db(2, 2, 0.72, 20.0).unwrap();
        let link = weak_link(20.0);
        let plan = SimPlan::new(
            40_000,
            42,
            vec![
                Metric::Cdf,
                Metric::Ber(ModulationScheme::Bpsk),
                Metric::Capacity,
            ],
        )
        .with_streams(7);
        let one = with_threads(1, || estimate(&plan, &rf, &link))
            .unwrap()
            .unwrap();
        let four = with_threads(4, || estimate(&plan, &rf, &link))
            .unwrap()
            .unwrap();
        assert_eq!(one, four);
        let other = SimPlan {
            seed: 43,
            ..plan.clone()
        };
        assert_ne!(one, estimate(&other, &rf, &link).unwrap());
    }

    #[test]
    fn quadrupling_samples_halves_the_error() {
        let rf = RfConfig::from_db(2, 2, 0.72, 20.0).unwrap();
        let link = weak_link(20.0);
        let small = SimPlan::new(250_000, 2, vec![Metric::Capacity]);
        let big = SimPlan::new(1_000_000, 3, vec![Metric::Capacity]);
        let a = estimate(&small, &rf, &link).unwrap().estimates[0].1.std_err;
        let b = estimate(&big, &rf, &link).unwrap().estimates[0].1.std_err;
        let ratio = a / b;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn small_runs_are_flagged_not_refused() {
        let rf = RfConfig::from_db(2, 2, 0.72, 20.0).unwrap();
        let plan = SimPlan::new(1000, 1, vec![Metric::Capacity]);
        let r = estimate(&plan, &rf, &weak_link(20.0)).unwrap();
        assert_eq!(r.get(Metric::Capacity).unwrap().n, 1000);
        assert!(matches!(
            r.warnings[..],
            [Error::InsufficientSamples {
                requested: 1000,
                ..
            }]
        ));
    }

    #[test]
    fn remainder_samples_are_spread_over_leading_streams() {
        let plan = SimPlan::new(10, 0, vec![Metric::Cdf]).with_streams(4);
        let counts: Vec<u64> = (0..4).map(|k| plan.stream_samples(k)).collect();
        assert_eq!(counts, vec![3, 3, 2, 2]);
    }
}
