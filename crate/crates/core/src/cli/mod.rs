//! Command-line front end: `analyze`, `simulate`, `validate` and `specfun`.
//!
//! Exit codes: 0 success, 1 a validation row failed, 2 configuration or usage
//! error, 3 numerical failure.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::mc::MIN_SAMPLES;
use crate::specfun::{egbmgf_estimate, meijer_g_estimate, ContourConfig, Egbmgf2Spec, MeijerGSpec};
use crate::validation::{
    run_suites, run_sweep, Compare, ComparisonReport, SweepRange, SweepSpec, SweepVariable,
};
use config::{ConfigError, FileConfig, Format, Threshold};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable holding the log filter, e.g. `info` or `rffso=debug`.
pub const LOG_ENV: &str = "RFFSO_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "rffso",
    version,
    about = "RF-FSO relaying performance: closed forms, simulation and cross-validation"
)]
pub struct Cli {
    /// Worker threads for sweeps and simulation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Io {
    /// TOML configuration; the weak-turbulence reference system when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (default: `[output].path`, else stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form sweep.
    Analyze {
        #[command(flatten)]
        io: Io,
        /// Outage threshold, linear or with a dB suffix (`0dB`).
        #[arg(long)]
        gamma_th: Option<String>,
    },
    /// Monte Carlo sweep.
    Simulate {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        gamma_th: Option<String>,
    },
    /// Cross-validation suites.
    Validate {
        #[command(flatten)]
        io: Io,
        /// Restrict to these suites (repeatable).
        #[arg(long)]
        suite: Vec<String>,
        /// Simulated samples per grid point.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a special function directly.
    Specfun {
        #[command(subcommand)]
        kind: Specfun,
    },
}

#[derive(Debug, Subcommand)]
pub enum Specfun {
    /// Meijer G-function G^{m,n}_{p,q}(z).
    Meijerg {
        m: usize,
        n: usize,
        p: usize,
        q: usize,
        #[arg(long, num_args = 0.., allow_negative_numbers = true)]
        a: Vec<f64>,
        #[arg(long, num_args = 0.., allow_negative_numbers = true)]
        b: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        /// Contour abscissa (default: saddle point).
        #[arg(long, allow_negative_numbers = true)]
        abscissa: Option<f64>,
        /// Target relative error.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Bivariate capacity kernel for given turbulence and pointing shapes.
    Capacity {
        #[arg(long)]
        psi2: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// First argument (relay-gain term).
        #[arg(long)]
        x: f64,
        /// Second argument (FSO scaling term).
        #[arg(long)]
        y: f64,
    },
}

/// Process entry point; returns the exit code.
pub fn main() -> i32 {
    let _ = env_logger::Builder::new()
        .parse_filters(&std::env::var(LOG_ENV).unwrap_or_else(|_| "warn".into()))
        .format_timestamp(None)
        .try_init();
    run(std::env::args_os())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_CONFIG;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("thread pool already initialised: {e}");
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            EXIT_CONFIG
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            EXIT_NUMERICAL
        }
        Err(Failure::Io(e)) => {
            eprintln!("output error: {e}");
            EXIT_CONFIG
        }
    }
}

enum Failure {
    Config(ConfigError),
    Numerical(String),
    Io(std::io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn load(io: &Io) -> Result<FileConfig, ConfigError> {
    let mut f = match &io.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::reference(),
    };
    let out = f.output.get_or_insert_with(Default::default);
    if let Some(p) = &io.output {
        out.path = Some(p.clone());
    }
    if let Some(fmt) = io.format {
        out.format = Some(fmt);
    }
    if out.format.is_none() {
        let json = out
            .path
            .as_ref()
            .and_then(|p| p.extension())
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        out.format = Some(if json { Format::Json } else { Format::Csv });
    }
    Ok(f)
}

fn set_threshold(f: &mut FileConfig, gamma_th: Option<&str>) -> Result<(), ConfigError> {
    if let Some(s) = gamma_th {
        let t: Threshold = s.parse()?;
        f.analysis.get_or_insert_with(Default::default).gamma_th = Some(t);
    }
    Ok(())
}

fn set_sim(f: &mut FileConfig, samples: Option<u64>, seed: Option<u64>) {
    let sim = f.sim.get_or_insert_with(Default::default);
    if samples.is_some() {
        sim.samples = samples;
    }
    if seed.is_some() {
        sim.seed = seed;
    }
}

/// The configured sweep, or the single configured point on the `mu1_db` axis.
fn sweep_for(run: &config::RunConfig, file: &FileConfig, compare: Compare) -> SweepSpec {
    let mut spec = run.sweep.clone().unwrap_or_else(|| {
        let x = file
            .rf
            .as_ref()
            .and_then(|r| r.mu1_db)
            .unwrap_or_else(|| crate::channel::linear_to_db(run.channel.rf.mu));
        SweepSpec {
            variable: SweepVariable::Mu1Db,
            range: SweepRange {
                start: x,
                stop: x,
                step: 1.0,
            },
            fixed: run.channel,
            metrics: run.metrics.clone(),
            compare,
            gamma_th: run.gamma_th,
            sim: run.sim.clone(),
            z_threshold: 3.0,
        }
    });
    spec.compare = compare;
    spec
}

/// The config as echoed into outputs: only the sections the command reads.
/// The destination is left out so that identical runs produce identical bytes
/// wherever they are written.
fn echo(file: &FileConfig, command: &str) -> FileConfig {
    let mut e = FileConfig {
        output: None,
        ..file.clone()
    };
    if command != "validate" {
        e.validation = None;
    }
    if command == "analyze" {
        e.sim = None;
    }
    e
}

fn numerical_failures(report: &ComparisonReport) -> Option<String> {
    let msgs: Vec<String> = report
        .failures()
        .map(|r| format!("{} {}: {}", r.case, r.metric, r.note))
        .collect();
    (!msgs.is_empty()).then(|| msgs.join("; "))
}

fn sweep_command(command: &str, file: FileConfig, compare: Compare) -> Result<i32, Failure> {
    let file = file.normalised()?;
    let run = file.resolve()?;
    if compare != Compare::Analytic && run.sim.samples < MIN_SAMPLES {
        return Err(ConfigError(format!(
            "invalid `sim.samples`: {} is below the minimum of {MIN_SAMPLES}",
            run.sim.samples
        ))
        .into());
    }
    let spec = sweep_for(&run, &file, compare);
    log::info!(
        "{command}: {} over {} points, seed {}",
        spec.variable,
        spec.range.points().len(),
        run.sim.seed
    );
    let report = run_sweep(&spec).map_err(|e| Failure::Config(e.into()))?;
    let bytes = output::records_bytes(
        run.format,
        command,
        &echo(&file, command),
        &report.records(),
    )?;
    output::emit(run.output.as_deref(), &bytes)?;
    match numerical_failures(&report) {
        Some(msg) => Err(Failure::Numerical(msg)),
        None => Ok(EXIT_OK),
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Analyze { io, gamma_th } => {
            let mut f = load(&io)?;
            set_threshold(&mut f, gamma_th.as_deref())?;
            sweep_command("analyze", f, Compare::Analytic)
        }
        Command::Simulate {
            io,
            samples,
            seed,
            gamma_th,
        } => {
            let mut f = load(&io)?;
            set_threshold(&mut f, gamma_th.as_deref())?;
            set_sim(&mut f, samples, seed);
            if seed.is_none() && f.sim.as_ref().and_then(|s| s.seed).is_none() {
                let s = f.ensure_seed();
                eprintln!("seed {s}");
            }
            sweep_command("simulate", f, Compare::Mc)
        }
        Command::Validate {
            io,
            suite,
            samples,
            seed,
        } => {
            let mut f = load(&io)?;
            set_sim(&mut f, None, seed);
            let v = f.validation.get_or_insert_with(Default::default);
            if samples.is_some() {
                v.samples = samples;
            }
            if !suite.is_empty() {
                v.suites = Some(suite);
            }
            let file = f.normalised()?;
            let run = file.resolve()?;
            let mut report = run_suites(&run.suites, &run.validation);
            if let Some(spec) = &run.sweep {
                let sweep = run_sweep(spec).map_err(|e| Failure::Config(e.into()))?;
                report.extend(sweep);
            }
            let bytes = output::report_bytes(run.format, &echo(&file, "validate"), &report)?;
            output::emit(run.output.as_deref(), &bytes)?;
            let s = &report.summary;
            eprintln!(
                "{} rows, {} failed, max |z| {:.3}, max relative gap {:.3e}",
                s.rows, s.failures, s.max_z, s.max_rel_gap
            );
            for r in report.failures() {
                eprintln!(
                    "FAIL {} {} {}: score {} > {} {}",
                    r.suite, r.case, r.metric, r.score, r.tolerance, r.note
                );
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            })
        }
        Command::Specfun { kind } => specfun(kind),
    }
}

fn format_value(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v:.12}")
    } else {
        format!("{v:.12e}")
    }
}

fn specfun(kind: Specfun) -> Result<i32, Failure> {
    let numerical = |e: crate::Error| Failure::Numerical(format!("{}: {e}", e.kind()));
    match kind {
        Specfun::Meijerg {
            m,
            n,
            p,
            q,
            a,
            b,
            z,
            abscissa,
            tol,
        } => {
            if a.len() != p || b.len() != q {
                return Err(numerical(crate::Error::InvalidSpec(format!(
                    "expected {p} a-parameters and {q} b-parameters, got {} and {}",
                    a.len(),
                    b.len()
                ))));
            }
            let spec = MeijerGSpec::new(m, n, a, b, z).map_err(numerical)?;
            let target = tol.unwrap_or(crate::specfun::defaults::UNIVARIATE_TARGET);
            let contour = match abscissa {
                Some(c) => ContourConfig::at_abscissa(&spec, c, target),
                None => ContourConfig::auto_with_target(&spec, target),
            }
            .map_err(numerical)?;
            let e = meijer_g_estimate(&spec, Some(&contour)).map_err(numerical)?;
            println!("{}", format_value(e.value));
            println!(
                "error {:.3e} (contour at {}, {} panels)",
                e.error, e.contour.abscissa, e.panels
            );
        }
        Specfun::Capacity {
            psi2,
            alpha,
            beta,
            x,
            y,
        } => {
            let spec = Egbmgf2Spec::capacity_kernel(psi2, alpha, beta, x, y).map_err(numerical)?;
            let e = egbmgf_estimate(&spec, None, None).map_err(numerical)?;
            println!("{}", format_value(e.value));
            println!(
                "error {:.3e} (s axis {:.3e}, t axis {:.3e})",
                e.error_s + e.error_t,
                e.error_s,
                e.error_t
            );
        }
    }
    Ok(EXIT_OK)
}
