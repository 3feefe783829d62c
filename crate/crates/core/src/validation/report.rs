use serde::Serialize;

use crate::error::Error;
use crate::mc::McEstimate;

/// How a row is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `|analytic - mc| / std_err <= tolerance`
    ZScore,
    /// `|value - reference| / |reference| <= tolerance`
    RelGap,
    /// `|value - reference| <= tolerance`
    AbsGap,
    /// A qualitative property; `score` is the quantity compared to `tolerance`.
    Holds,
    /// Plain evaluation, passes when it produced a finite value.
    Evaluated,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::ZScore => "z_score",
            Check::RelGap => "rel_gap",
            Check::AbsGap => "abs_gap",
            Check::Holds => "holds",
            Check::Evaluated => "evaluated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub suite: String,
    pub case: String,
    pub x: f64,
    pub metric: String,
    pub analytic: Option<f64>,
    /// Oracle value: quadrature, identity or expected property value.
    pub reference: Option<f64>,
    pub mc: Option<McEstimate>,
    pub check: Check,
    pub score: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

fn gap(value: f64, reference: f64) -> f64 {
    let d = (value - reference).abs();
    if reference == 0.0 {
        d
    } else {
        d / reference.abs()
    }
}

impl ReportRow {
    fn base(suite: &str, case: impl Into<String>, x: f64, metric: impl Into<String>) -> Self {
        ReportRow {
            suite: suite.to_string(),
            case: case.into(),
            x,
            metric: metric.into(),
            analytic: None,
            reference: None,
            mc: None,
            check: Check::Evaluated,
            score: f64::NAN,
            tolerance: f64::NAN,
            pass: false,
            note: String::new(),
        }
    }

    fn judged(mut self, check: Check, score: f64, tolerance: f64) -> Self {
        self.check = check;
        self.score = score;
        self.tolerance = tolerance;
        self.pass = score.is_finite() && score <= tolerance;
        self
    }

    pub fn z(
        suite: &str,
        case: impl Into<String>,
        x: f64,
        metric: impl Into<String>,
        analytic: f64,
        mc: McEstimate,
        threshold: f64,
    ) -> Self {
        let mut r = Self::base(suite, case, x, metric);
        r.analytic = Some(analytic);
        r.mc = Some(mc);
        r.judged(Check::ZScore, mc.z_score(analytic).abs(), threshold)
    }

    pub fn relative(
        suite: &str,
        case: impl Into<String>,
        x: f64,
        metric: impl Into<String>,
        value: f64,
        reference: f64,
        tolerance: f64,
    ) -> Self {
        let mut r = Self::base(suite, case, x, metric);
        r.analytic = Some(value);
        r.reference = Some(reference);
        r.judged(Check::RelGap, gap(value, reference), tolerance)
    }

    pub fn absolute(
        suite: &str,
        case: impl Into<String>,
        x: f64,
        metric: impl Into<String>,
        value: f64,
        reference: f64,
        tolerance: f64,
    ) -> Self {
        let mut r = Self::base(suite, case, x, metric);
        r.analytic = Some(value);
        r.reference = Some(reference);
        r.judged(Check::AbsGap, (value - reference).abs(), tolerance)
    }

    /// Property row: passes when `score <= tolerance`.
    pub fn holds(
        suite: &str,
        case: impl Into<String>,
        metric: impl Into<String>,
        score: f64,
        tolerance: f64,
        note: impl Into<String>,
    ) -> Self {
        let mut r =
            Self::base(suite, case, f64::NAN, metric).judged(Check::Holds, score, tolerance);
        r.note = note.into();
        r
    }

    pub fn evaluated(
        suite: &str,
        case: impl Into<String>,
        x: f64,
        metric: impl Into<String>,
        analytic: Option<f64>,
        mc: Option<McEstimate>,
    ) -> Self {
        let mut r = Self::base(suite, case, x, metric);
        r.analytic = analytic;
        r.mc = mc;
        r.pass = analytic.map_or(true, f64::is_finite) && mc.map_or(true, |m| m.mean.is_finite());
        r
    }

    pub fn failed(
        suite: &str,
        case: impl Into<String>,
        x: f64,
        metric: impl Into<String>,
        err: &Error,
    ) -> Self {
        let mut r = Self::base(suite, case, x, metric);
        r.note = format!("{} error: {err}", err.kind());
        r
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub seed: u64,
    pub samples: u64,
    pub streams: u32,
    pub z_threshold: f64,
    pub tolerances: Vec<(String, f64)>,
    pub suites: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub failures: usize,
    pub max_z: f64,
    pub max_rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub header: ReportHeader,
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

/// One line of the fixed `x,metric,method,value,std_err,n,seed` schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub x: f64,
    pub metric: String,
    pub method: &'static str,
    pub value: f64,
    pub std_err: f64,
    pub n: u64,
    pub seed: u64,
}

impl ComparisonReport {
    pub fn new(header: ReportHeader, rows: Vec<ReportRow>) -> Self {
        let mut r = ComparisonReport {
            header,
            rows,
            summary: Summary {
                rows: 0,
                failures: 0,
                max_z: 0.0,
                max_rel_gap: 0.0,
            },
        };
        r.summarise();
        r
    }

    fn summarise(&mut self) {
        let max = |c: Check| {
            self.rows
                .iter()
                .filter(|r| r.check == c && r.score.is_finite())
                .map(|r| r.score)
                .fold(0.0, f64::max)
        };
        self.summary = Summary {
            rows: self.rows.len(),
            failures: self.rows.iter().filter(|r| !r.pass).count(),
            max_z: max(Check::ZScore),
            max_rel_gap: max(Check::RelGap),
        };
    }

    pub fn extend(&mut self, other: ComparisonReport) {
        self.header.suites.extend(other.header.suites);
        self.rows.extend(other.rows);
        self.summarise();
    }

    pub fn passed(&self) -> bool {
        self.summary.failures == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Flattens analytic and simulated values into sweep records.
    pub fn records(&self) -> Vec<Record> {
        let mut out = Vec::new();
        for r in &self.rows {
            if let Some(v) = r.analytic {
                out.push(Record {
                    x: r.x,
                    metric: r.metric.clone(),
                    method: "analytic",
                    value: v,
                    std_err: 0.0,
                    n: 0,
                    seed: 0,
                });
            }
            if let Some(m) = r.mc {
                out.push(Record {
                    x: r.x,
                    metric: r.metric.clone(),
                    method: "mc",
                    value: m.mean,
                    std_err: m.std_err,
                    n: m.n,
                    seed: m.seed,
                });
            }
        }
        out
    }
}
