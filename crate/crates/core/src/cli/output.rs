//! CSV and JSON writers. Every file starts with the effective configuration.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::{FileConfig, Format};
use crate::validation::{ComparisonReport, Record};

/// Header lines are TOML comments; stripping one leading `# ` from each line
/// gives a config file that reproduces the run.
pub fn echo_header(command: &str, config: &FileConfig) -> String {
    let mut s = format!("## rffso {} {command}\n", env!("CARGO_PKG_VERSION"));
    for line in config.to_toml().lines() {
        if line.is_empty() {
            s.push_str("#\n");
        } else {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
    }
    s
}

/// Recovers the configuration from the comment header of a CSV output.
pub fn config_from_csv(text: &str) -> Result<FileConfig, super::config::ConfigError> {
    let toml: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| {
            l.strip_prefix("# ")
                .or_else(|| l.strip_prefix('#'))
                .unwrap_or(l)
        })
        .collect::<Vec<_>>()
        .join("\n");
    FileConfig::parse(&toml)
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

#[derive(Serialize)]
struct RecordRow<'a> {
    x: String,
    metric: &'a str,
    method: &'a str,
    value: String,
    std_err: String,
    n: u64,
    seed: u64,
}

fn csv_bytes<T: Serialize>(
    header: &str,
    rows: impl IntoIterator<Item = T>,
) -> std::io::Result<Vec<u8>> {
    let mut out = header.as_bytes().to_vec();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(out)
}

pub fn records_csv(
    command: &str,
    config: &FileConfig,
    records: &[Record],
) -> std::io::Result<Vec<u8>> {
    let rows = records.iter().map(|r| RecordRow {
        x: num(r.x),
        metric: &r.metric,
        method: r.method,
        value: num(r.value),
        std_err: num(r.std_err),
        n: r.n,
        seed: r.seed,
    });
    let mut bytes = csv_bytes(&echo_header(command, config), rows)?;
    if records.is_empty() {
        bytes.extend_from_slice(b"x,metric,method,value,std_err,n,seed\n");
    }
    Ok(bytes)
}

#[derive(Serialize)]
struct RecordsDoc<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a FileConfig,
    columns: [&'static str; 7],
    records: &'a [Record],
}

pub fn records_json(
    command: &str,
    config: &FileConfig,
    records: &[Record],
) -> std::io::Result<Vec<u8>> {
    let doc = RecordsDoc {
        tool: "rffso",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        columns: ["x", "metric", "method", "value", "std_err", "n", "seed"],
        records,
    };
    let mut v = serde_json::to_vec_pretty(&doc)?;
    v.push(b'\n');
    Ok(v)
}

#[derive(Serialize)]
struct ReportCsvRow<'a> {
    suite: &'a str,
    case: &'a str,
    x: String,
    metric: &'a str,
    check: &'static str,
    analytic: String,
    reference: String,
    mc_mean: String,
    mc_std_err: String,
    mc_n: String,
    score: String,
    tolerance: String,
    pass: bool,
    note: &'a str,
}

pub fn report_csv(config: &FileConfig, report: &ComparisonReport) -> std::io::Result<Vec<u8>> {
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let mut header = echo_header("validate", config);
    let s = &report.summary;
    header.push_str(&format!(
        "## rows {} failures {} max_z {} max_rel_gap {}\n",
        s.rows, s.failures, s.max_z, s.max_rel_gap
    ));
    let rows = report.rows.iter().map(|r| ReportCsvRow {
        suite: &r.suite,
        case: &r.case,
        x: num(r.x),
        metric: &r.metric,
        check: r.check.name(),
        analytic: opt(r.analytic),
        reference: opt(r.reference),
        mc_mean: opt(r.mc.map(|m| m.mean)),
        mc_std_err: opt(r.mc.map(|m| m.std_err)),
        mc_n: r.mc.map(|m| m.n.to_string()).unwrap_or_default(),
        score: num(r.score),
        tolerance: num(r.tolerance),
        pass: r.pass,
        note: &r.note,
    });
    csv_bytes(&header, rows)
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a FileConfig,
    report: &'a ComparisonReport,
}

pub fn report_json(config: &FileConfig, report: &ComparisonReport) -> std::io::Result<Vec<u8>> {
    let doc = ReportDoc {
        tool: "rffso",
        version: env!("CARGO_PKG_VERSION"),
        command: "validate",
        config,
        report,
    };
    let mut v = serde_json::to_vec_pretty(&doc)?;
    v.push(b'\n');
    Ok(v)
}

pub fn records_bytes(
    format: Format,
    command: &str,
    config: &FileConfig,
    records: &[Record],
) -> std::io::Result<Vec<u8>> {
    match format {
        Format::Csv => records_csv(command, config, records),
        Format::Json => records_json(command, config, records),
    }
}

pub fn report_bytes(
    format: Format,
    config: &FileConfig,
    report: &ComparisonReport,
) -> std::io::Result<Vec<u8>> {
    match format {
        Format::Csv => report_csv(config, report),
        Format::Json => report_json(config, report),
    }
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(x: f64, method: &'static str) -> Record {
        Record {
            x,
            metric: "ber_bpsk".into(),
            method,
            value: 0.25,
            std_err: 0.0,
            n: 0,
            seed: 0,
        }
    }

    #[test]
    fn csv_has_fixed_columns_after_the_echo() {
        let cfg = FileConfig::reference().normalised().unwrap();
        let bytes = records_csv("analyze", &cfg, &[record(1.0, "analytic")]).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "x,metric,method,value,std_err,n,seed");
        assert_eq!(body[1], "1,ber_bpsk,analytic,0.25,0,0,0");
        assert_eq!(config_from_csv(&text).unwrap(), cfg);
    }

    #[test]
    fn json_config_round_trips() {
        let cfg = FileConfig::reference().normalised().unwrap();
        let bytes = records_json("simulate", &cfg, &[record(2.0, "mc")]).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        let back: FileConfig = serde_json::from_value(v["config"].clone()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(v["records"][0]["method"], "mc");
    }
}
