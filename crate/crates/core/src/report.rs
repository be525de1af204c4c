//! Serializing audit reports as canonical JSON, a text summary or a CSV digest.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::audit::{AuditReport, TOOL_VERSION};
use crate::error::{Error, Result};
use crate::montecarlo::{Histogram, MonteCarloDigest, MonteCarloSummary, WalkParams};

/// Serde adapter for floats that may be infinite. Infinities are written as
/// the strings `"inf"` / `"-inf"`; NaN as `null`.
pub mod extended_float {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_none()
        } else if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    struct ExtendedFloat;

    impl<'de> Visitor<'de> for ExtendedFloat {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a number, \"inf\", \"-inf\" or null")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
            }
        }

        fn visit_unit<E: de::Error>(self) -> Result<f64, E> {
            Ok(f64::NAN)
        }

        fn visit_none<E: de::Error>(self) -> Result<f64, E> {
            Ok(f64::NAN)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(ExtendedFloat)
    }
}

/// Significant digits kept for every float in canonical JSON.
pub const CANONICAL_DIGITS: usize = 12;

fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", CANONICAL_DIGITS - 1, v)
        .parse()
        .unwrap_or(v)
}

fn canonicalize(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let v = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                entries
                    .into_iter()
                    .map(|(k, v)| (k, canonicalize(v)))
                    .collect::<Map<String, Value>>(),
            )
        }
        other => other,
    }
}

/// Pretty JSON with sorted keys and floats rounded to
/// [`CANONICAL_DIGITS`] significant digits, so equal inputs give equal bytes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let value = canonicalize(serde_json::to_value(value)?);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
    CsvDigest,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "text" | "txt" => Ok(Format::Text),
            "csv" | "csv-digest" | "csv_digest" => Ok(Format::CsvDigest),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

pub fn write_report<W: Write>(report: &AuditReport, format: Format, mut writer: W) -> Result<()> {
    match format {
        Format::Json => writer.write_all(to_canonical_json(report)?.as_bytes())?,
        Format::Text => writer.write_all(text_summary(report).as_bytes())?,
        Format::CsvDigest => write_csv_digest(report, writer)?,
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.4}"))
}

/// Human-readable report. The rationale lines name both ADF verdicts.
pub fn text_summary(report: &AuditReport) -> String {
    let mut out = String::new();
    let i = &report.inputs;
    let _ = writeln!(
        out,
        "series a: {} ({}..{}, n = {}), series b: {} ({}..{}, n = {})",
        i.a.label, i.a.first, i.a.last, i.a.n, i.b.label, i.b.first, i.b.last, i.b.n
    );
    let _ = writeln!(
        out,
        "overlap: {}..{} ({} points{})",
        i.overlap_first,
        i.overlap_last,
        i.overlap_n,
        if i.changes_have_gaps {
            ", with gaps"
        } else {
            ""
        }
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "unit-root tests (lags = {}, {}):",
        report.config.audit.lags, report.config.audit.deterministic
    );
    let adf = &report.adf;
    for (name, r) in [
        ("a levels", Some(&adf.a_levels)),
        ("b levels", Some(&adf.b_levels)),
        ("a changes", adf.a_changes.as_ref()),
        ("b changes", adf.b_changes.as_ref()),
    ] {
        match r {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "  {name:<10} stat {:>8.3}  5% cv {:>7.3}  p ~ {}  {}",
                    r.statistic,
                    r.critical_values.five_pct,
                    fmt_opt(r.approx_p),
                    r.verdict_text()
                );
            }
            None => {
                let _ = writeln!(out, "  {name:<10} not computed");
            }
        }
    }
    let _ = writeln!(out);
    let c = &report.correlations;
    for (name, r) in [("levels", &c.levels), ("changes", &c.changes)] {
        let _ = writeln!(
            out,
            "correlation of {name:<7}: r = {:>7.4}  t = {:>8.3}  p = {:.4}  (n = {})",
            r.r, r.t_stat, r.p_two_sided, r.n
        );
    }
    let g = &report.regression;
    let _ = writeln!(
        out,
        "regression a = {:.4} + {:.4} b  (se {:.4}, R^2 = {:.4}); residual lag-1 rho = {:.4}",
        g.beta0, g.beta1, g.se_beta1, g.r_squared, g.residual_lag1.rho_hat
    );
    if let Some(mc) = &report.monte_carlo {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "random-walk null: {} walks ({} excluded), seed {}",
            mc.n_walks, mc.n_excluded, report.config.audit.seed
        );
        let _ = writeln!(
            out,
            "  level r: mean {:.3}, sd {:.3}; share > 0.30 = {:.3}, share > 0.75 = {:.3}",
            mc.level_corrs.mean,
            mc.level_corrs.sd,
            mc.level_share_above_030,
            mc.level_share_above_075
        );
        let _ = writeln!(
            out,
            "  change r: mean {:.3}, sd {:.3}, max |r| {:.3}",
            mc.change_corrs.mean, mc.change_corrs.sd, mc.change_corrs.max_abs
        );
        let _ = writeln!(
            out,
            "  residual rho: levels mean {:.3}, changes mean {:.3}",
            mc.level_resid_rho.mean, mc.change_resid_rho.mean
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "verdict: {}", report.verdict.category);
    for line in &report.verdict.rationale {
        let _ = writeln!(out, "  - {line}");
    }
    out
}

fn write_histogram_rows<W: Write>(w: &mut csv::Writer<W>, name: &str, h: &Histogram) -> Result<()> {
    for (k, &count) in h.counts.iter().enumerate() {
        let overlay = h
            .overlay
            .as_ref()
            .map(|o| format!("{:.6}", o[k]))
            .unwrap_or_default();
        w.write_record([
            "histogram".to_owned(),
            name.to_owned(),
            format!("{:.6}", h.edges[k]),
            format!("{:.6}", h.edges[k + 1]),
            count.to_string(),
            overlay,
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    Ok(())
}

const DIGEST_HEADER: [&str; 9] = [
    "record",
    "name",
    "bin_lower",
    "bin_upper",
    "count",
    "overlay",
    "r",
    "p_two_sided",
    "n",
];

fn write_histograms<W: Write>(w: &mut csv::Writer<W>, digest: &MonteCarloDigest) -> Result<()> {
    let h = &digest.histograms;
    write_histogram_rows(w, "level_corrs", &h.level_corrs)?;
    write_histogram_rows(w, "change_corrs", &h.change_corrs)?;
    write_histogram_rows(w, "level_resid_rho", &h.level_resid_rho)?;
    write_histogram_rows(w, "change_resid_rho", &h.change_resid_rho)?;
    Ok(())
}

/// Flat CSV: one row per correlation, then one row per histogram bin when the
/// Monte Carlo step ran.
pub fn write_csv_digest<W: Write>(report: &AuditReport, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DIGEST_HEADER)?;
    let c = &report.correlations;
    for (name, r) in [("levels", &c.levels), ("changes", &c.changes)] {
        w.write_record([
            "correlation".to_owned(),
            name.to_owned(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            format!("{:.12}", r.r),
            format!("{:.12e}", r.p_two_sided),
            r.n.to_string(),
        ])?;
    }
    if let Some(mc) = &report.monte_carlo {
        write_histograms(&mut w, mc)?;
    }
    w.flush()?;
    Ok(())
}

/// Output of a standalone Monte Carlo run against one target series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub target: String,
    pub target_first: i64,
    pub target_last: i64,
    pub params: WalkParams,
    pub seed: u64,
    pub bins: usize,
    pub rng_name: String,
    pub tool_version: String,
    pub digest: MonteCarloDigest,
}

impl SimulationReport {
    pub fn new(
        target: &crate::series::TimeSeries,
        summary: &MonteCarloSummary,
        bins: usize,
    ) -> Result<Self> {
        Ok(Self {
            target: target.label().to_owned(),
            target_first: target.first_time(),
            target_last: target.last_time(),
            params: summary.params,
            seed: summary.seed,
            bins,
            rng_name: summary.rng_name.clone(),
            tool_version: TOOL_VERSION.to_owned(),
            digest: summary.digest(bins)?,
        })
    }
}

/// Histogram rows of a simulation in the same layout as the audit digest.
pub fn write_simulation_csv<W: Write>(report: &SimulationReport, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DIGEST_HEADER)?;
    write_histograms(&mut w, &report.digest)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::{audit, AuditConfig};
    use crate::montecarlo::{walk_values, WalkParams};
    use crate::series::TimeSeries;
    use crate::stats::{CorrelationMode, CorrelationResult};

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.234_567_890_123_456e-7), 1.234_567_890_12e-7);
        assert_eq!(round_sig(-0.0), -0.0);
    }

    #[test]
    fn infinite_t_round_trips() {
        let r = CorrelationResult {
            r: 1.0,
            n: 5,
            t_stat: f64::INFINITY,
            p_two_sided: 0.0,
            mode: CorrelationMode::Levels,
        };
        let text = to_canonical_json(&r).unwrap();
        assert!(text.contains("\"t_stat\": \"inf\""));
        let back: CorrelationResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn keys_are_sorted() {
        let v = serde_json::json!({"b": 1.0, "a": {"z": 2, "y": [0.1, 3]}});
        let text = to_canonical_json(&v).unwrap();
        let a = text.find("\"a\"").unwrap();
        let b = text.find("\"b\"").unwrap();
        assert!(a < b);
        assert!(text.find("\"y\"").unwrap() < text.find("\"z\"").unwrap());
    }

    fn sample_report() -> AuditReport {
        let params = WalkParams::default();
        let a = TimeSeries::from_values("a", 1900, walk_values(&params, 0, 11).1).unwrap();
        let b = TimeSeries::from_values("b", 1900, walk_values(&params, 1, 11).1).unwrap();
        let config = AuditConfig {
            walks: 200,
            seed: 4,
            ..AuditConfig::default()
        };
        audit(&a, &b, &config).unwrap()
    }

    #[test]
    fn report_round_trips_and_keeps_its_verdict() {
        let report = sample_report();
        let text = to_canonical_json(&report).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        for key in [
            "inputs",
            "adf",
            "correlations",
            "regression",
            "monte_carlo",
            "verdict",
            "config",
        ] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
        assert!(value["config"].get("tool_version").is_some());
        assert!(value["config"].get("rng_name").is_some());
        let parsed: AuditReport = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.rederive_verdict().category, report.verdict.category);
        assert_eq!(to_canonical_json(&parsed).unwrap(), text);
    }

    #[test]
    fn text_and_csv_outputs() {
        let report = sample_report();
        let mut buf = Vec::new();
        write_report(&report, Format::Text, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("verdict: "));
        assert!(text.contains("ADF verdicts"));

        let mut buf = Vec::new();
        write_report(&report, Format::CsvDigest, &mut buf).unwrap();
        let csv = String::from_utf8(buf).unwrap();
        assert!(csv.starts_with("record,name,bin_lower,bin_upper,count,overlay,r,p_two_sided,n\n"));
        assert_eq!(
            csv.lines()
                .filter(|l| l.starts_with("histogram,level_corrs,"))
                .count(),
            40
        );
    }

    #[test]
    fn format_names() {
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert_eq!("csv".parse::<Format>().unwrap(), Format::CsvDigest);
        assert!("xml".parse::<Format>().is_err());
    }
}
