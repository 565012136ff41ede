//! CSV and JSON report formats. Every record carries `schema_version`.

use std::io::Write;

use anyhow::Result;
use maxbound_core::bounds::{BoundReport, SPoint};
use maxbound_core::mgf::Radius;
use maxbound_core::sim::Path;
use maxbound_core::validate::ValidationReport;
use serde::Serialize;

use crate::suite::{StoppingRow, SuiteReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Shortest-trimmed decimal with 17 significant digits, like `%.17g`.
pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        trim(format!("{x:.*}", (16 - exp) as usize))
    } else {
        format!("{}e{exp}", trim(mant.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}

fn s_point(s: Option<SPoint>) -> String {
    match s {
        None => String::new(),
        Some(SPoint::At(x)) => sig17(x),
        Some(SPoint::Edge(Radius::Finite(r))) => format!("edge:{}", sig17(r)),
        Some(SPoint::Edge(Radius::Infinite)) => "edge:inf".into(),
        Some(SPoint::Origin) => "origin".into(),
    }
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json<T: Serialize>(body: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Versioned { schema_version: SCHEMA_VERSION, body })?)
}

const BOUND_HEADER: [&str; 13] = [
    "schema_version",
    "inequality",
    "bound",
    "raw",
    "log_raw",
    "s_used",
    "slope_used",
    "intercept",
    "vacuous",
    "exact",
    "restricted",
    "event",
    "params",
];

pub fn bounds_csv<W: Write>(out: W, reports: &[BoundReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUND_HEADER)?;
    for r in reports {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            r.inequality.to_string(),
            sig17(r.bound),
            sig17(r.raw),
            sig17(r.log_raw),
            s_point(r.s_used),
            opt(r.slope_used),
            opt(r.intercept),
            r.vacuous.to_string(),
            r.exact.to_string(),
            r.restricted.to_string(),
            r.event.map(|e| serde_json::to_string(&e)).transpose()?.unwrap_or_default(),
            serde_json::to_string(&r.params)?,
        ])?;
    }
    w.flush()?;
    Ok(())
}

const VALIDATION_HEADER: [&str; 17] = [
    "schema_version",
    "label",
    "inequality",
    "event",
    "n_paths",
    "n_crossed",
    "p_hat",
    "ci_lo",
    "ci_hi",
    "alpha",
    "bound",
    "verdict",
    "truncation_fraction",
    "horizon",
    "grid_allowance",
    "exact",
    "runtime_seconds",
];

pub fn validations_csv<W: Write>(out: W, reports: &[ValidationReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VALIDATION_HEADER)?;
    for r in reports {
        w.write_record([
            SCHEMA_VERSION.to_string(),
            r.label.clone(),
            r.inequality.map(|i| i.to_string()).unwrap_or_default(),
            serde_json::to_string(&r.event)?,
            r.n_paths.to_string(),
            r.n_crossed.to_string(),
            sig17(r.p_hat),
            sig17(r.ci.lo),
            sig17(r.ci.hi),
            sig17(r.alpha),
            sig17(r.bound),
            r.verdict.as_str().to_string(),
            sig17(r.truncation_fraction),
            sig17(r.horizon),
            opt(r.grid_allowance),
            r.exact.to_string(),
            sig17(r.runtime_seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn stopping_csv<W: Write>(out: W, rows: &[StoppingRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "schema_version",
        "label",
        "class",
        "n_paths",
        "mean_inner",
        "mean_outer",
        "se_inner",
        "se_outer",
        "se_diff",
        "z",
        "truncation_fraction",
        "consistent",
        "horizon",
        "runtime_seconds",
    ])?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            SCHEMA_VERSION.to_string(),
            row.label.clone(),
            serde_json::to_value(r.class)?.as_str().unwrap_or_default().to_string(),
            r.n_paths.to_string(),
            sig17(r.mean_inner),
            sig17(r.mean_outer),
            sig17(r.se_inner),
            sig17(r.se_outer),
            sig17(r.se_diff),
            sig17(r.z),
            sig17(r.truncation_fraction),
            r.consistent.to_string(),
            sig17(r.horizon),
            sig17(r.runtime_seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `path,time,value,vproxy` rows for each path in order.
pub fn paths_csv<W: Write>(out: W, paths: &[Path]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["schema_version", "path", "time", "value", "vproxy"])?;
    for (i, p) in paths.iter().enumerate() {
        for ((t, x), v) in p.times.iter().zip(&p.values).zip(&p.vproxy) {
            w.write_record([SCHEMA_VERSION.to_string(), i.to_string(), sig17(*t), sig17(*x), sig17(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Human-readable one-line summary per row, for stderr.
pub fn summary_lines(r: &SuiteReport) -> Vec<String> {
    let mut out: Vec<String> = r
        .validations
        .iter()
        .map(|v| {
            format!(
                "{:<12} {}  p_hat={:.5} ci=[{:.5}, {:.5}] bound={:.5}",
                v.verdict.as_str(),
                v.label,
                v.p_hat,
                v.ci.lo,
                v.ci.hi,
                v.bound
            )
        })
        .collect();
    for s in &r.stopping {
        let o = &s.report;
        out.push(format!(
            "{:<12} {}  mean1={:.5} mean2={:.5} se_diff={:.5} truncated={:.5}",
            if o.consistent { "holds" } else { "violated" },
            s.label,
            o.mean_inner,
            o.mean_outer,
            o.se_diff,
            o.truncation_fraction
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use maxbound_core::bounds::{azuma_bound, AzumaKind};

    #[test]
    fn sig17_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.0 * (-2f64).exp(), 1e-300, 6.02e23, -5.5e-7, 12345.678, 1.0, 100.0] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(sig17(0.5), "0.5");
        assert_eq!(sig17(100.0), "100");
        assert_eq!(sig17(0.1), "0.10000000000000001");
        assert_eq!(sig17(1e-300), "1e-300");
        assert_eq!(sig17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(sig17(0.0), "0");
    }

    #[test]
    fn bound_csv_has_version_and_value() {
        let r = azuma_bound(2.0, 1.0, AzumaKind::TwoSided).unwrap();
        let mut buf = Vec::new();
        bounds_csv(&mut buf, std::slice::from_ref(&r)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rec = rd.records().next().unwrap().unwrap();
        assert_eq!(&rec[0], "1");
        assert_eq!(&rec[1], "azuma_two_sided");
        assert_eq!(rec[2].parse::<f64>().unwrap(), r.bound);
        let json: serde_json::Value = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["inequality"], "azuma_two_sided");
    }
}
