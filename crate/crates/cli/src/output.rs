//! CSV and JSON writers. Floats are printed with 17 significant digits in
//! CSV and as shortest round-trip literals in JSON, so reruns are
//! byte-identical.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use trimer::analysis::{FixedPoint, SweepResult};
use trimer::TimeSeries;

use crate::config::{Format, RunConfig};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("tau");
    for label in series.labels() {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (i, &t) in series.times().iter().enumerate() {
        out.push_str(&num(t));
        for v in series.row(i) {
            out.push(',');
            out.push_str(&num(v));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Column<'a> {
    label: &'a str,
    values: &'a [f64],
}

pub fn series_json(series: &TimeSeries, config: &RunConfig) -> String {
    let columns: Vec<Column> = series.columns().map(|(label, values)| Column { label, values }).collect();
    let doc = json!({
        "config": config,
        "tau": series.times(),
        "columns": columns,
    });
    pretty(&doc)
}

pub const FIXED_POINT_HEADER: &str = "r,x2,z2,kind,residual24,residual25";
pub const SWEEP_HEADER: &str = "r,x2,z2,kind,residual24,residual25,max_x2,localized";

fn fixed_point_fields(p: &FixedPoint) -> String {
    format!(
        "{},{},{},{},{},{}",
        num(p.r),
        num(p.x2),
        num(p.z2),
        p.kind,
        num(p.residual_hyperbola),
        num(p.residual_ellipse)
    )
}

pub fn fixed_points_csv(points: &[FixedPoint]) -> String {
    let mut out = format!("{FIXED_POINT_HEADER}\n");
    for p in points {
        out.push_str(&fixed_point_fields(p));
        out.push('\n');
    }
    out
}

/// One row per fixed point, with the entry's excursion and flag repeated.
/// An entry whose computation failed contributes a single row with kind
/// `error` and empty numeric fields.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for e in &result.entries {
        let max_x2 = e.max_x2.as_ref().map(|v| num(*v)).unwrap_or_default();
        let flag = e.localization.as_ref().map(|l| l.as_str()).unwrap_or("error");
        match &e.fixed_points {
            Ok(points) => {
                for p in points {
                    let _ = writeln!(out, "{},{max_x2},{flag}", fixed_point_fields(p));
                }
            }
            Err(_) => {
                let _ = writeln!(out, "{},,,error,,,{max_x2},{flag}", num(e.r));
            }
        }
    }
    out
}

fn point_json(p: &FixedPoint) -> Value {
    json!({
        "x2": p.x2,
        "z2": p.z2,
        "kind": p.kind.as_str(),
        "residual24": p.residual_hyperbola,
        "residual25": p.residual_ellipse,
    })
}

pub fn fixed_points_json(points: &[FixedPoint], config: &RunConfig) -> String {
    let doc = json!({
        "config": config,
        "r": config.r,
        "fixed_points": points.iter().map(point_json).collect::<Vec<_>>(),
    });
    pretty(&doc)
}

pub fn sweep_json(result: &SweepResult, config: &RunConfig) -> String {
    let entries: Vec<Value> = result
        .entries
        .iter()
        .map(|e| {
            let mut errors = Vec::new();
            let points = match &e.fixed_points {
                Ok(p) => p.iter().map(point_json).collect(),
                Err(err) => {
                    errors.push(err.to_string());
                    Vec::new()
                }
            };
            if let Err(err) = &e.max_x2 {
                errors.push(err.to_string());
            }
            json!({
                "r": e.r,
                "fixed_points": points,
                "max_x2": e.max_x2.as_ref().ok(),
                "localized": e.localization.as_ref().ok().map(|l| l.as_str()),
                "errors": errors,
            })
        })
        .collect();
    let doc = json!({
        "config": config,
        "horizon": result.horizon,
        "entries": entries,
    });
    pretty(&doc)
}

fn pretty(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("values are always serializable");
    s.push('\n');
    s
}

/// Writes `contents` to the configured path, or stdout when there is none.
pub fn emit(contents: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents)
            .map_err(|e| io::Error::new(e.kind(), format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn render_series(series: &TimeSeries, config: &RunConfig) -> String {
    match config.format {
        Format::Csv => series_csv(series),
        Format::Json => series_json(series, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_full_precision() {
        let s = TimeSeries::new(vec![0.0, 0.1], vec!["a".into()], vec![vec![1.0 / 3.0, -2.0]]).unwrap();
        let csv = series_csv(&s);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("tau,a"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, vec![0.0, 1.0 / 3.0]);
        assert_eq!(lines.next(), Some("1.0000000000000001e-1,-2.0000000000000000e0"));
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let r = SweepResult {
            horizon: 1.0,
            entries: Vec::new(),
        };
        assert_eq!(sweep_csv(&r), format!("{SWEEP_HEADER}\n"));
    }
}
