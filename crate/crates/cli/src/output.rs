//! CSV and SVG artifacts of a run.
//!
//! | file | columns |
//! |------|---------|
//! | `curve_<condition>_<operator>.csv` | `condition,operator,t,n,error` |
//! | `summary.csv` | `condition,operator,slope,intercept,r2,excluded_n` |
//! | `errors.csv` | `condition,operator,error` |
//! | `plot_<condition>.svg` | |
//!
//! `/` in names becomes `_` in file names. Floats are written with 17
//! significant digits, `excluded_n` as `;`-separated integers.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use chernoff_core::analysis::ExperimentReport;
use chernoff_core::config::ExperimentConfig;

use crate::error::CliError;
use crate::svg::{render_chart, Series};
use crate::{chart_path, curve_path};

pub const CURVE_COLUMNS: [&str; 5] = ["condition", "operator", "t", "n", "error"];
pub const SUMMARY_COLUMNS: [&str; 6] = [
    "condition",
    "operator",
    "slope",
    "intercept",
    "r2",
    "excluded_n",
];
pub const ERROR_COLUMNS: [&str; 3] = ["condition", "operator", "error"];

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_set(ns: &BTreeSet<usize>) -> String {
    ns.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn write_error(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Write {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(write_error(path))?;
    w.write_record(header).map_err(write_error(path))?;
    for row in rows {
        w.write_record(row).map_err(write_error(path))?;
    }
    w.flush().map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes every curve, the summary, the error list and the charts.
pub fn write_outputs(config: &ExperimentConfig, report: &ExperimentReport) -> Result<(), CliError> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;

    let mut summary = Vec::new();
    let mut errors = Vec::new();
    for r in &report.results {
        if let Ok(curve) = &r.curve {
            let rows: Vec<Vec<String>> = curve
                .points
                .iter()
                .map(|p| {
                    vec![
                        curve.condition.clone(),
                        curve.operator.clone(),
                        report.t.to_string(),
                        p.n.to_string(),
                        format_float(p.error),
                    ]
                })
                .collect();
            write_csv(
                &curve_path(dir, &r.condition, &r.operator),
                &CURVE_COLUMNS,
                &rows,
            )?;
        }
        match &r.fit {
            Ok(fit) => summary.push(vec![
                r.condition.clone(),
                r.operator.clone(),
                format_float(fit.slope),
                format_float(fit.intercept),
                format_float(fit.r2),
                format_set(&fit.excluded_n),
            ]),
            Err(e) => errors.push(vec![r.condition.clone(), r.operator.clone(), e.to_string()]),
        }
    }
    write_csv(&dir.join("summary.csv"), &SUMMARY_COLUMNS, &summary)?;
    write_csv(&dir.join("errors.csv"), &ERROR_COLUMNS, &errors)?;

    for condition in &config.conditions {
        let series: Vec<Series> = report
            .results
            .iter()
            .filter(|r| &r.condition == condition)
            .map(|r| {
                let points = r.curve.as_ref().map(|c| c.pairs()).unwrap_or_default();
                let used: Vec<usize> = points
                    .iter()
                    .map(|p| p.0)
                    .filter(|n| !r.excluded_n.contains(n))
                    .collect();
                let fit = match (&r.fit, used.first(), used.last()) {
                    (Ok(f), Some(&a), Some(&b)) => Some((f.slope, f.intercept, a, b)),
                    _ => None,
                };
                Series {
                    label: r.operator.clone(),
                    points,
                    fit,
                }
            })
            .collect();
        let path = chart_path(dir, condition);
        let title = format!("{condition}, t = {}", report.t);
        fs::write(&path, render_chart(&title, &series))
            .map_err(|source| CliError::Write { path, source })?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub condition: String,
    pub operator: String,
    pub slope: f64,
}

/// Reads the `condition`, `operator` and `slope` columns of a summary CSV.
pub fn read_summary(path: &PathBuf) -> Result<Vec<SummaryRow>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    let format = |message: String| CliError::Format {
        path: path.clone(),
        message,
    };
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| format(e.to_string()))?.clone();
    let column = |field: &str| {
        headers
            .iter()
            .position(|h| h.trim() == field)
            .ok_or_else(|| CliError::MissingColumn {
                path: path.clone(),
                field: field.to_string(),
            })
    };
    let (c, o, s) = (column("condition")?, column("operator")?, column("slope")?);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format(e.to_string()))?;
        let field = |k: usize| record.get(k).unwrap_or("").trim().to_string();
        let slope = field(s).parse().map_err(|_| {
            format(format!(
                "row {}: slope '{}' is not a number",
                i + 1,
                field(s)
            ))
        })?;
        rows.push(SummaryRow {
            condition: field(c),
            operator: field(o),
            slope,
        });
    }
    Ok(rows)
}
