//! CSV and JSON rendering of harness results.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::HarnessError;
use crate::harness::{CompareTable, LabelRecord, PathsReport, SolveRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(HarnessError::Usage(format!("unknown format `{other}`"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

fn out_err(e: impl fmt::Display) -> HarnessError {
    HarnessError::Output(e.to_string())
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(out_err)?;
    for r in rows {
        w.write_record(r).map_err(out_err)?;
    }
    String::from_utf8(w.into_inner().map_err(out_err)?).map_err(out_err)
}

fn json_text<T: Serialize + ?Sized>(value: &T) -> Result<String, HarnessError> {
    let mut s = serde_json::to_string_pretty(value).map_err(out_err)?;
    s.push('\n');
    Ok(s)
}

/// Flat records of scalar fields.
pub fn render_rows<T: Serialize>(rows: &[T], format: Format) -> Result<String, HarnessError> {
    match format {
        Format::Json => json_text(rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(out_err)?;
            }
            String::from_utf8(w.into_inner().map_err(out_err)?).map_err(out_err)
        }
    }
}

pub fn render_solve(records: &[SolveRecord], format: Format) -> Result<String, HarnessError> {
    match format {
        Format::Json => json_text(records),
        Format::Csv => {
            let header: Vec<String> = [
                "instance",
                "m",
                "n",
                "rule",
                "pivots",
                "status",
                "objective",
                "seconds",
                "path",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.instance.clone(),
                        r.m.to_string(),
                        r.n.to_string(),
                        r.rule.clone(),
                        r.pivots.clone(),
                        r.status.clone(),
                        r.objective.to_string(),
                        r.seconds.to_string(),
                        r.path.join(" "),
                    ]
                })
                .collect();
            csv_text(&header, &rows)
        }
    }
}

/// One row per instance with a count cell per rule, followed by the rules
/// holding the best and second best counts (`;` separated). Failed cells
/// read `error: <message>`.
pub fn render_compare(table: &CompareTable, format: Format) -> Result<String, HarnessError> {
    let names =
        |rules: &[crate::harness::Rule]| rules.iter().map(|r| r.to_string()).collect::<Vec<_>>();
    match format {
        Format::Csv => {
            let mut header = vec!["instance".to_string(), "m".into(), "n".into()];
            header.extend(names(&table.rules));
            header.extend(["best".to_string(), "second".to_string()]);
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|row| {
                    let mut r = vec![row.instance.clone(), row.m.to_string(), row.n.to_string()];
                    r.extend(row.cells.iter().map(|c| match c {
                        Ok(o) => o.label(),
                        Err(e) => format!("error: {e}"),
                    }));
                    r.push(names(&row.best).join(";"));
                    r.push(names(&row.second).join(";"));
                    r
                })
                .collect();
            csv_text(&header, &rows)
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let cells: serde_json::Map<String, Value> = table
                        .rules
                        .iter()
                        .zip(&row.cells)
                        .map(|(rule, c)| {
                            let v = match c {
                                Ok(o) => json!({ "pivots": o.label(), "status": o.status.to_string(), "path": o.path.entering }),
                                Err(e) => json!({ "error": e }),
                            };
                            (rule.to_string(), v)
                        })
                        .collect();
                    json!({
                        "instance": row.instance,
                        "m": row.m,
                        "n": row.n,
                        "cells": cells,
                        "best": names(&row.best),
                        "second": names(&row.second),
                    })
                })
                .collect();
            json_text(&rows)
        }
    }
}

pub fn render_paths(reports: &[PathsReport], format: Format) -> Result<String, HarnessError> {
    match format {
        Format::Json => json_text(reports),
        Format::Csv => {
            let header: Vec<String> = [
                "instance",
                "path",
                "length",
                "objective",
                "indices",
                "names",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            let mut rows = Vec::new();
            for rep in reports {
                for (k, p) in rep.paths.iter().enumerate() {
                    rows.push(vec![
                        rep.instance.clone(),
                        (k + 1).to_string(),
                        p.indices.len().to_string(),
                        p.objective.to_string(),
                        p.indices
                            .iter()
                            .map(|i| i.to_string())
                            .collect::<Vec<_>>()
                            .join(" "),
                        p.names.join(" "),
                    ]);
                }
            }
            csv_text(&header, &rows)
        }
    }
}

/// Discovery curves as long-format CSV (`instance, execution, distinct`).
pub fn render_curves(reports: &[PathsReport]) -> Result<String, HarnessError> {
    let header: Vec<String> = ["instance", "execution", "distinct_paths"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|rep| {
            rep.curve
                .iter()
                .enumerate()
                .map(|(k, c)| vec![rep.instance.clone(), (k + 1).to_string(), c.to_string()])
        })
        .collect();
    csv_text(&header, &rows)
}

/// JSON lines, one record per line.
pub fn render_labels(records: &[LabelRecord]) -> Result<String, HarnessError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(out_err)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ModelRow;

    #[test]
    fn flat_rows_csv() {
        let rows = [ModelRow {
            instance: "a".into(),
            model: 1,
            action: "a1".into(),
            reward: "r1".into(),
            multiplier: 2.0,
            mean_pivots: 3.5,
            mean_seconds: 0.25,
        }];
        let text = render_rows(&rows, Format::Csv).unwrap();
        assert_eq!(text, "instance,model,action,reward,multiplier,mean_pivots,mean_seconds\na,1,a1,r1,2.0,3.5,0.25\n");
        assert!(render_rows(&rows, Format::Json)
            .unwrap()
            .contains("\"mean_pivots\": 3.5"));
    }

    #[test]
    fn format_names() {
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
