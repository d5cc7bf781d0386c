//! Deterministic report serialization: sorted keys, floats as `%.15e`.

use std::fmt::Write as _;

use gdo_core::{CheckEntry, CheckReport, Expectation};
use serde_json::Value;

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float(*v),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Value::from(*v),
            Cell::Empty => Value::Null,
        }
    }
}

/// A plot-ready table with fixed column order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn json(&self) -> Value {
        serde_json::json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Everything a command produces.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub report: CheckReport,
    pub data: Option<Value>,
    pub table: Option<Table>,
}

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.15e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn write_json(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => write!(out, "{i}").unwrap(),
            (None, Some(u)) => write!(out, "{u}").unwrap(),
            _ => out.push_str(&float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serialization")),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_json(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("string serialization"));
                out.push(':');
                write_json(out, &map[key]);
            }
            out.push('}');
        }
    }
}

/// Compact JSON with sorted keys; integers stay integers and every other
/// number is printed as `%.15e`.
pub fn to_json_string(v: &Value) -> String {
    let mut s = String::new();
    write_json(&mut s, v);
    s
}

fn entry_value(e: &CheckEntry) -> Value {
    serde_json::to_value(e).expect("check entry serialization")
}

fn expect_str(e: Expectation) -> &'static str {
    match e {
        Expectation::AtMost => "at_most",
        Expectation::Above => "above",
    }
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

pub fn report_render(report: &CheckReport, format: Format) -> Vec<u8> {
    render(
        &Output {
            report: report.clone(),
            ..Output::default()
        },
        format,
    )
}

pub fn render(output: &Output, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut map = serde_json::Map::new();
            map.insert(
                "entries".into(),
                Value::Array(output.report.entries.iter().map(entry_value).collect()),
            );
            if let Some(d) = &output.data {
                map.insert("data".into(), d.clone());
            }
            if let Some(t) = &output.table {
                map.insert("table".into(), t.json());
            }
            let mut s = to_json_string(&Value::Object(map));
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => match &output.table {
            Some(t) => csv_bytes(&t.columns, t.rows.iter().map(|r| r.iter().map(Cell::csv).collect())),
            None => {
                let header: Vec<String> = ["name", "residual", "tolerance", "pass", "boundary_excluded", "expect", "note"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                csv_bytes(
                    &header,
                    output.report.entries.iter().map(|e| {
                        vec![
                            e.name.clone(),
                            float(e.residual),
                            float(e.tolerance),
                            e.pass.to_string(),
                            e.boundary_excluded.to_string(),
                            expect_str(e.expect).to_string(),
                            e.note.clone().unwrap_or_default(),
                        ]
                    }),
                )
            }
        },
        Format::Text => text(output).into_bytes(),
    }
}

fn text(output: &Output) -> String {
    let mut s = String::new();
    if let Some(t) = &output.table {
        let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::csv).collect()).collect();
        let widths: Vec<usize> = (0..t.columns.len())
            .map(|c| cells.iter().map(|r| r[c].len()).chain([t.columns[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |row: &[String]| -> String {
            row.iter()
                .zip(&widths)
                .map(|(v, w)| format!("{v:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        s.push_str(&line(&t.columns));
        s.push('\n');
        for r in &cells {
            s.push_str(&line(r));
            s.push('\n');
        }
    } else if let Some(d) = &output.data {
        s.push_str("data: ");
        s.push_str(&to_json_string(d));
        s.push('\n');
    }
    for e in &output.report.entries {
        let op = match e.expect {
            Expectation::AtMost => "<=",
            Expectation::Above => ">",
        };
        let _ = write!(
            s,
            "{} {}: {} (want {op} {}{})",
            if e.pass { "PASS" } else { "FAIL" },
            e.name,
            float(e.residual),
            float(e.tolerance),
            if e.boundary_excluded { ", boundary excluded" } else { "" }
        );
        if let Some(n) = &e.note {
            let _ = write!(s, " [{n}]");
        }
        s.push('\n');
    }
    let passed = output.report.entries.iter().filter(|e| e.pass).count();
    let _ = writeln!(s, "{passed}/{} checks pass", output.report.entries.len());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_json() {
        assert_eq!(report_render(&CheckReport::new(), Format::Json), b"{\"entries\":[]}\n");
    }

    #[test]
    fn csv_line() {
        let mut r = CheckReport::new();
        r.push(CheckEntry::new("a, b", 1e-13, 1e-12));
        let s = String::from_utf8(report_render(&r, Format::Csv)).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "name,residual,tolerance,pass,boundary_excluded,expect,note");
        assert_eq!(lines[1], "\"a, b\",1.000000000000000e-13,1.000000000000000e-12,true,false,at_most,");
    }

    #[test]
    fn floats_and_key_order() {
        let v = serde_json::json!({"b": 0.5, "a": [1, -2, 2.5e-20], "c": {"z": null, "y": true}});
        assert_eq!(
            to_json_string(&v),
            "{\"a\":[1,-2,2.500000000000000e-20],\"b\":5.000000000000000e-1,\"c\":{\"y\":true,\"z\":null}}"
        );
    }
}
