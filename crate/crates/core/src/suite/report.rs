use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::Value;

use super::Format;
use crate::error::{Error, Result};

pub const SCHEMA: &str = "schurlab-report";
/// Bumped whenever a suite's column set changes.
pub const SCHEMA_VERSION: u32 = 1;

/// One report value. Floats are written with 17 significant digits.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Uint(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Self::Uint(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Uint(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Self::Missing, Self::Float)
    }
}

fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Self::Float(x) => Some(x),
            Self::Uint(v) => Some(v as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Self::Bool(b) => Some(b),
            _ => None,
        }
    }

    fn csv_field(&self) -> String {
        match self {
            Self::Uint(v) => v.to_string(),
            Self::Float(x) => format_float(*x),
            Self::Bool(b) => b.to_string(),
            Self::Text(s) => s.clone(),
            Self::Missing => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Uint(v) => s.serialize_u64(*v),
            Self::Float(x) if x.is_finite() => RawValue::from_string(format_float(*x))
                .map_err(serde::ser::Error::custom)?
                .serialize(s),
            Self::Float(x) => s.serialize_str(&format_float(*x)),
            Self::Bool(b) => s.serialize_bool(*b),
            Self::Text(t) => s.serialize_str(t),
            Self::Missing => s.serialize_unit(),
        }
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct CellVisitor;

        impl Visitor<'_> for CellVisitor {
            type Value = Cell;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, boolean, string or null")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Cell, E> {
                Ok(Cell::Uint(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Cell, E> {
                Ok(if v >= 0 { Cell::Uint(v as u64) } else { Cell::Float(v as f64) })
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Cell, E> {
                Ok(Cell::Float(v))
            }

            fn visit_bool<E: de::Error>(self, v: bool) -> std::result::Result<Cell, E> {
                Ok(Cell::Bool(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Cell, E> {
                Ok(match v {
                    "NaN" => Cell::Float(f64::NAN),
                    "inf" => Cell::Float(f64::INFINITY),
                    "-inf" => Cell::Float(f64::NEG_INFINITY),
                    _ => Cell::Text(v.to_string()),
                })
            }

            fn visit_unit<E: de::Error>(self) -> std::result::Result<Cell, E> {
                Ok(Cell::Missing)
            }

            fn visit_none<E: de::Error>(self) -> std::result::Result<Cell, E> {
                Ok(Cell::Missing)
            }
        }

        d.deserialize_any(CellVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: u64,
    pub violations: u64,
    /// Extremes of the suite's key columns, e.g. `max_ratio_rs1`.
    pub metrics: BTreeMap<String, Cell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub schema_version: u32,
    pub tool_version: String,
    pub suite: String,
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.summary.violations == 0
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a numeric column, `None` where a row has no number.
    pub fn floats(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let c = self
            .column(name)
            .ok_or_else(|| Error::Config(format!("no column `{name}` in suite {}", self.suite)))?;
        Ok(self.rows.iter().map(|r| r[c].as_f64()).collect())
    }
}

pub fn render_report(report: &ExperimentReport, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.columns)?;
            for row in &report.rows {
                w.write_record(row.iter().map(Cell::csv_field))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

pub fn emit_report(report: &ExperimentReport, format: Format, path: &Path) -> Result<()> {
    let text = render_report(report, format)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads a JSON report back.
pub fn load_report(text: &str) -> Result<ExperimentReport> {
    let report: ExperimentReport = serde_json::from_str(text)?;
    if report.schema != SCHEMA {
        return Err(Error::Parse(format!("not a report: schema `{}`", report.schema)));
    }
    if report.schema_version > SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "report schema version {} is newer than {SCHEMA_VERSION}",
            report.schema_version
        )));
    }
    Ok(report)
}
