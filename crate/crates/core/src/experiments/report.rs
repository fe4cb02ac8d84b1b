//! Tabular experiment reports with CSV and JSON serialization.
//!
//! Exact cells are written as `num/den`, floats with 17 significant digits.
//! A CSV file holds only the header and rows; metadata and check outcomes
//! travel in the JSON form.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use num_rational::BigRational;
use serde_json::{json, Map, Value as Json};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    Label,
    Int,
    Exact,
    Float,
    Bool,
}

impl ColumnKind {
    fn name(&self) -> &'static str {
        match self {
            ColumnKind::Label => "label",
            ColumnKind::Int => "int",
            ColumnKind::Exact => "exact",
            ColumnKind::Float => "float",
            ColumnKind::Bool => "bool",
        }
    }

    fn from_name(s: &str) -> Result<Self> {
        Ok(match s {
            "label" => ColumnKind::Label,
            "int" => ColumnKind::Int,
            "exact" => ColumnKind::Exact,
            "float" => ColumnKind::Float,
            "bool" => ColumnKind::Bool,
            other => return Err(Error::Parse(format!("unknown column kind {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Column { name: name.into(), kind }
    }
}

/// One cell. `Empty` is allowed in any column.
#[derive(Clone, Debug)]
pub enum Value {
    Label(String),
    Int(i64),
    Exact(BigRational),
    Float(f64),
    Bool(bool),
    Empty,
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        use Value::*;
        match (self, other) {
            (Label(a), Label(b)) => a == b,
            (Int(a), Int(b)) => a == b,
            (Exact(a), Exact(b)) => a == b,
            (Float(a), Float(b)) => a.to_bits() == b.to_bits(),
            (Bool(a), Bool(b)) => a == b,
            (Empty, Empty) => true,
            _ => false,
        }
    }
}

impl Value {
    fn kind(&self) -> Option<ColumnKind> {
        match self {
            Value::Label(_) => Some(ColumnKind::Label),
            Value::Int(_) => Some(ColumnKind::Int),
            Value::Exact(_) => Some(ColumnKind::Exact),
            Value::Float(_) => Some(ColumnKind::Float),
            Value::Bool(_) => Some(ColumnKind::Bool),
            Value::Empty => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Exact(q) => Some(crate::exact::rational_to_f64(q)),
            Value::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_label(&self) -> Option<&str> {
        match self {
            Value::Label(s) => Some(s),
            _ => None,
        }
    }

    fn to_cell(&self) -> String {
        match self {
            Value::Label(s) => s.clone(),
            Value::Int(v) => v.to_string(),
            Value::Exact(q) => format_rational(q),
            Value::Float(v) => format_float(*v),
            Value::Bool(b) => b.to_string(),
            Value::Empty => String::new(),
        }
    }

    fn from_cell(kind: ColumnKind, cell: &str) -> Result<Self> {
        if cell.is_empty() && kind != ColumnKind::Label {
            return Ok(Value::Empty);
        }
        Ok(match kind {
            ColumnKind::Label => Value::Label(cell.to_string()),
            ColumnKind::Int => Value::Int(
                cell.parse()
                    .map_err(|e| Error::Parse(format!("integer cell {cell:?}: {e}")))?,
            ),
            ColumnKind::Exact => Value::Exact(parse_rational(cell)?),
            ColumnKind::Float => Value::Float(parse_float(cell)?),
            ColumnKind::Bool => Value::Bool(match cell {
                "true" => true,
                "false" => false,
                _ => return Err(Error::Parse(format!("boolean cell {cell:?}"))),
            }),
        })
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Label(s) => Json::String(s.clone()),
            Value::Int(v) => json!(v),
            Value::Exact(q) => Json::String(format_rational(q)),
            Value::Float(v) if v.is_finite() => json!(v),
            Value::Float(v) => Json::String(format_float(*v)),
            Value::Bool(b) => Json::Bool(*b),
            Value::Empty => Json::Null,
        }
    }

    fn from_json(kind: ColumnKind, v: &Json) -> Result<Self> {
        let bad = || Error::Parse(format!("{} cell {v}", kind.name()));
        if v.is_null() {
            return Ok(Value::Empty);
        }
        Ok(match kind {
            ColumnKind::Label => Value::Label(v.as_str().ok_or_else(bad)?.to_string()),
            ColumnKind::Int => Value::Int(v.as_i64().ok_or_else(bad)?),
            ColumnKind::Exact => Value::Exact(parse_rational(v.as_str().ok_or_else(bad)?)?),
            ColumnKind::Float => match v {
                Json::String(s) => Value::Float(parse_float(s)?),
                _ => Value::Float(v.as_f64().ok_or_else(bad)?),
            },
            ColumnKind::Bool => Value::Bool(v.as_bool().ok_or_else(bad)?),
        })
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<BigRational> for Value {
    fn from(q: BigRational) -> Self {
        Value::Exact(q)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Label(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Label(s)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Empty, Into::into)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|e| Error::Parse(format!("float cell {s:?}: {e}")))
}

/// Outcome of one exact check carried by a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, columns: Vec<Column>) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            metadata: BTreeMap::new(),
            columns,
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    /// Appends a row, checking its shape against the schema.
    pub fn push(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid(format!(
                "{}: row has {} cells, schema has {}",
                self.experiment,
                row.len(),
                self.columns.len()
            )));
        }
        for (cell, col) in row.iter().zip(&self.columns) {
            if let Some(kind) = cell.kind() {
                if kind != col.kind {
                    return Err(Error::invalid(format!(
                        "{}: column {} expects {}, got {}",
                        self.experiment,
                        col.name,
                        col.kind.name(),
                        kind.name()
                    )));
                }
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// All cells of one column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::to_cell)).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads rows written by [`write_csv`](Self::write_csv) against a known
    /// schema; metadata and checks are not part of the CSV form.
    pub fn read_csv<R: Read>(experiment: &str, columns: Vec<Column>, input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers().map_err(csv_error)?.clone();
        if header.len() != columns.len() || header.iter().zip(&columns).any(|(h, c)| h != c.name) {
            return Err(Error::Parse(format!("CSV header does not match the {experiment} schema")));
        }
        let mut report = ExperimentReport::new(experiment, columns);
        for record in r.records() {
            let record = record.map_err(csv_error)?;
            let row = record
                .iter()
                .zip(&report.columns)
                .map(|(cell, col)| Value::from_cell(col.kind, cell))
                .collect::<Result<Vec<_>>>()?;
            report.push(row)?;
        }
        Ok(report)
    }

    pub fn to_json(&self) -> Json {
        let columns: Vec<Json> = self
            .columns
            .iter()
            .map(|c| json!({ "name": c.name, "kind": c.kind.name() }))
            .collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| Json::Array(r.iter().map(Value::to_json).collect()))
            .collect();
        let checks: Vec<Json> = self
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect();
        let metadata: Map<String, Json> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Json::String(v.clone())))
            .collect();
        json!({
            "experiment": self.experiment,
            "metadata": metadata,
            "columns": columns,
            "rows": rows,
            "checks": checks,
        })
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_json()).map_err(|e| Error::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json_str(input: &str) -> Result<Self> {
        let v: Json = serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Json) -> Result<Self> {
        let field = |name: &str| v.get(name).ok_or_else(|| Error::Parse(format!("missing field {name:?}")));
        let str_of = |j: &Json, what: &str| {
            j.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("{what} must be a string")))
        };
        let experiment = str_of(field("experiment")?, "experiment")?;
        let mut columns = Vec::new();
        for c in field("columns")?.as_array().ok_or_else(|| Error::Parse("columns must be an array".into()))? {
            let name = str_of(c.get("name").unwrap_or(&Json::Null), "column name")?;
            let kind = ColumnKind::from_name(&str_of(c.get("kind").unwrap_or(&Json::Null), "column kind")?)?;
            columns.push(Column { name, kind });
        }
        let mut report = ExperimentReport::new(experiment, columns);
        let meta = field("metadata")?
            .as_object()
            .ok_or_else(|| Error::Parse("metadata must be an object".into()))?;
        for (k, val) in meta {
            report.metadata.insert(k.clone(), str_of(val, "metadata value")?);
        }
        for row in field("rows")?.as_array().ok_or_else(|| Error::Parse("rows must be an array".into()))? {
            let cells = row.as_array().ok_or_else(|| Error::Parse("row must be an array".into()))?;
            if cells.len() != report.columns.len() {
                return Err(Error::Parse("row length does not match columns".into()));
            }
            let row = cells
                .iter()
                .zip(&report.columns)
                .map(|(cell, col)| Value::from_json(col.kind, cell))
                .collect::<Result<Vec<_>>>()?;
            report.push(row)?;
        }
        for c in field("checks")?.as_array().ok_or_else(|| Error::Parse("checks must be an array".into()))? {
            let name = str_of(c.get("name").unwrap_or(&Json::Null), "check name")?;
            let passed = c
                .get("passed")
                .and_then(Json::as_bool)
                .ok_or_else(|| Error::Parse("check passed flag must be a boolean".into()))?;
            let detail = str_of(c.get("detail").unwrap_or(&Json::Null), "check detail")?;
            report.checks.push(Check { name, passed, detail });
        }
        Ok(report)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new(
            "sample",
            vec![
                Column::new("kind", ColumnKind::Label),
                Column::new("n", ColumnKind::Int),
                Column::new("exact", ColumnKind::Exact),
                Column::new("value", ColumnKind::Float),
                Column::new("ok", ColumnKind::Bool),
            ],
        );
        r.meta("seed", 7).meta("p", "1/4");
        r.push(vec!["a,b".into(), 3i64.into(), BigRational::new(6.into(), (-4).into()).into(), 0.1f64.into(), true.into()])
            .unwrap();
        r.push(vec!["".into(), Value::Empty, Value::Empty, f64::INFINITY.into(), false.into()]).unwrap();
        r.push(vec!["q\"x".into(), (-1i64).into(), BigRational::from_integer(5.into()).into(), f64::NAN.into(), Value::Empty])
            .unwrap();
        r.check("exact", true, "all equal");
        r
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let s = r.to_csv_string().unwrap();
        assert!(s.starts_with("kind,n,exact,value,ok\n"));
        assert!(s.contains("-3/2"));
        assert!(s.contains("1.0000000000000001e-1"));
        let back = ExperimentReport::read_csv("sample", r.columns.clone(), s.as_bytes()).unwrap();
        assert_eq!(back.rows, r.rows);
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let s = r.to_json_string().unwrap();
        assert_eq!(ExperimentReport::from_json_str(&s).unwrap(), r);
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = ExperimentReport::new("empty", vec![Column::new("x", ColumnKind::Float)]);
        assert_eq!(r.to_csv_string().unwrap(), "x\n");
        let back = ExperimentReport::read_csv("empty", r.columns.clone(), "x\n".as_bytes()).unwrap();
        assert!(back.rows.is_empty());
    }

    #[test]
    fn schema_is_enforced() {
        let mut r = sample();
        assert!(r.push(vec![Value::Empty]).is_err());
        assert!(r.push(vec![1i64.into(), Value::Empty, Value::Empty, Value::Empty, Value::Empty]).is_err());
        assert!(ExperimentReport::read_csv("sample", r.columns.clone(), "a,b\n".as_bytes()).is_err());
        assert!(ExperimentReport::from_json_str("{}").is_err());
        assert!(ExperimentReport::from_json_str("[1,2]").is_err());
    }
}
