//! Reports and their JSON / CSV renderings.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

/// Version of every report layout emitted by the tool.
pub const SCHEMA_VERSION: &str = "1.0.0";

pub fn report_schema_version() -> &'static str {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    /// Exact rational printed as num/den.
    Ratio(i128, i128),
    List(Vec<Cell>),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Vec<T>> for Cell {
    fn from(v: Vec<T>) -> Self {
        Cell::List(v.into_iter().map(Into::into).collect())
    }
}

/// 17 significant digits; non-finite values spelled out.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Ratio(n, d) => format!("{n}/{d}"),
            Cell::List(v) => v.iter().map(Cell::text).collect::<Vec<_>>().join(";"),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => {
                Value::Number(Number::from_str(&fmt_num(*v)).expect("formatted float is valid JSON"))
            }
            Cell::Num(v) => Value::String(fmt_num(*v)),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Ratio(..) => Value::String(self.text()),
            Cell::List(v) => Value::Array(v.iter().map(Cell::json).collect()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub params: Vec<(String, Cell)>,
    pub summary: Vec<(String, Cell)>,
    pub table: Option<Table>,
    /// Set when a checked contract fails; the tool then exits with status 1.
    pub violation: Option<String>,
    pub default_format: Format,
}

impl Report {
    pub fn new(command: &str, default_format: Format) -> Self {
        Report {
            command: command.into(),
            params: Vec::new(),
            summary: Vec::new(),
            table: None,
            violation: None,
            default_format,
        }
    }

    pub fn param(&mut self, key: &str, v: impl Into<Cell>) -> &mut Self {
        self.params.push((key.into(), v.into()));
        self
    }

    pub fn sum(&mut self, key: &str, v: impl Into<Cell>) -> &mut Self {
        self.summary.push((key.into(), v.into()));
        self
    }

    pub fn violate(&mut self, msg: impl Into<String>) {
        if self.violation.is_none() {
            self.violation = Some(msg.into());
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        let obj = |pairs: &[(String, Cell)]| {
            Value::Object(pairs.iter().map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>())
        };
        let mut root = Map::new();
        root.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        root.insert("command".into(), Value::from(self.command.clone()));
        root.insert("params".into(), obj(&self.params));
        root.insert("summary".into(), obj(&self.summary));
        if let Some(t) = &self.table {
            let rows = t
                .rows
                .iter()
                .map(|r| {
                    Value::Object(
                        t.header.iter().cloned().zip(r.iter().map(Cell::json)).collect::<Map<_, _>>(),
                    )
                })
                .collect();
            root.insert("rows".into(), Value::Array(rows));
        }
        root.insert(
            "violation".into(),
            self.violation.clone().map_or(Value::Null, Value::from),
        );
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes");
        s.push('\n');
        s
    }

    /// Metadata as `# key=value` lines, then the table; without a table, key,value rows.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema_version={SCHEMA_VERSION}\n# command={}\n", self.command);
        for (k, v) in &self.params {
            out.push_str(&format!("# {k}={}\n", v.text()));
        }
        if let Some(v) = &self.violation {
            out.push_str(&format!("# violation={v}\n"));
        }
        match &self.table {
            Some(t) => {
                for (k, v) in &self.summary {
                    out.push_str(&format!("# {k}={}\n", v.text()));
                }
                out.push_str(&csv_line(t.header.iter().cloned()));
                for r in &t.rows {
                    out.push_str(&csv_line(r.iter().map(Cell::text)));
                }
            }
            None => {
                out.push_str("key,value\n");
                for (k, v) in &self.summary {
                    out.push_str(&csv_line([k.clone(), v.text()].into_iter()));
                }
            }
        }
        out
    }
}

fn csv_field(s: String) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn csv_line(fields: impl Iterator<Item = String>) -> String {
    let mut line = fields.map(csv_field).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(fmt_num(2.0 / 3.0), "6.6666666666666663e-1");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        let back: f64 = fmt_num(0.1).parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn json_keeps_the_printed_digits() {
        let mut r = Report::new("x", Format::Json);
        r.sum("v", 0.1);
        assert!(r.to_json().contains("1.0000000000000001e-1"));
    }

    #[test]
    fn csv_quotes_separators() {
        let mut r = Report::new("x", Format::Csv);
        let mut t = Table::new(&["a"]);
        t.push(vec![Cell::Text("1,2".into())]);
        r.table = Some(t);
        assert!(r.to_csv().ends_with("a\n\"1,2\"\n"));
    }
}
