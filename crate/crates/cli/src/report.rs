use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

pub const SCHEMA: &str = "kreinlab-report/1";

/// How a measured value is compared with its bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub tag: String,
    pub description: String,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= tolerance`. NaN never passes.
    pub fn at_most(tag: &str, description: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            tag: tag.to_string(),
            description: description.into(),
            value,
            relation: Relation::AtMost,
            tolerance,
            passed: value <= tolerance,
        }
    }

    pub fn at_least(tag: &str, description: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            tag: tag.to_string(),
            description: description.into(),
            value,
            relation: Relation::AtLeast,
            tolerance: bound,
            passed: value >= bound,
        }
    }
}

/// A named table for CSV output.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip formatting, shared by every CSV cell.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(config: &RunConfig) -> Self {
        Report {
            schema: SCHEMA,
            version: kreinlab::VERSION,
            command: config.command.clone(),
            config: config.clone(),
            seed: config.seed,
            passed: true,
            checks: Vec::new(),
            data: Value::Object(Default::default()),
            tables: Vec::new(),
        }
    }

    pub fn check(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report data serializes");
        self.data.as_object_mut().expect("data is an object").insert(key.to_string(), v);
    }
}

/// The `suite` command wraps one report per subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub reports: Vec<Report>,
}

#[derive(Debug)]
pub struct CsvUnavailable(pub String);

impl fmt::Display for CsvUnavailable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "command `{}` has no table output; use --format json", self.0)
    }
}

/// Every table in sequence. Each starts with its own header record whose
/// first field is `table`, and every data record starts with the table name.
pub fn render_csv(report: &Report) -> Result<String, CsvUnavailable> {
    if report.tables.is_empty() {
        return Err(CsvUnavailable(report.command.clone()));
    }
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for t in &report.tables {
        let header = std::iter::once("table".to_string()).chain(t.headers.iter().cloned());
        w.write_record(header).expect("in-memory write");
        for row in &t.rows {
            w.write_record(std::iter::once(t.name.as_str()).chain(row.iter().map(String::as_str)))
                .expect("in-memory write");
        }
    }
    let bytes = w.into_inner().expect("in-memory flush");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
