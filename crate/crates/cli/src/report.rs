use std::io::{self, Write};
use std::path::{Path, PathBuf};

use exclusia_core::{ObservableReport, ProcessParams};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::CliError;

pub const SCHEMA: u64 = 1;
pub const OUT_DIR_VAR: &str = "EXCLUSIA_OUT_DIR";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn num(x: f64) -> Value {
    Value::from(x)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}

pub fn params_json(p: &ProcessParams) -> Value {
    json!({
        "q": num(p.q),
        "alpha": num(p.alpha),
        "beta": num(p.beta),
        "gamma": num(p.gamma),
        "delta": num(p.delta),
        "L": p.sites,
    })
}

pub fn observables_json(r: &ObservableReport) -> Value {
    let mut m = Map::new();
    m.insert("method".into(), r.method.name().into());
    m.insert("current".into(), num(r.current));
    m.insert("currents".into(), nums(&r.currents));
    m.insert("densities".into(), nums(&r.densities));
    m.insert("error".into(), num(r.error));
    if !r.partition_functions.is_empty() {
        m.insert("partition_functions".into(), nums(&r.partition_functions));
    }
    if let Some(p) = &r.probabilities {
        m.insert("probabilities".into(), nums(p));
    }
    Value::Object(m)
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => fmt_f64(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Per-site profile rows for CSV output.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn profile(columns: &[(&str, &[f64])]) -> Table {
        let sites = columns.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
        let mut headers = vec!["site".to_string()];
        headers.extend(columns.iter().map(|(h, _)| h.to_string()));
        let rows = (0..sites)
            .map(|i| {
                let mut row = vec![Cell::Int(i + 1)];
                row.extend(columns.iter().map(|(_, c)| c.get(i).map_or(Cell::Text(String::new()), |&x| Cell::Num(x))));
                row
            })
            .collect();
        Table { headers, rows }
    }
}

/// What a subcommand produced. A residual failure still carries its
/// report, which is written before the exit code is set.
pub struct Outcome {
    pub body: Map<String, Value>,
    pub table: Option<Table>,
    pub failure: Option<CliError>,
}

impl Outcome {
    pub fn new(body: Map<String, Value>) -> Self {
        Outcome { body, table: None, failure: None }
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }
}

struct FixedFloats(PrettyFormatter<'static>);

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(v: &Value) -> Vec<u8> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    v.serialize(&mut ser).expect("serializing a Value into memory cannot fail");
    buf.push(b'\n');
    buf
}

pub fn to_csv(t: &Table) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Output(format!("csv: {e}"));
    w.write_record(&t.headers).map_err(err)?;
    for row in &t.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Output(format!("csv: {e}")))
}

/// Destination of a report: `None` means stdout.
pub fn destination(out: Option<&Path>, out_dir: Option<&Path>, command: &str, format: Format) -> Option<PathBuf> {
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    match (out, out_dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(format!("{command}.{ext}"))),
        (None, None) => None,
    }
}

pub fn write(bytes: &[u8], dest: Option<&Path>) -> Result<(), CliError> {
    match dest {
        None => io::stdout().lock().write_all(bytes).map_err(|e| CliError::Output(format!("stdout: {e}"))),
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(p, bytes).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))
        }
    }
}
