//! Key/value report document and its CSV rendering.

use std::fmt::{self, Write as _};

use malab::rational::{render_exact, to_f64};
use malab::toric::Normalization;
use malab::Rational;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    FdGrid,
    QuadratureOracle,
    /// Closed-form evaluation in floating point (no discretization).
    FloatingPoint,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Exact => "exact",
            Provenance::FdGrid => "fd-grid",
            Provenance::QuadratureOracle => "quadrature-oracle",
            Provenance::FloatingPoint => "floating-point",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Real(f64),
    Count(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub name: String,
    pub value: Value,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violated,
    HypothesisFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Holds => 0,
            Status::Violated => 1,
            Status::HypothesisFailed => 2,
        }
    }

    pub fn from_holds(holds: bool) -> Self {
        if holds {
            Status::Holds
        } else {
            Status::Violated
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "HOLDS",
            Status::Violated => "VIOLATED",
            Status::HypothesisFailed => "HYPOTHESIS-FAILED",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct Report {
    command: String,
    inputs: Vec<(String, String)>,
    hasher: Sha256,
    normalization: Option<Normalization>,
    records: Vec<Record>,
    verdicts: Vec<(String, String)>,
    notes: Vec<String>,
    table: Option<Table>,
    status: Status,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            hasher,
            normalization: None,
            records: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            table: None,
            status: Status::Holds,
        }
    }

    /// Parameters are echoed and hashed in the order given.
    pub fn input(&mut self, key: &str, value: impl fmt::Display) {
        let value = value.to_string();
        self.hasher.update(format!("\n{key}={value}").as_bytes());
        self.inputs.push((key.to_string(), value));
    }

    /// Hashes file contents under `key` and echoes the path.
    pub fn input_file(&mut self, key: &str, path: &str, contents: &[u8]) {
        self.hasher.update(format!("\n{key}:{}\n", contents.len()).as_bytes());
        self.hasher.update(contents);
        self.inputs.push((key.to_string(), path.to_string()));
    }

    pub fn normalization(&mut self, n: Normalization) {
        self.normalization = Some(n);
    }

    pub fn exact(&mut self, name: impl Into<String>, q: Rational) {
        self.push(name, Value::Exact(q), Provenance::Exact);
    }

    pub fn real(&mut self, name: impl Into<String>, x: f64, provenance: Provenance) {
        self.push(name, Value::Real(x), provenance);
    }

    pub fn count(&mut self, name: impl Into<String>, c: usize, provenance: Provenance) {
        self.push(name, Value::Count(c as u64), provenance);
    }

    fn push(&mut self, name: impl Into<String>, value: Value, provenance: Provenance) {
        self.records.push(Record {
            name: name.into(),
            value,
            provenance,
        });
    }

    pub fn verdict(&mut self, name: impl Into<String>, verdict: impl fmt::Display) {
        self.verdicts.push((name.into(), verdict.to_string()));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn table(&mut self, table: Table) {
        self.table = Some(table);
    }

    pub fn set_status(&mut self, status: Status) {
        self.status = status;
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn digest(&self) -> String {
        format!("{:x}", self.hasher.clone().finalize())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "input {k}: {v}");
        }
        let _ = writeln!(out, "input_digest: sha256:{}", self.digest());
        if let Some(n) = self.normalization {
            let _ = writeln!(out, "normalization: {}", n.name());
        }
        for r in &self.records {
            let _ = writeln!(
                out,
                "record {}: {} provenance={}",
                r.name,
                render_value(&r.value),
                r.provenance
            );
        }
        for (name, v) in &self.verdicts {
            let _ = writeln!(out, "verdict {name}: {v}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(out, "status: {}", self.status);
        out
    }

    /// The command's table when it has one, otherwise the records.
    pub fn render_csv(&self) -> String {
        let table = self.table.clone().unwrap_or_else(|| Table {
            header: ["name", "exact", "decimal", "provenance"].map(String::from).to_vec(),
            rows: self
                .records
                .iter()
                .map(|r| {
                    let (exact, decimal) = match &r.value {
                        Value::Exact(q) => (render_exact(q), to_f64(q).to_string()),
                        Value::Real(x) => (String::new(), x.to_string()),
                        Value::Count(c) => (String::new(), c.to_string()),
                    };
                    vec![r.name.clone(), exact, decimal, r.provenance.to_string()]
                })
                .collect(),
        });
        let mut out = table.header.join(",");
        out.push('\n');
        for row in &table.rows {
            out.push_str(&row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Exact(q) => format!("exact={} decimal={}", render_exact(q), to_f64(q)),
        Value::Real(x) => format!("decimal={x}"),
        Value::Count(c) => format!("value={c}"),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
