//! Self-describing output records, emitted as JSON or CSV.

use std::collections::BTreeMap;
use std::io::Write;

use prfauth::analytic::LogProb;
use serde::ser::{SerializeMap, SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

/// Linear probabilities are only printed above this.
const LINEAR_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct OutputRecord {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub summary: BTreeMap<String, Value>,
    pub error: Option<String>,
}

impl OutputRecord {
    pub fn new(command: &str, parameters: BTreeMap<String, Value>, columns: &[&str]) -> Self {
        OutputRecord {
            command: command.to_string(),
            parameters,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            error: None,
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map_or(String::new(), fmt_number)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `log2` value and, when representable, the linear probability.
pub fn prob_cells(p: LogProb) -> [Option<f64>; 2] {
    [Some(p.log2()), p.to_linear().filter(|&x| x > LINEAR_FLOOR)]
}

fn fmt_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        // shortest round-trip form, exponent notation for tiny values
        serde_json::to_string(&x).expect("finite")
    }
}

struct Cell(Option<f64>);

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            None => s.serialize_none(),
            Some(x) if x.is_finite() => s.serialize_f64(x),
            // JSON has no infinities
            Some(x) => s.serialize_str(&fmt_number(x)),
        }
    }
}

struct Row<'a>(&'a [String], &'a [Option<f64>]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, &Cell(*v))?;
        }
        m.end()
    }
}

struct Rows<'a>(&'a OutputRecord);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
        for r in &self.0.rows {
            seq.serialize_element(&Row(&self.0.columns, r))?;
        }
        seq.end()
    }
}

impl Serialize for OutputRecord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OutputRecord", 7)?;
        st.serialize_field("schema_version", SCHEMA_VERSION)?;
        st.serialize_field("command", &self.command)?;
        st.serialize_field("parameters", &self.parameters)?;
        st.serialize_field("columns", &self.columns)?;
        st.serialize_field("rows", &Rows(self))?;
        if !self.summary.is_empty() {
            st.serialize_field("summary", &self.summary)?;
        }
        if let Some(e) = &self.error {
            st.serialize_field("error", e)?;
        }
        st.end()
    }
}
