//! Record sinks: JSON Lines or CSV.
//!
//! Records are JSON objects with keys in lexicographic order. CSV columns are
//! the keys of the first record in that order; nested values are written as
//! compact JSON text and keys missing from a later record leave empty cells.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    /// One JSON object per line.
    #[default]
    Json,
    /// Comma-separated with a header row.
    Csv,
}

enum Sink {
    Json(Box<dyn Write>),
    Csv {
        writer: csv::Writer<Box<dyn Write>>,
        columns: Option<Vec<String>>,
    },
}

pub struct RecordWriter {
    sink: Sink,
}

fn to_object<T: Serialize>(record: &T) -> Result<Map<String, Value>> {
    match serde_json::to_value(record)? {
        Value::Object(map) => Ok(map),
        other => {
            let mut map = Map::new();
            map.insert("value".into(), other);
            Ok(map)
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        _ => v.to_string(),
    }
}

impl RecordWriter {
    pub fn new(format: Format, out: Box<dyn Write>) -> Self {
        let sink = match format {
            Format::Json => Sink::Json(out),
            Format::Csv => Sink::Csv {
                writer: csv::Writer::from_writer(out),
                columns: None,
            },
        };
        RecordWriter { sink }
    }

    pub fn write<T: Serialize>(&mut self, record: &T) -> Result<()> {
        let map = to_object(record)?;
        match &mut self.sink {
            Sink::Json(out) => {
                serde_json::to_writer(&mut *out, &map)?;
                out.write_all(b"\n")?;
            }
            Sink::Csv { writer, columns } => {
                if columns.is_none() {
                    let header: Vec<String> = map.keys().cloned().collect();
                    writer.write_record(&header)?;
                    *columns = Some(header);
                }
                let cols = columns.as_ref().expect("set above");
                let row: Vec<String> = cols
                    .iter()
                    .map(|k| map.get(k).map(cell).unwrap_or_default())
                    .collect();
                writer.write_record(&row)?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        match self.sink {
            Sink::Json(mut out) => out.flush()?,
            Sink::Csv { writer, .. } => {
                let mut inner = writer
                    .into_inner()
                    .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
                inner.flush()?;
            }
        }
        Ok(())
    }
}
