// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::model::{format_timestamp, parse_timestamp, ActivitySchema, ActivityTuple, ColumnKind, SchemaError, Value};

/// How to read a CSV file into tuples of `schema`. Columns are matched to
/// schema attributes by header name; extra columns are ignored.
#[derive(Debug, Clone)]
pub struct CsvSpec {
    pub schema: ActivitySchema,
    pub delimiter: u8,
}

impl CsvSpec {
    pub fn new(schema: ActivitySchema) -> Self {
        CsvSpec {
            schema,
            delimiter: b',',
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestErrorKind {
    #[error("cannot parse {column} value `{value}` as {expected}")]
    Parse {
        column: String,
        value: String,
        expected: &'static str,
    },
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("duplicate (user, time, action) key, first seen at row {first}")]
    DuplicateKey { first: usize },
    #[error("header lacks column `{0}`")]
    MissingColumn(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("{0}")]
    Schema(#[from] SchemaError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// An ingestion failure. `row` counts data rows from 1 (the header is row 0).
#[derive(Debug, Error)]
pub struct IngestError {
    pub row: usize,
    pub kind: IngestErrorKind,
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.row, &self.kind) {
            (0, IngestErrorKind::Io(_)) => write!(f, "{}", self.kind),
            (0, _) => write!(f, "header: {}", self.kind),
            (row, _) => write!(f, "row {row}: {}", self.kind),
        }
    }
}

impl IngestError {
    fn at(row: usize, kind: IngestErrorKind) -> Self {
        IngestError { row, kind }
    }
}

fn reader<R: Read>(input: R, delimiter: u8) -> ::csv::Reader<R> {
    ::csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(input)
}

fn csv_err(row: usize, e: ::csv::Error) -> IngestError {
    IngestError::at(row, IngestErrorKind::Csv(e.to_string()))
}

/// Reads tuples from CSV text. Every row is parsed or reported with its row
/// number; duplicate primary keys are rejected.
pub fn load_csv_from<R: Read>(input: R, spec: &CsvSpec) -> Result<Vec<ActivityTuple>, IngestError> {
    let mut rdr = reader(input, spec.delimiter);
    let header = rdr.headers().map_err(|e| csv_err(0, e))?.clone();
    let index: HashMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let schema = &spec.schema;
    let positions = schema
        .columns()
        .map(|c| {
            index
                .get(c.name)
                .copied()
                .ok_or_else(|| IngestError::at(0, IngestErrorKind::MissingColumn(c.name.to_string())))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let nd = schema.dimensions().len();
    let mut tuples = Vec::new();
    let mut seen: HashMap<(String, i64, String), usize> = HashMap::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_err(row, e))?;
        let field = |col: usize| -> Result<&str, IngestError> {
            let name = schema.name(crate::model::ColumnId(col));
            match record.get(positions[col]) {
                Some(v) if !v.is_empty() => Ok(v),
                _ => Err(IngestError::at(row, IngestErrorKind::MissingField(name.to_string()))),
            }
        };
        let int = |col: usize, expected: &'static str| -> Result<i64, IngestError> {
            let raw = field(col)?;
            let parsed = if col == 1 {
                parse_timestamp(raw)
            } else {
                raw.parse::<i64>().ok()
            };
            parsed.ok_or_else(|| {
                IngestError::at(
                    row,
                    IngestErrorKind::Parse {
                        column: schema.name(crate::model::ColumnId(col)).to_string(),
                        value: raw.to_string(),
                        expected,
                    },
                )
            })
        };

        let user = field(0)?.to_string();
        let time = int(1, "a timestamp")?;
        let action = field(2)?.to_string();
        let mut dims = Vec::with_capacity(nd);
        for (d, (_, kind)) in schema.dimensions().iter().enumerate() {
            dims.push(match kind {
                ColumnKind::String => Value::Str(field(3 + d)?.to_string()),
                ColumnKind::Integer => Value::Int(int(3 + d, "an integer")?),
            });
        }
        let measures = (0..schema.measures().len())
            .map(|m| int(3 + nd + m, "an integer"))
            .collect::<Result<Vec<_>, _>>()?;

        let key = (user.clone(), time, action.clone());
        if let Some(&first) = seen.get(&key) {
            return Err(IngestError::at(row, IngestErrorKind::DuplicateKey { first }));
        }
        seen.insert(key, row);
        tuples.push(ActivityTuple {
            user,
            time,
            action,
            dims,
            measures,
        });
    }
    Ok(tuples)
}

pub fn load_csv(path: &Path, spec: &CsvSpec) -> Result<Vec<ActivityTuple>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::at(0, e.into()))?;
    load_csv_from(std::io::BufReader::new(file), spec)
}

/// Column roles for [`infer_schema`]. Unset user/time/action default to the
/// first three header columns.
#[derive(Debug, Clone, Default)]
pub struct SchemaHints {
    pub user: Option<String>,
    pub time: Option<String>,
    pub action: Option<String>,
    /// Measure columns. When `None`, every remaining all-integer column is a
    /// measure and everything else is a string dimension.
    pub measures: Option<Vec<String>>,
    /// Remaining columns to treat as integer dimensions.
    pub int_dims: Vec<String>,
}

/// Derives a schema from a CSV header (and, without explicit measures, from
/// the column contents).
pub fn infer_schema_from<R: Read>(input: R, delimiter: u8, hints: &SchemaHints) -> Result<ActivitySchema, IngestError> {
    let mut rdr = reader(input, delimiter);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(0, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let pick = |hint: &Option<String>, pos: usize, what: &str| -> Result<String, IngestError> {
        match hint {
            Some(h) if header.contains(h) => Ok(h.clone()),
            Some(h) => Err(IngestError::at(0, IngestErrorKind::MissingColumn(h.clone()))),
            None => header
                .get(pos)
                .cloned()
                .ok_or_else(|| IngestError::at(0, IngestErrorKind::MissingColumn(what.to_string()))),
        }
    };
    let user = pick(&hints.user, 0, "user")?;
    let time = pick(&hints.time, 1, "time")?;
    let action = pick(&hints.action, 2, "action")?;
    let rest: Vec<&String> = header
        .iter()
        .filter(|h| **h != user && **h != time && **h != action)
        .collect();

    let numeric: Vec<bool> = if hints.measures.is_none() {
        let mut numeric = vec![true; header.len()];
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| csv_err(i + 1, e))?;
            for (c, v) in record.iter().enumerate() {
                if c < numeric.len() && v.parse::<i64>().is_err() {
                    numeric[c] = false;
                }
            }
        }
        numeric
    } else {
        vec![false; header.len()]
    };
    let col_index = |name: &str| header.iter().position(|h| h == name).unwrap();

    let mut dims = Vec::new();
    let mut measures = Vec::new();
    for name in rest {
        let is_measure = match &hints.measures {
            Some(m) => m.contains(name),
            None => numeric[col_index(name)] && !hints.int_dims.contains(name),
        };
        if is_measure {
            measures.push(name.clone());
        } else if hints.int_dims.contains(name) {
            dims.push((name.clone(), ColumnKind::Integer));
        } else {
            dims.push((name.clone(), ColumnKind::String));
        }
    }
    if let Some(m) = &hints.measures {
        if let Some(missing) = m.iter().find(|m| !header.contains(m)) {
            return Err(IngestError::at(0, IngestErrorKind::MissingColumn(missing.clone())));
        }
    }
    ActivitySchema::new(user, time, action, dims, measures).map_err(|e| IngestError::at(0, e.into()))
}

pub fn infer_schema(path: &Path, hints: &SchemaHints) -> Result<ActivitySchema, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::at(0, e.into()))?;
    infer_schema_from(std::io::BufReader::new(file), b',', hints)
}

/// Writes tuples as CSV with a header row; timestamps in ISO-8601.
pub fn write_csv<W: Write>(out: W, schema: &ActivitySchema, tuples: &[ActivityTuple]) -> Result<(), IngestError> {
    let mut w = ::csv::Writer::from_writer(out);
    let io = |e: ::csv::Error| match e.into_kind() {
        ::csv::ErrorKind::Io(e) => IngestError::at(0, e.into()),
        other => IngestError::at(0, IngestErrorKind::Csv(format!("{other:?}"))),
    };
    w.write_record(schema.columns().map(|c| c.name)).map_err(io)?;
    let mut record: Vec<String> = Vec::with_capacity(schema.column_count());
    for t in tuples {
        record.clear();
        record.push(t.user.clone());
        record.push(format_timestamp(t.time));
        record.push(t.action.clone());
        record.extend(t.dims.iter().map(Value::to_string));
        record.extend(t.measures.iter().map(i64::to_string));
        w.write_record(&record).map_err(io)?;
    }
    w.flush().map_err(|e| IngestError::at(0, e.into()))?;
    Ok(())
}
