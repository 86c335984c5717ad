//! Relations loaded from CSV over a schema context.

use std::io::{Read, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::context::{SchemaContext, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple {
    /// Values in schema attribute order.
    pub values: Vec<Value>,
    /// Zero-based data row index in the source (header excluded).
    pub row_id: usize,
}

#[derive(Debug, Error)]
pub enum RelationError {
    #[error("header {found:?} does not match schema attributes {expected:?}")]
    HeaderMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct Relation {
    schema: Arc<SchemaContext>,
    tuples: Vec<Tuple>,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.tuples == other.tuples && *self.schema == *other.schema
    }
}

impl Relation {
    /// Builds a relation from rows already in schema order.
    pub fn from_rows(
        schema: Arc<SchemaContext>,
        rows: Vec<Vec<Value>>,
    ) -> Result<Self, RelationError> {
        let expected = schema.len();
        let tuples = rows
            .into_iter()
            .enumerate()
            .map(|(row_id, values)| {
                if values.len() != expected {
                    return Err(RelationError::RaggedRow {
                        row: row_id,
                        expected,
                        found: values.len(),
                    });
                }
                Ok(Tuple { values, row_id })
            })
            .collect::<Result<_, _>>()?;
        Ok(Relation { schema, tuples })
    }

    /// Reads CSV with a header row. Columns may appear in any order; they are
    /// permuted into schema order.
    pub fn load_csv<R: Read>(schema: Arc<SchemaContext>, source: R) -> Result<Self, RelationError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(source);
        let header: Vec<String> = reader
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let expected: Vec<String> = schema.attribute_names().map(str::to_string).collect();
        let mismatch = || RelationError::HeaderMismatch {
            expected: expected.clone(),
            found: header.clone(),
        };
        if header.len() != expected.len() {
            return Err(mismatch());
        }
        // column index in the file for each schema attribute
        let mut columns = Vec::with_capacity(expected.len());
        for name in &expected {
            let pos = header.iter().position(|h| h == name).ok_or_else(mismatch)?;
            columns.push(pos);
        }
        let mut tuples = Vec::new();
        for (row_id, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != expected.len() {
                return Err(RelationError::RaggedRow {
                    row: row_id,
                    expected: expected.len(),
                    found: record.len(),
                });
            }
            let values = columns
                .iter()
                .map(|&c| Value::parse_cell(&record[c]))
                .collect();
            tuples.push(Tuple { values, row_id });
        }
        Ok(Relation { schema, tuples })
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), RelationError> {
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(self.schema.attribute_names())?;
        for t in &self.tuples {
            writer.write_record(t.values.iter().map(|v| v.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn schema(&self) -> &Arc<SchemaContext> {
        &self.schema
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}
