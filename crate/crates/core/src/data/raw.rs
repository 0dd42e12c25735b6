use std::fs::File;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Unparsed CSV contents: header plus string fields, no type coercion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub source_path: PathBuf,
}

impl RawTable {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn get(&self, row: usize, column: &str) -> Result<&str> {
        let j = self.column_index(column)?;
        Ok(self.rows[row][j].as_str())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Reads a semicolon-delimited file whose first line is the header.
///
/// Rows are numbered from 1 (first data line) in error messages.
pub fn load_raw(path: impl AsRef<Path>) -> Result<RawTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b';')
        .has_headers(true)
        .flexible(true)
        .from_reader(file);

    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::ColumnCount {
                row: i + 1,
                expected: header.len(),
                found: record.len(),
            });
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(RawTable {
        header,
        rows,
        source_path: path.to_path_buf(),
    })
}
