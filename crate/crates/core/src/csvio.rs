//! Small helpers shared by the CSV loaders.

use std::fs::File;
use std::path::{Path, PathBuf};

use csv::{Reader, ReaderBuilder, StringRecord};

use crate::Error;

/// Opens a headered, comma-delimited UTF-8 CSV file.
pub(crate) fn open(path: &Path) -> Result<Reader<File>, Error> {
    ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::None)
        .from_path(path)
        .map_err(|e| csv_error(path, e))
}

pub(crate) fn csv_error(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    match err.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            reason: format!("{other:?}"),
        },
    }
}

/// Column positions resolved from a header row.
pub(crate) struct Columns {
    path: PathBuf,
    index: Vec<usize>,
}

impl Columns {
    pub(crate) fn resolve(
        path: &Path,
        headers: &StringRecord,
        required: &[&str],
    ) -> Result<Self, Error> {
        let mut index = Vec::with_capacity(required.len());
        for name in required {
            let pos = headers
                .iter()
                .position(|h| h.trim().trim_start_matches('\u{feff}') == *name)
                .ok_or_else(|| Error::MalformedRow {
                    path: path.to_path_buf(),
                    line: 1,
                    reason: format!("missing column `{name}`"),
                })?;
            index.push(pos);
        }
        Ok(Self {
            path: path.to_path_buf(),
            index,
        })
    }

    /// Field `n` of the required list, trimmed.
    pub(crate) fn get<'r>(&self, record: &'r StringRecord, n: usize) -> &'r str {
        record.get(self.index[n]).unwrap_or("").trim()
    }

    pub(crate) fn malformed(&self, record: &StringRecord, reason: impl Into<String>) -> Error {
        Error::MalformedRow {
            path: self.path.clone(),
            line: line_of(record),
            reason: reason.into(),
        }
    }
}

pub(crate) fn line_of(record: &StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

pub(crate) fn optional(field: &str) -> Option<String> {
    if field.is_empty() {
        None
    } else {
        Some(field.to_string())
    }
}

/// Like [`open`], but rows may carry optional trailing columns.
pub(crate) fn open_flexible(path: &Path) -> Result<Reader<File>, Error> {
    ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))
}
