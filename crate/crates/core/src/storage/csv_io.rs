//! CSV load and dump.
//!
//! Dialect: comma separated, double-quote quoting with doubled quotes as the
//! escape, UTF-8, header row first, `\n` record terminator. Headers must
//! name every column of the table exactly once, in any order.

use std::io::{Read, Write};

use csv::{QuoteStyle, ReaderBuilder, Terminator, WriterBuilder};

use super::StorageError;
use crate::catalog::{Database, TableDef, ValidationError};
use crate::value::{Row, Value};

fn position_line(err: &csv::Error) -> u64 {
    err.position().map(|p| p.line()).unwrap_or(0)
}

/// Maps each table column to its index in the CSV header.
fn header_mapping(def: &TableDef, header: &csv::StringRecord) -> Result<Vec<usize>, StorageError> {
    let mismatch = |detail: String| StorageError::HeaderMismatch { table: def.name().to_owned(), detail };
    if header.len() != def.arity() {
        return Err(mismatch(format!("expected {} columns, found {}", def.arity(), header.len())));
    }
    let fields: Vec<&str> = header.iter().collect();
    for (i, f) in fields.iter().enumerate() {
        if fields[..i].contains(f) {
            return Err(mismatch(format!("column `{f}` appears twice")));
        }
        if def.column_position(f).is_none() {
            return Err(mismatch(format!("unknown column `{f}`")));
        }
    }
    Ok(def
        .columns()
        .iter()
        .map(|c| fields.iter().position(|f| *f == c.name).expect("every header field is a column"))
        .collect())
}

/// Parses textual fields (in column order) into a typed row.
pub(crate) fn parse_fields<'a>(
    def: &TableDef,
    fields: impl ExactSizeIterator<Item = &'a str>,
) -> Result<Row, ValidationError> {
    if fields.len() != def.arity() {
        return Err(ValidationError::ArityMismatch {
            table: def.name().to_owned(),
            expected: def.arity(),
            got: fields.len(),
        });
    }
    fields
        .zip(def.columns())
        .map(|(text, col)| {
            col.col_type.parse_value(text).ok_or_else(|| ValidationError::TypeMismatch {
                table: def.name().to_owned(),
                column: col.name.clone(),
                expected: col.col_type.to_string(),
            })
        })
        .collect()
}

impl Database {
    /// Parses one row given as text fields in column order.
    pub fn parse_row(&self, table: &str, fields: &[&str]) -> Result<Row, ValidationError> {
        let t = self.table(table).ok_or_else(|| ValidationError::UnknownTable(table.to_owned()))?;
        parse_fields(t.def(), fields.iter().copied())
    }

    /// Parses a primary key given as text fields in key order.
    pub fn parse_key(&self, table: &str, fields: &[&str]) -> Result<Vec<Value>, ValidationError> {
        let t = self.table(table).ok_or_else(|| ValidationError::UnknownTable(table.to_owned()))?;
        let def = t.def();
        if fields.len() != def.pk_positions().len() {
            return Err(ValidationError::ArityMismatch {
                table: table.to_owned(),
                expected: def.pk_positions().len(),
                got: fields.len(),
            });
        }
        fields
            .iter()
            .zip(def.pk_positions())
            .map(|(text, &p)| {
                let col = &def.columns()[p];
                col.col_type.parse_value(text).ok_or_else(|| ValidationError::TypeMismatch {
                    table: table.to_owned(),
                    column: col.name.clone(),
                    expected: col.col_type.to_string(),
                })
            })
            .collect()
    }

    /// Loads every data row of a CSV source into `table`. All or nothing: on
    /// any error the table is left exactly as it was.
    pub fn load_csv<R: Read>(&mut self, table: &str, source: R) -> Result<usize, StorageError> {
        let original_len = self.table(table).ok_or_else(|| StorageError::UnknownTable(table.to_owned()))?.len();
        match self.load_csv_inner(table, source) {
            Ok(n) => Ok(n),
            Err(e) => {
                self.table_mut(table).expect("exists").store.truncate(original_len);
                Err(e)
            }
        }
    }

    fn load_csv_inner<R: Read>(&mut self, table: &str, source: R) -> Result<usize, StorageError> {
        let mut reader = ReaderBuilder::new().has_headers(true).flexible(false).from_reader(source);
        let header = reader
            .headers()
            .map_err(|e| StorageError::MalformedCsv { line: position_line(&e).max(1), detail: e.to_string() })?
            .clone();
        let def = self.table(table).expect("checked by caller").def().clone();
        let mapping = header_mapping(&def, &header)?;
        let mut count = 0;
        for record in reader.records() {
            let record =
                record.map_err(|e| StorageError::MalformedCsv { line: position_line(&e), detail: e.to_string() })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let row = parse_fields(&def, mapping.iter().map(|&i| &record[i]))
                .map_err(|source| StorageError::InvalidRow { line, source })?;
            self.insert(table, row).map_err(|source| StorageError::InvalidRow { line, source })?;
            count += 1;
        }
        Ok(count)
    }

    /// Writes `table` as CSV: header in column order, then rows in insertion
    /// order. Booleans are `0`/`1`; decimals carry no trailing zeros.
    pub fn dump_csv<W: Write>(&self, table: &str, sink: W) -> Result<(), StorageError> {
        let t = self.table(table).ok_or_else(|| StorageError::UnknownTable(table.to_owned()))?;
        let mut writer = WriterBuilder::new()
            .terminator(Terminator::Any(b'\n'))
            .quote_style(QuoteStyle::Necessary)
            .from_writer(sink);
        let csv_err = |e: csv::Error| match e.into_kind() {
            csv::ErrorKind::Io(io) => StorageError::Io(io),
            other => StorageError::MalformedCsv { line: 0, detail: format!("{other:?}") },
        };
        writer.write_record(t.def().columns().iter().map(|c| c.name.as_str())).map_err(csv_err)?;
        for row in t.store().rows() {
            writer.write_record(row.iter().map(Value::render)).map_err(csv_err)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn dump_csv_bytes(&self, table: &str) -> Result<Vec<u8>, StorageError> {
        let mut out = Vec::new();
        self.dump_csv(table, &mut out)?;
        Ok(out)
    }
}
