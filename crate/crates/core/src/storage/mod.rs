//! Row storage, secondary indexes and CSV ingestion.
//!
//! Everything here hangs off [`Database`]: writes validate through
//! [`Database::validate_row`] first, so the store never holds a row that
//! breaks a declared constraint.

mod csv_io;
mod dataset;
mod rowstore;

use std::io;

use thiserror::Error;

use crate::catalog::{Database, ValidationError};
use crate::value::{Row, Value};

pub use dataset::{csv_file_name, MANIFEST_FILE};
pub use rowstore::RowStore;

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("table `{table}` has no column `{column}`")]
    UnknownColumn { table: String, column: String },
    #[error("table `{table}`: CSV header mismatch: {detail}")]
    HeaderMismatch { table: String, detail: String },
    #[error("line {line}: malformed CSV: {detail}")]
    MalformedCsv { line: u64, detail: String },
    #[error("line {line}: {source}")]
    InvalidRow { line: u64, source: ValidationError },
    #[error("{file}: {source}")]
    InFile { file: String, source: Box<StorageError> },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl StorageError {
    /// The innermost error, looking through file annotations.
    pub fn root(&self) -> &StorageError {
        match self {
            StorageError::InFile { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Handle to a secondary equality index on one table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexHandle {
    table: String,
    columns: Vec<usize>,
}

impl IndexHandle {
    pub fn table(&self) -> &str {
        &self.table
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }
}

impl Database {
    /// Validates and appends a row; returns its position in the table.
    pub fn insert(&mut self, table: &str, row: Row) -> Result<usize, ValidationError> {
        self.validate_row(table, &row)?;
        Ok(self.table_mut(table).expect("validated").store.push(row))
    }

    /// All rows of `table` in insertion order.
    pub fn scan(&self, table: &str) -> Result<std::slice::Iter<'_, Row>, StorageError> {
        self.table(table).map(|t| t.store.rows().iter()).ok_or_else(|| StorageError::UnknownTable(table.to_owned()))
    }

    pub fn build_index(&mut self, table: &str, columns: &[&str]) -> Result<IndexHandle, StorageError> {
        let t = self.table_mut(table).ok_or_else(|| StorageError::UnknownTable(table.to_owned()))?;
        let positions = columns
            .iter()
            .map(|c| {
                t.def
                    .column_position(c)
                    .ok_or_else(|| StorageError::UnknownColumn { table: table.to_owned(), column: c.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        t.store.ensure_index(&positions);
        Ok(IndexHandle { table: table.to_owned(), columns: positions })
    }

    /// Rows whose indexed columns equal `key`, in insertion order.
    pub fn lookup(&self, index: &IndexHandle, key: &[Value]) -> Result<Vec<&Row>, StorageError> {
        let t = self.table(&index.table).ok_or_else(|| StorageError::UnknownTable(index.table.clone()))?;
        let positions = t.store.index_lookup(&index.columns, key).unwrap_or(&[]);
        Ok(positions.iter().map(|&p| &t.store.rows()[p]).collect())
    }

    /// Deletes the row with primary key `key`. Refuses while another row
    /// still references it; there is no cascading.
    pub fn delete_row(&mut self, table: &str, key: &[Value]) -> Result<Row, ValidationError> {
        use crate::catalog::integrity::{fk_target_key, format_key};
        let t = self.table(table).ok_or_else(|| ValidationError::UnknownTable(table.to_owned()))?;
        let pos = t
            .store
            .lookup_pk(key)
            .ok_or_else(|| ValidationError::KeyNotFound { table: table.to_owned(), key: format_key(key) })?;
        let target_def = t.def();
        for child in self.tables() {
            for fk in child.def().foreign_keys().iter().filter(|fk| fk.foreign_table == table) {
                let referenced = child.store.rows().iter().enumerate().any(|(i, r)| {
                    !(child.name() == table && i == pos) && fk_target_key(child.def(), fk, target_def, r) == key
                });
                if referenced {
                    return Err(ValidationError::RowReferenced {
                        table: table.to_owned(),
                        key: format_key(key),
                        referencing: child.name().to_owned(),
                    });
                }
            }
        }
        Ok(self.table_mut(table).expect("exists").store.remove(pos))
    }

    /// Replaces the row sharing `row`'s primary key; returns the old row.
    pub fn update_row(&mut self, table: &str, row: Row) -> Result<Row, ValidationError> {
        use crate::catalog::integrity::{format_key, pk_of};
        let t = self.table(table).ok_or_else(|| ValidationError::UnknownTable(table.to_owned()))?;
        crate::catalog::integrity::validate_shape(t.def(), &row)?;
        let key = pk_of(t.def(), &row);
        let pos = t
            .store
            .lookup_pk(&key)
            .ok_or_else(|| ValidationError::KeyNotFound { table: table.to_owned(), key: format_key(&key) })?;
        self.validate_row_excluding(table, &row, Some(pos))?;
        Ok(self.table_mut(table).expect("exists").store.replace(pos, row))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin_schema, HUB_TABLE};

    fn platform(id: i64, name: &str) -> Row {
        vec![Value::Int(id), Value::text(name)]
    }

    fn show(id: i64) -> Row {
        vec![Value::Int(id), Value::Int(2000), Value::text("W"), Value::text("Drama")]
    }

    #[test]
    fn first_insert_is_position_zero() {
        let mut db = builtin_schema();
        assert_eq!(db.insert("Platforms", platform(1, "Netflix")), Ok(0));
        assert!(matches!(db.insert("Platforms", platform(1, "Voot")), Err(ValidationError::DuplicateKey { .. })));
    }

    #[test]
    fn scan_preserves_insertion_order() {
        let mut db = builtin_schema();
        assert_eq!(db.scan("Platforms").unwrap().count(), 0);
        for (i, n) in [(3, "c"), (1, "a"), (2, "b")] {
            db.insert("Platforms", platform(i, n)).unwrap();
        }
        let ids: Vec<_> = db.scan("Platforms").unwrap().map(|r| r[0].clone()).collect();
        assert_eq!(ids, [Value::Int(3), Value::Int(1), Value::Int(2)]);
        assert!(matches!(db.scan("nope"), Err(StorageError::UnknownTable(_))));
    }

    #[test]
    fn index_lookup_matches_filtered_scan() {
        let mut db = builtin_schema();
        let nat = ["India", "USA", "India", "Japan", "India"];
        for (i, n) in nat.iter().enumerate() {
            db.insert(
                "Actors",
                vec![Value::Int(i as i64), Value::text("x"), Value::text("Male"), Value::Int(30), Value::text(*n)],
            )
            .unwrap();
        }
        let idx = db.build_index("Actors", &["Nationality"]).unwrap();
        let got = db.lookup(&idx, &[Value::text("India")]).unwrap();
        let want: Vec<_> = db.scan("Actors").unwrap().filter(|r| r[4] == Value::text("India")).collect();
        assert_eq!(got, want);
        assert!(db.lookup(&idx, &[Value::text("Peru")]).unwrap().is_empty());
        // rows inserted after the index exists are indexed too
        db.insert(
            "Actors",
            vec![Value::Int(9), Value::text("y"), Value::text("Female"), Value::Int(20), Value::text("Peru")],
        )
        .unwrap();
        assert_eq!(db.lookup(&idx, &[Value::text("Peru")]).unwrap().len(), 1);
        assert!(matches!(db.build_index("Actors", &["Height"]), Err(StorageError::UnknownColumn { .. })));
    }

    #[test]
    fn pk_index_has_one_row_per_key() {
        let mut db = builtin_schema();
        for i in 0..5 {
            db.insert("Platforms", platform(i, "p")).unwrap();
        }
        let idx = db.build_index("Platforms", &["Platform_id"]).unwrap();
        for i in 0..5 {
            assert_eq!(db.lookup(&idx, &[Value::Int(i)]).unwrap().len(), 1);
        }
    }

    #[test]
    fn delete_is_restricted_by_references() {
        let mut db = builtin_schema();
        db.insert(HUB_TABLE, show(1)).unwrap();
        db.insert("Director", vec![Value::Int(1), Value::text("D")]).unwrap();
        let err = db.delete_row(HUB_TABLE, &[Value::Int(1)]).unwrap_err();
        assert!(matches!(err, ValidationError::RowReferenced { ref referencing, .. } if referencing == "Director"));
        db.delete_row("Director", &[Value::Int(1)]).unwrap();
        db.delete_row(HUB_TABLE, &[Value::Int(1)]).unwrap();
        assert!(matches!(db.delete_row(HUB_TABLE, &[Value::Int(1)]), Err(ValidationError::KeyNotFound { .. })));
        assert!(db.check_integrity().is_empty());
    }

    #[test]
    fn update_replaces_non_key_columns() {
        let mut db = builtin_schema();
        db.insert("Platforms", platform(1, "Netflx")).unwrap();
        let old = db.update_row("Platforms", platform(1, "Netflix")).unwrap();
        assert_eq!(old[1], Value::text("Netflx"));
        assert_eq!(db.scan("Platforms").unwrap().next().unwrap()[1], Value::text("Netflix"));
        assert!(matches!(db.update_row("Platforms", platform(2, "x")), Err(ValidationError::KeyNotFound { .. })));
    }
}
