//! Row validation and whole-database integrity checks.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::{CheckConstraint, Database, ForeignKey, TableDef};
use crate::value::Value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("table `{table}`: expected {expected} values, got {got}")]
    ArityMismatch { table: String, expected: usize, got: usize },
    #[error("table `{table}`: value for column `{column}` is not of type {expected}")]
    TypeMismatch { table: String, column: String, expected: String },
    #[error("table `{table}`: duplicate primary key {key}")]
    DuplicateKey { table: String, key: String },
    #[error("table `{table}`: foreign key {fk} violated by value {value}")]
    ForeignKeyViolation { table: String, fk: String, value: String },
    #[error("table `{table}`: check constraint violated: {constraint}")]
    CheckViolation { table: String, constraint: String },
    #[error("table `{table}`: no row with key {key}")]
    KeyNotFound { table: String, key: String },
    #[error("table `{table}`: row {key} is still referenced by `{referencing}`")]
    RowReferenced { table: String, key: String, referencing: String },
}

/// What an integrity violation is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    Arity,
    Type { column: String },
    DuplicateKey,
    ForeignKey { fk: String, value: String },
    Check { constraint: String },
}

/// One failed constraint found by [`Database::check_integrity`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub table: String,
    pub row_key: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: ", self.table, self.row_key)?;
        match &self.kind {
            ViolationKind::Arity => write!(f, "wrong number of values"),
            ViolationKind::Type { column } => write!(f, "type mismatch in `{column}`"),
            ViolationKind::DuplicateKey => write!(f, "duplicate primary key"),
            ViolationKind::ForeignKey { fk, value } => write!(f, "foreign key {fk} has no match for {value}"),
            ViolationKind::Check { constraint } => write!(f, "check failed: {constraint}"),
        }
    }
}

pub(crate) fn format_key(values: &[Value]) -> String {
    let parts: Vec<String> = values.iter().map(Value::render).collect();
    format!("({})", parts.join(", "))
}

/// Primary-key tuple of `row` under `def`.
pub(crate) fn pk_of(def: &TableDef, row: &[Value]) -> Vec<Value> {
    def.pk_positions().iter().map(|&p| row[p].clone()).collect()
}

/// The referenced key tuple, arranged in the foreign table's key order.
pub(crate) fn fk_target_key(def: &TableDef, fk: &ForeignKey, foreign: &TableDef, row: &[Value]) -> Vec<Value> {
    foreign
        .primary_key()
        .iter()
        .map(|pk_col| {
            let j = fk.foreign_columns.iter().position(|c| c == pk_col).expect("fk covers the foreign key");
            let local = def.column_position(&fk.local_columns[j]).expect("fk column exists");
            row[local].clone()
        })
        .collect()
}

pub(crate) fn fk_local_values(def: &TableDef, fk: &ForeignKey, row: &[Value]) -> Vec<Value> {
    fk.local_columns.iter().map(|c| row[def.column_position(c).expect("fk column exists")].clone()).collect()
}

fn check_holds(def: &TableDef, check: &CheckConstraint, row: &[Value]) -> bool {
    match check {
        CheckConstraint::ExactlyOneTrue(cols) => {
            cols.iter()
                .filter(|c| matches!(row[def.column_position(c).expect("check column exists")], Value::Bool(true)))
                .count()
                == 1
        }
    }
}

/// Checks that do not look at other rows: arity, types, check constraints.
pub(crate) fn validate_shape(def: &TableDef, row: &[Value]) -> Result<(), ValidationError> {
    if row.len() != def.arity() {
        return Err(ValidationError::ArityMismatch {
            table: def.name().to_owned(),
            expected: def.arity(),
            got: row.len(),
        });
    }
    for (value, col) in row.iter().zip(def.columns()) {
        if value.column_type() != col.col_type {
            return Err(ValidationError::TypeMismatch {
                table: def.name().to_owned(),
                column: col.name.clone(),
                expected: col.col_type.to_string(),
            });
        }
    }
    for check in def.checks() {
        if !check_holds(def, check, row) {
            return Err(ValidationError::CheckViolation {
                table: def.name().to_owned(),
                constraint: check.to_string(),
            });
        }
    }
    Ok(())
}

impl Database {
    /// Decides whether `row` could be inserted into `table` right now.
    pub fn validate_row(&self, table: &str, row: &[Value]) -> Result<(), ValidationError> {
        self.validate_row_excluding(table, row, None)
    }

    /// Like [`validate_row`](Self::validate_row), but treats the row at
    /// position `replacing` as absent (used by updates).
    pub(crate) fn validate_row_excluding(
        &self,
        table: &str,
        row: &[Value],
        replacing: Option<usize>,
    ) -> Result<(), ValidationError> {
        let t = self.table(table).ok_or_else(|| ValidationError::UnknownTable(table.to_owned()))?;
        let def = t.def();
        validate_shape(def, row)?;
        let key = pk_of(def, row);
        if let Some(pos) = t.store.lookup_pk(&key) {
            if Some(pos) != replacing {
                return Err(ValidationError::DuplicateKey { table: table.to_owned(), key: format_key(&key) });
            }
        }
        for fk in def.foreign_keys() {
            let foreign = self.table(&fk.foreign_table).expect("fk targets are registered");
            let target = fk_target_key(def, fk, foreign.def(), row);
            let found =
                foreign.store.lookup_pk(&target).is_some_and(|p| !(fk.foreign_table == table && Some(p) == replacing));
            let self_ref = fk.foreign_table == table && target == key;
            if !found && !self_ref {
                return Err(ValidationError::ForeignKeyViolation {
                    table: table.to_owned(),
                    fk: fk.to_string(),
                    value: format_key(&fk_local_values(def, fk, row)),
                });
            }
        }
        Ok(())
    }

    /// Re-derives every constraint from the stored rows alone (indexes are
    /// not consulted). Empty iff the database is consistent.
    pub fn check_integrity(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut keysets: HashMap<&str, HashSet<Vec<Value>>> = HashMap::new();
        for t in self.tables() {
            let def = t.def();
            let mut seen = HashSet::new();
            for row in t.store.rows() {
                if row.len() != def.arity() {
                    violations.push(Violation {
                        table: def.name().to_owned(),
                        row_key: format_key(row),
                        kind: ViolationKind::Arity,
                    });
                    continue;
                }
                let key = pk_of(def, row);
                if !seen.insert(key.clone()) {
                    violations.push(Violation {
                        table: def.name().to_owned(),
                        row_key: format_key(&key),
                        kind: ViolationKind::DuplicateKey,
                    });
                }
            }
            keysets.insert(def.name(), seen);
        }
        for t in self.tables() {
            let def = t.def();
            for row in t.store.rows().iter().filter(|r| r.len() == def.arity()) {
                let row_key = format_key(&pk_of(def, row));
                let mut push =
                    |kind| violations.push(Violation { table: def.name().to_owned(), row_key: row_key.clone(), kind });
                for (value, col) in row.iter().zip(def.columns()) {
                    if value.column_type() != col.col_type {
                        push(ViolationKind::Type { column: col.name.clone() });
                    }
                }
                for check in def.checks() {
                    if !check_holds(def, check, row) {
                        push(ViolationKind::Check { constraint: check.to_string() });
                    }
                }
                for fk in def.foreign_keys() {
                    let foreign = self.table(&fk.foreign_table).expect("fk targets are registered");
                    let target = fk_target_key(def, fk, foreign.def(), row);
                    if !keysets[fk.foreign_table.as_str()].contains(&target) {
                        push(ViolationKind::ForeignKey {
                            fk: fk.to_string(),
                            value: format_key(&fk_local_values(def, fk, row)),
                        });
                    }
                }
            }
        }
        violations
    }
}
