//! Table definitions and the database container.
//!
//! A [`Database`] owns every [`Table`]: its [`TableDef`] plus the row storage
//! behind it. The built-in OTT schema comes from [`builtin_schema`]; admin
//! sessions may add further tables through [`Database::add_table`].

mod builtin;
mod ddl;
pub(crate) mod integrity;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::storage::RowStore;
use crate::value::ColumnType;

pub use builtin::{builtin_schema, HUB_TABLE};
pub use ddl::quote_ident;
pub use integrity::{ValidationError, Violation, ViolationKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("table `{0}` already exists")]
    DuplicateTable(String),
    #[error("table `{table}` has no columns")]
    NoColumns { table: String },
    #[error("table `{table}`: empty column name")]
    EmptyColumnName { table: String },
    #[error("table `{table}`: duplicate column `{column}`")]
    DuplicateColumn { table: String, column: String },
    #[error("table `{table}`: primary key is empty")]
    EmptyPrimaryKey { table: String },
    #[error("table `{table}`: unknown column `{column}`")]
    UnknownColumn { table: String, column: String },
    #[error("table `{table}`: malformed foreign key: {detail}")]
    MalformedForeignKey { table: String, detail: String },
    #[error("table `{table}`: foreign key references unknown table `{foreign}`")]
    UnknownForeignTable { table: String, foreign: String },
    #[error("table `{table}`: malformed check constraint: {detail}")]
    MalformedCheck { table: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnDef {
    pub name: String,
    pub col_type: ColumnType,
}

impl ColumnDef {
    pub fn new(name: impl Into<String>, col_type: ColumnType) -> Self {
        ColumnDef { name: name.into(), col_type }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForeignKey {
    pub local_columns: Vec<String>,
    pub foreign_table: String,
    pub foreign_columns: Vec<String>,
}

impl ForeignKey {
    pub fn new(local: &[&str], foreign_table: &str, foreign: &[&str]) -> Self {
        ForeignKey {
            local_columns: local.iter().map(|s| s.to_string()).collect(),
            foreign_table: foreign_table.to_owned(),
            foreign_columns: foreign.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for ForeignKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) -> {}({})", self.local_columns.join(", "), self.foreign_table, self.foreign_columns.join(", "))
    }
}

/// Row-level check constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckConstraint {
    /// Exactly one of the listed boolean columns is true.
    ExactlyOneTrue(Vec<String>),
}

impl fmt::Display for CheckConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckConstraint::ExactlyOneTrue(cols) => {
                write!(f, "exactly one true of ({})", cols.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDef {
    name: String,
    columns: Vec<ColumnDef>,
    primary_key: Vec<String>,
    foreign_keys: Vec<ForeignKey>,
    checks: Vec<CheckConstraint>,
    pk_positions: Vec<usize>,
}

impl TableDef {
    /// Builds a definition, checking the invariants that do not depend on
    /// other tables.
    pub fn new(
        name: impl Into<String>,
        columns: Vec<ColumnDef>,
        primary_key: &[&str],
        foreign_keys: Vec<ForeignKey>,
        checks: Vec<CheckConstraint>,
    ) -> Result<Self, SchemaError> {
        let name = name.into();
        if columns.is_empty() {
            return Err(SchemaError::NoColumns { table: name });
        }
        for (i, c) in columns.iter().enumerate() {
            if c.name.is_empty() {
                return Err(SchemaError::EmptyColumnName { table: name });
            }
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(SchemaError::DuplicateColumn { table: name, column: c.name.clone() });
            }
        }
        if primary_key.is_empty() {
            return Err(SchemaError::EmptyPrimaryKey { table: name });
        }
        let position = |col: &str| columns.iter().position(|c| c.name == col);
        let mut pk_positions = Vec::with_capacity(primary_key.len());
        for col in primary_key {
            match position(col) {
                Some(p) if !pk_positions.contains(&p) => pk_positions.push(p),
                Some(_) => return Err(SchemaError::DuplicateColumn { table: name, column: col.to_string() }),
                None => return Err(SchemaError::UnknownColumn { table: name, column: col.to_string() }),
            }
        }
        for fk in &foreign_keys {
            if fk.local_columns.is_empty() || fk.local_columns.len() != fk.foreign_columns.len() {
                return Err(SchemaError::MalformedForeignKey {
                    table: name,
                    detail: format!("{fk}: column lists must be nonempty and of equal length"),
                });
            }
            for col in &fk.local_columns {
                if position(col).is_none() {
                    return Err(SchemaError::UnknownColumn { table: name, column: col.clone() });
                }
            }
        }
        for check in &checks {
            let CheckConstraint::ExactlyOneTrue(cols) = check;
            if cols.is_empty() {
                return Err(SchemaError::MalformedCheck { table: name, detail: "no columns".into() });
            }
            for col in cols {
                match position(col) {
                    Some(p) if columns[p].col_type == ColumnType::Bool => {}
                    Some(_) => {
                        return Err(SchemaError::MalformedCheck {
                            table: name,
                            detail: format!("column `{col}` is not boolean"),
                        })
                    }
                    None => return Err(SchemaError::UnknownColumn { table: name, column: col.clone() }),
                }
            }
        }
        Ok(TableDef {
            name,
            columns,
            primary_key: primary_key.iter().map(|s| s.to_string()).collect(),
            foreign_keys,
            checks,
            pk_positions,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[ColumnDef] {
        &self.columns
    }

    pub fn primary_key(&self) -> &[String] {
        &self.primary_key
    }

    pub fn foreign_keys(&self) -> &[ForeignKey] {
        &self.foreign_keys
    }

    pub fn checks(&self) -> &[CheckConstraint] {
        &self.checks
    }

    /// Positions of the primary-key columns, in key order.
    pub fn pk_positions(&self) -> &[usize] {
        &self.pk_positions
    }

    pub fn column_position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }
}

/// A table definition with its rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub(crate) def: TableDef,
    pub(crate) store: RowStore,
}

impl Table {
    pub fn def(&self) -> &TableDef {
        &self.def
    }

    pub fn store(&self) -> &RowStore {
        &self.store
    }

    pub fn name(&self) -> &str {
        self.def.name()
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }
}

/// Named collection of tables.
///
/// Reads may be shared across threads; mutation goes through `&mut self`.
#[derive(Debug, Clone, Default)]
pub struct Database {
    tables: Vec<Table>,
    by_name: HashMap<String, usize>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a table. Foreign keys must point at existing tables (or the
    /// table itself), name that table's primary key, and agree on types.
    pub fn add_table(&mut self, def: TableDef) -> Result<(), SchemaError> {
        if self.by_name.contains_key(def.name()) {
            return Err(SchemaError::DuplicateTable(def.name().to_owned()));
        }
        for fk in def.foreign_keys() {
            let target = if fk.foreign_table == def.name() {
                &def
            } else {
                match self.table(&fk.foreign_table) {
                    Some(t) => t.def(),
                    None => {
                        return Err(SchemaError::UnknownForeignTable {
                            table: def.name().to_owned(),
                            foreign: fk.foreign_table.clone(),
                        })
                    }
                }
            };
            let mut sorted_foreign = fk.foreign_columns.clone();
            sorted_foreign.sort();
            let mut sorted_pk = target.primary_key().to_vec();
            sorted_pk.sort();
            if sorted_foreign != sorted_pk {
                return Err(SchemaError::MalformedForeignKey {
                    table: def.name().to_owned(),
                    detail: format!("{fk}: referenced columns must be the primary key of `{}`", target.name()),
                });
            }
            for (local, foreign) in fk.local_columns.iter().zip(&fk.foreign_columns) {
                let lt = def.columns()[def.column_position(local).expect("checked by TableDef::new")].col_type;
                let ft = target.columns()[target.column_position(foreign).expect("pk column exists")].col_type;
                if lt != ft {
                    return Err(SchemaError::MalformedForeignKey {
                        table: def.name().to_owned(),
                        detail: format!("{fk}: `{local}` is {lt} but `{foreign}` is {ft}"),
                    });
                }
            }
        }
        let store = RowStore::new(def.pk_positions().to_vec());
        self.by_name.insert(def.name().to_owned(), self.tables.len());
        self.tables.push(Table { def, store });
        Ok(())
    }

    /// Exact-name lookup.
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.by_name.get(name).map(|&i| &self.tables[i])
    }

    pub(crate) fn table_mut(&mut self, name: &str) -> Option<&mut Table> {
        self.by_name.get(name).map(|&i| &mut self.tables[i])
    }

    /// Lookup used by SQL name resolution: an exact match wins, otherwise a
    /// unique case-insensitive match.
    pub fn resolve_table_name(&self, name: &str) -> Option<&Table> {
        if let Some(t) = self.table(name) {
            return Some(t);
        }
        let mut matches = self.tables.iter().filter(|t| t.name().eq_ignore_ascii_case(name));
        let first = matches.next()?;
        matches.next().is_none().then_some(first)
    }

    /// Tables in creation order.
    pub fn tables(&self) -> impl Iterator<Item = &Table> {
        self.tables.iter()
    }

    pub fn table_names(&self) -> Vec<&str> {
        self.tables.iter().map(|t| t.name()).collect()
    }

    pub fn table_count(&self) -> usize {
        self.tables.len()
    }

    /// Tables ordered so every table follows the tables it references.
    /// Self-references are ignored. Ties keep creation order.
    pub fn load_order(&self) -> Vec<&str> {
        let mut placed: Vec<&str> = Vec::with_capacity(self.tables.len());
        let mut remaining: Vec<&Table> = self.tables.iter().collect();
        while !remaining.is_empty() {
            let before = remaining.len();
            remaining.retain(|t| {
                let ready = t
                    .def()
                    .foreign_keys()
                    .iter()
                    .all(|fk| fk.foreign_table == t.name() || placed.contains(&fk.foreign_table.as_str()));
                if ready {
                    placed.push(t.name());
                }
                !ready
            });
            if remaining.len() == before {
                // add_table forbids forward references, so cycles cannot form
                unreachable!("foreign-key cycle between tables");
            }
        }
        placed
    }

    /// Whether following foreign keys from `from` reaches `to`.
    pub fn fk_reaches(&self, from: &str, to: &str) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![from];
        while let Some(name) = stack.pop() {
            let Some(t) = self.table(name) else { continue };
            for fk in t.def().foreign_keys() {
                let next = fk.foreign_table.as_str();
                if next == to {
                    return true;
                }
                if !seen.contains(&next) {
                    seen.push(next);
                    stack.push(next);
                }
            }
        }
        false
    }

    /// Total number of stored rows across all tables.
    pub fn row_count(&self) -> usize {
        self.tables.iter().map(Table::len).sum()
    }
}
