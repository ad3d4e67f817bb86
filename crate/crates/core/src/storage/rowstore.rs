//! Insertion-ordered row storage with hash indexes.

use std::collections::HashMap;

use crate::value::{Row, Value};

/// Rows of one table plus a primary-key index and any number of secondary
/// equality indexes. Callers validate rows before handing them over.
#[derive(Debug, Clone, Default)]
pub struct RowStore {
    rows: Vec<Row>,
    pk_columns: Vec<usize>,
    pk_index: HashMap<Vec<Value>, usize>,
    secondary: HashMap<Vec<usize>, HashMap<Vec<Value>, Vec<usize>>>,
}

fn key_of(row: &[Value], columns: &[usize]) -> Vec<Value> {
    columns.iter().map(|&c| row[c].clone()).collect()
}

impl RowStore {
    pub fn new(pk_columns: Vec<usize>) -> Self {
        RowStore { pk_columns, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn get(&self, position: usize) -> Option<&Row> {
        self.rows.get(position)
    }

    pub fn lookup_pk(&self, key: &[Value]) -> Option<usize> {
        self.pk_index.get(key).copied()
    }

    /// Appends a row and indexes it; returns its position.
    pub(crate) fn push(&mut self, row: Row) -> usize {
        let pos = self.rows.len();
        self.pk_index.insert(key_of(&row, &self.pk_columns), pos);
        for (cols, index) in self.secondary.iter_mut() {
            index.entry(key_of(&row, cols)).or_default().push(pos);
        }
        self.rows.push(row);
        pos
    }

    /// Drops every row at or after `len`, unindexing them.
    pub(crate) fn truncate(&mut self, len: usize) {
        while self.rows.len() > len {
            let pos = self.rows.len() - 1;
            let row = self.rows.pop().expect("nonempty");
            self.pk_index.remove(&key_of(&row, &self.pk_columns));
            for (cols, index) in self.secondary.iter_mut() {
                let key = key_of(&row, cols);
                if let Some(list) = index.get_mut(&key) {
                    list.retain(|&p| p != pos);
                    if list.is_empty() {
                        index.remove(&key);
                    }
                }
            }
        }
    }

    /// Removes the row at `position`; later rows shift down by one.
    pub(crate) fn remove(&mut self, position: usize) -> Row {
        let row = self.rows.remove(position);
        self.reindex();
        row
    }

    /// Replaces the row at `position`. The primary key must not change.
    pub(crate) fn replace(&mut self, position: usize, row: Row) -> Row {
        debug_assert_eq!(key_of(&row, &self.pk_columns), key_of(&self.rows[position], &self.pk_columns));
        let old = std::mem::replace(&mut self.rows[position], row);
        self.reindex();
        old
    }

    fn reindex(&mut self) {
        self.pk_index = self.build_pk_index();
        let cols: Vec<Vec<usize>> = self.secondary.keys().cloned().collect();
        for c in cols {
            let index = self.build_index(&c);
            self.secondary.insert(c, index);
        }
    }

    fn build_pk_index(&self) -> HashMap<Vec<Value>, usize> {
        self.rows.iter().enumerate().map(|(i, r)| (key_of(r, &self.pk_columns), i)).collect()
    }

    fn build_index(&self, columns: &[usize]) -> HashMap<Vec<Value>, Vec<usize>> {
        let mut index: HashMap<Vec<Value>, Vec<usize>> = HashMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            index.entry(key_of(r, columns)).or_default().push(i);
        }
        index
    }

    /// Creates (or reuses) an equality index over `columns`.
    pub(crate) fn ensure_index(&mut self, columns: &[usize]) {
        if !self.secondary.contains_key(columns) {
            let index = self.build_index(columns);
            self.secondary.insert(columns.to_vec(), index);
        }
    }

    pub(crate) fn index_lookup(&self, columns: &[usize], key: &[Value]) -> Option<&[usize]> {
        let index = self.secondary.get(columns)?;
        Some(index.get(key).map(Vec::as_slice).unwrap_or(&[]))
    }

    /// True when every stored index equals one rebuilt from the rows.
    pub fn indexes_consistent(&self) -> bool {
        self.pk_index.len() == self.rows.len()
            && self.pk_index == self.build_pk_index()
            && self.secondary.iter().all(|(cols, index)| *index == self.build_index(cols))
    }
}
