//! Query planning and execution.

mod exec;
mod plan;

use std::fmt;

use thiserror::Error;

pub use exec::{aggregate, execute, hash_join, hash_join_with, sort};
pub use plan::{
    plan, plan_with, BuildSide, LogicalPlan, PlanAggregate, PlanOperand, PlanPredicate, PlannerOptions, SortKey,
};

use crate::catalog::Database;
use crate::sql::{compile, SqlError};
use crate::value::Row;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("arithmetic overflow in {0}")]
    ArithmeticOverflow(String),
    #[error("{expression}: non-numeric value {value}")]
    NonNumeric { expression: String, value: String },
    #[error("unknown table `{0}`")]
    UnknownTable(String),
}

#[derive(Debug, Error)]
pub enum QueryError {
    #[error(transparent)]
    Sql(#[from] SqlError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Headers plus rows; every row has one value per header.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultSet {
    pub headers: Vec<String>,
    pub rows: Vec<Row>,
}

impl ResultSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows sorted, for order-insensitive comparison.
    pub fn sorted_rows(&self) -> Vec<Row> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }

    /// Padded, pipe-separated table with a row-count footer.
    pub fn to_table(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|v| v.render()).collect()).collect();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |fields: &[String]| {
            let padded: Vec<String> = fields.iter().zip(&widths).map(|(f, w)| format!("{f:<w$}")).collect();
            padded.join(" | ").trim_end().to_owned()
        };
        let mut out = String::new();
        out.push_str(&line(&self.headers));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for row in &cells {
            out.push_str(&line(row));
            out.push('\n');
        }
        let n = self.rows.len();
        out.push_str(&format!("({n} row{})\n", if n == 1 { "" } else { "s" }));
        out
    }

    /// RFC 4180 CSV with a header record.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.headers).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.render())).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv of utf-8 input")
    }
}

impl fmt::Display for ResultSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

/// Compiles, plans and executes one `SELECT`.
pub fn run_query(db: &Database, sql: &str) -> Result<ResultSet, QueryError> {
    let bound = compile(sql, db)?;
    Ok(execute(db, &plan(&bound))?)
}
