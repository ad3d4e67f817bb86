//! Brute-force reference evaluator for differential testing.
//!
//! Walks every combination of rows from the FROM/JOIN tables (nested loops,
//! no hashing), keeps those satisfying every ON and WHERE condition, groups
//! by linear search and computes aggregates straight from their definition.
//! It shares no code with the engine's executor.

mod gen;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::Instant;

use thiserror::Error;

use crate::catalog::Database;
use crate::engine::ResultSet;
use crate::sql::{AggFunc, BoundExpr, BoundOperand, BoundQuery, CmpOp, ColumnId, SortDirection};
use crate::value::{Decimal, Row, Value};

pub use gen::{generate_queries, random_database};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("arithmetic overflow in {0}")]
    ArithmeticOverflow(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("deadline exceeded")]
    DeadlineExceeded,
}

/// Anything that can hand out the rows of a named table.
pub trait Relations {
    fn relation(&self, table: &str) -> Option<&[Row]>;
}

impl Relations for Database {
    fn relation(&self, table: &str) -> Option<&[Row]> {
        self.table(table).map(|t| t.store().rows())
    }
}

/// Plain in-memory tables; unlike [`Database`] these may hold duplicates.
impl Relations for BTreeMap<String, Vec<Row>> {
    fn relation(&self, table: &str) -> Option<&[Row]> {
        self.get(table).map(Vec::as_slice)
    }
}

pub fn oracle(db: &dyn Relations, query: &BoundQuery) -> Result<ResultSet, OracleError> {
    evaluate(db, query, None)
}

/// Like [`oracle`] but gives up once `deadline` passes.
pub fn oracle_with_deadline(
    db: &dyn Relations,
    query: &BoundQuery,
    deadline: Instant,
) -> Result<ResultSet, OracleError> {
    evaluate(db, query, Some(deadline))
}

fn holds(left: &Value, op: CmpOp, right: &Value) -> bool {
    match op {
        CmpOp::Eq => left == right,
        CmpOp::NotEq => left != right,
        CmpOp::Lt => left < right,
        CmpOp::LtEq => left <= right,
        CmpOp::Gt => left > right,
        CmpOp::GtEq => left >= right,
    }
}

struct Enumerator<'a> {
    query: &'a BoundQuery,
    tables: Vec<&'a [Row]>,
    // conditions checked once table i is bound: (left, op, right)
    checks: Vec<Vec<(ColumnId, CmpOp, BoundOperand)>>,
    deadline: Option<Instant>,
    steps: u64,
    out: Vec<Vec<&'a Row>>,
}

impl<'a> Enumerator<'a> {
    fn walk(&mut self, tuple: &mut Vec<&'a Row>) -> Result<(), OracleError> {
        let depth = tuple.len();
        if depth == self.tables.len() {
            self.out.push(tuple.clone());
            return Ok(());
        }
        for row in self.tables[depth] {
            self.steps += 1;
            if self.steps % 4096 == 1 {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        return Err(OracleError::DeadlineExceeded);
                    }
                }
            }
            tuple.push(row);
            let ok = self.checks[depth].iter().all(|(l, op, r)| {
                let right = match r {
                    BoundOperand::Column(c) => &tuple[c.table][c.column],
                    BoundOperand::Literal(v) => v,
                };
                holds(&tuple[l.table][l.column], *op, right)
            });
            if ok {
                self.walk(tuple)?;
            }
            tuple.pop();
        }
        Ok(())
    }
}

fn evaluate(db: &dyn Relations, query: &BoundQuery, deadline: Option<Instant>) -> Result<ResultSet, OracleError> {
    let mut tables = Vec::new();
    for t in &query.tables {
        tables.push(db.relation(&t.table).ok_or_else(|| OracleError::UnknownTable(t.table.clone()))?);
    }
    let mut checks = vec![Vec::new(); tables.len()];
    for (i, j) in query.joins.iter().enumerate() {
        checks[i + 1].push((j.left, CmpOp::Eq, BoundOperand::Column(j.right)));
    }
    for p in &query.predicates {
        let last = p.tables().into_iter().max().unwrap_or(0);
        checks[last].push((p.left, p.op, p.right.clone()));
    }
    let mut e = Enumerator { query, tables, checks, deadline, steps: 0, out: Vec::new() };
    e.walk(&mut Vec::new())?;
    let tuples = std::mem::take(&mut e.out);
    let query = e.query;

    let headers: Vec<String> = query.select.iter().map(|s| s.header.clone()).collect();
    // each output row: visible values followed by one value per ORDER BY key
    let mut rows: Vec<(Row, Row)> = Vec::new();
    if query.is_aggregate() {
        let mut groups: Vec<(Row, Vec<&Vec<&Row>>)> = Vec::new();
        if query.group_by.is_empty() {
            groups.push((Vec::new(), Vec::new()));
        }
        for tuple in &tuples {
            let key: Row = query.group_by.iter().map(|c| tuple[c.table][c.column].clone()).collect();
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(tuple),
                None => groups.push((key, vec![tuple])),
            }
        }
        for (_, members) in &groups {
            let eval = |expr: &BoundExpr| -> Result<Value, OracleError> {
                match expr {
                    BoundExpr::Column(c) => {
                        Ok(members.first().map(|t| t[c.table][c.column].clone()).expect("group has members"))
                    }
                    BoundExpr::Aggregate { func: AggFunc::Count, .. } => Ok(Value::Int(members.len() as i64)),
                    BoundExpr::Aggregate { func: AggFunc::Sum, arg } => {
                        sum(members.iter().map(|t| &t[arg.table][arg.column]), query, expr, *arg)
                    }
                }
            };
            let visible = query.select.iter().map(|s| eval(&s.expr)).collect::<Result<Row, _>>()?;
            let keys = query.order_by.iter().map(|o| eval(&o.expr)).collect::<Result<Row, _>>()?;
            rows.push((visible, keys));
        }
    } else {
        for tuple in &tuples {
            let get = |expr: &BoundExpr| match expr {
                BoundExpr::Column(c) => tuple[c.table][c.column].clone(),
                BoundExpr::Aggregate { .. } => unreachable!("plain query"),
            };
            rows.push((
                query.select.iter().map(|s| get(&s.expr)).collect(),
                query.order_by.iter().map(|o| get(&o.expr)).collect(),
            ));
        }
    }

    if !query.order_by.is_empty() {
        rows.sort_by(|(va, ka), (vb, kb)| {
            for (i, o) in query.order_by.iter().enumerate() {
                let ord = match o.direction {
                    SortDirection::Asc => ka[i].cmp(&kb[i]),
                    SortDirection::Desc => kb[i].cmp(&ka[i]),
                };
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            va.cmp(vb)
        });
    }
    Ok(ResultSet { headers, rows: rows.into_iter().map(|(v, _)| v).collect() })
}

fn sum<'v>(
    values: impl Iterator<Item = &'v Value>,
    query: &BoundQuery,
    expr: &BoundExpr,
    arg: ColumnId,
) -> Result<Value, OracleError> {
    let overflow = || OracleError::ArithmeticOverflow(query.expr_label(expr));
    if query.column_type(arg) == crate::value::ColumnType::Int {
        let mut total: i128 = 0;
        for v in values {
            if let Value::Int(i) = v {
                total += i128::from(*i);
            }
        }
        i64::try_from(total).map(Value::Int).map_err(|_| overflow())
    } else {
        let mut total = Decimal::ZERO;
        for v in values {
            let d = match v {
                Value::Decimal(d) => *d,
                Value::Int(i) => Decimal::from(*i),
                _ => continue,
            };
            total = total.checked_add(d).ok_or_else(overflow)?;
        }
        Ok(Value::Decimal(total))
    }
}
