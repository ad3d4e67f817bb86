//! Plan execution.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::plan::{BuildSide, LogicalPlan, PlanAggregate, PlanOperand, PlanPredicate, SortKey};
use super::{ExecError, ResultSet};
use crate::catalog::Database;
use crate::sql::{AggFunc, CmpOp, SortDirection};
use crate::value::{ColumnType, Decimal, Row, Value};

pub fn execute(db: &Database, plan: &LogicalPlan) -> Result<ResultSet, ExecError> {
    let headers = headers_of(plan).to_vec();
    let rows = run(db, plan)?;
    Ok(ResultSet { headers, rows })
}

fn headers_of(plan: &LogicalPlan) -> &[String] {
    match plan {
        LogicalPlan::Project { headers, .. } => headers,
        LogicalPlan::Sort { input, .. } => headers_of(input),
        _ => &[],
    }
}

fn run(db: &Database, plan: &LogicalPlan) -> Result<Vec<Row>, ExecError> {
    match plan {
        LogicalPlan::Scan { table, .. } => {
            let t = db.table(table).ok_or_else(|| ExecError::UnknownTable(table.clone()))?;
            Ok(t.store().rows().to_vec())
        }
        LogicalPlan::Filter { input, predicates } => {
            // filters over a scan skip the copy of rejected rows
            if let LogicalPlan::Scan { table, .. } = &**input {
                let t = db.table(table).ok_or_else(|| ExecError::UnknownTable(table.clone()))?;
                return Ok(t.store().rows().iter().filter(|r| matches_all(predicates, r)).cloned().collect());
            }
            let mut rows = run(db, input)?;
            rows.retain(|r| matches_all(predicates, r));
            Ok(rows)
        }
        LogicalPlan::HashJoin { left, right, left_key, right_key, build, .. } => {
            let l = run(db, left)?;
            let r = run(db, right)?;
            Ok(hash_join_with(&l, &r, *left_key, *right_key, *build))
        }
        LogicalPlan::Aggregate { input, group_keys, aggregates, .. } => {
            let rows = run(db, input)?;
            aggregate(&rows, group_keys, aggregates)
        }
        LogicalPlan::Project { input, columns, .. } => {
            let rows = run(db, input)?;
            Ok(rows.into_iter().map(|r| columns.iter().map(|&c| r[c].clone()).collect()).collect())
        }
        LogicalPlan::Sort { input, keys, width } => {
            let mut rows = run(db, input)?;
            sort(&mut rows, keys, *width);
            for r in &mut rows {
                r.truncate(*width);
            }
            Ok(rows)
        }
    }
}

fn compare(left: &Value, op: CmpOp, right: &Value) -> bool {
    let ord = left.cmp(right);
    match op {
        CmpOp::Eq => ord == Ordering::Equal,
        CmpOp::NotEq => ord != Ordering::Equal,
        CmpOp::Lt => ord == Ordering::Less,
        CmpOp::LtEq => ord != Ordering::Greater,
        CmpOp::Gt => ord == Ordering::Greater,
        CmpOp::GtEq => ord != Ordering::Less,
    }
}

fn matches_all(predicates: &[PlanPredicate], row: &[Value]) -> bool {
    predicates.iter().all(|p| {
        let right = match &p.right {
            PlanOperand::Column(c) => &row[*c],
            PlanOperand::Literal(v) => v,
        };
        compare(&row[p.left], p.op, right)
    })
}

/// Equi-join building a hash table over the smaller input.
///
/// Output rows are `left ++ right`, in probe-side order, then in build-side
/// insertion order among equal keys.
pub fn hash_join(left: &[Row], right: &[Row], left_key: usize, right_key: usize) -> Vec<Row> {
    hash_join_with(left, right, left_key, right_key, BuildSide::Smaller)
}

pub fn hash_join_with(left: &[Row], right: &[Row], left_key: usize, right_key: usize, build: BuildSide) -> Vec<Row> {
    let build_left = match build {
        BuildSide::Smaller => left.len() <= right.len(),
        BuildSide::Left => true,
        BuildSide::Right => false,
    };
    let (build_rows, build_key, probe_rows, probe_key) =
        if build_left { (left, left_key, right, right_key) } else { (right, right_key, left, left_key) };
    let mut table: HashMap<&Value, Vec<&Row>> = HashMap::with_capacity(build_rows.len());
    for row in build_rows {
        table.entry(&row[build_key]).or_default().push(row);
    }
    let mut out = Vec::new();
    for probe in probe_rows {
        if let Some(matches) = table.get(&probe[probe_key]) {
            for b in matches {
                let (l, r) = if build_left { (*b, probe) } else { (probe, *b) };
                let mut row = Vec::with_capacity(l.len() + r.len());
                row.extend_from_slice(l);
                row.extend_from_slice(r);
                out.push(row);
            }
        }
    }
    out
}

enum Acc {
    Count(i64),
    IntSum(i128),
    DecSum(Decimal),
}

impl Acc {
    fn new(agg: &PlanAggregate) -> Acc {
        match (agg.func, agg.output) {
            (AggFunc::Count, _) => Acc::Count(0),
            (AggFunc::Sum, ColumnType::Int) => Acc::IntSum(0),
            (AggFunc::Sum, _) => Acc::DecSum(Decimal::ZERO),
        }
    }

    fn add(&mut self, v: &Value, label: &str) -> Result<(), ExecError> {
        match (self, v) {
            (Acc::Count(n), _) => *n += 1,
            (Acc::IntSum(s), Value::Int(i)) => *s += *i as i128,
            (Acc::DecSum(s), Value::Decimal(d)) => {
                *s = s.checked_add(*d).ok_or_else(|| ExecError::ArithmeticOverflow(label.to_owned()))?
            }
            (Acc::DecSum(s), Value::Int(i)) => {
                *s = s.checked_add(Decimal::from(*i)).ok_or_else(|| ExecError::ArithmeticOverflow(label.to_owned()))?
            }
            (_, other) => return Err(ExecError::NonNumeric { expression: label.to_owned(), value: other.render() }),
        }
        Ok(())
    }

    fn finish(&self, label: &str) -> Result<Value, ExecError> {
        match self {
            Acc::Count(n) => Ok(Value::Int(*n)),
            Acc::IntSum(s) => {
                i64::try_from(*s).map(Value::Int).map_err(|_| ExecError::ArithmeticOverflow(label.to_owned()))
            }
            Acc::DecSum(d) => Ok(Value::Decimal(*d)),
        }
    }
}

/// Groups `rows` by `group_keys` (first-appearance order) and appends one
/// value per aggregate. With no keys the result is exactly one row.
pub fn aggregate(rows: &[Row], group_keys: &[usize], aggregates: &[PlanAggregate]) -> Result<Vec<Row>, ExecError> {
    let mut index: HashMap<Vec<Value>, usize> = HashMap::new();
    let mut groups: Vec<(Vec<Value>, Vec<Acc>)> = Vec::new();
    if group_keys.is_empty() {
        groups.push((Vec::new(), aggregates.iter().map(Acc::new).collect()));
    }
    for row in rows {
        let key: Vec<Value> = group_keys.iter().map(|&k| row[k].clone()).collect();
        let g = match index.get(&key) {
            Some(&g) => g,
            None if group_keys.is_empty() => 0,
            None => {
                groups.push((key.clone(), aggregates.iter().map(Acc::new).collect()));
                index.insert(key, groups.len() - 1);
                groups.len() - 1
            }
        };
        for (acc, agg) in groups[g].1.iter_mut().zip(aggregates) {
            acc.add(&row[agg.column], &agg.label)?;
        }
    }
    groups
        .into_iter()
        .map(|(mut key, accs)| {
            for (acc, agg) in accs.iter().zip(aggregates) {
                key.push(acc.finish(&agg.label)?);
            }
            Ok(key)
        })
        .collect()
}

/// Stable sort on `keys`, then ascending on the first `width` columns.
pub fn sort(rows: &mut [Row], keys: &[SortKey], width: usize) {
    rows.sort_by(|a, b| {
        for k in keys {
            let ord = a[k.column].cmp(&b[k.column]);
            let ord = if k.direction == SortDirection::Desc { ord.reverse() } else { ord };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        a[..width].cmp(&b[..width])
    });
}
