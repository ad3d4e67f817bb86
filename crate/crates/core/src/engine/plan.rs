//! Logical plans and their text rendering.

use std::fmt::Write as _;

use crate::sql::{AggFunc, BoundExpr, BoundOperand, BoundQuery, CmpOp, ColumnId, SortDirection};
use crate::value::{ColumnType, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanOperand {
    Column(usize),
    Literal(Value),
}

/// `row[left] op right`, positions relative to the filter's input row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanPredicate {
    pub left: usize,
    pub op: CmpOp,
    pub right: PlanOperand,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanAggregate {
    pub func: AggFunc,
    pub column: usize,
    /// Type of the produced value.
    pub output: ColumnType,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortKey {
    pub column: usize,
    pub direction: SortDirection,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BuildSide {
    /// Build over whichever input is smaller at run time.
    #[default]
    Smaller,
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogicalPlan {
    Scan {
        table: String,
        alias: String,
    },
    Filter {
        input: Box<LogicalPlan>,
        predicates: Vec<PlanPredicate>,
    },
    /// Output rows are always `left ++ right`.
    HashJoin {
        left: Box<LogicalPlan>,
        right: Box<LogicalPlan>,
        left_key: usize,
        right_key: usize,
        build: BuildSide,
        label: String,
    },
    /// Output rows are group keys followed by aggregate values.
    Aggregate {
        input: Box<LogicalPlan>,
        group_keys: Vec<usize>,
        key_labels: Vec<String>,
        aggregates: Vec<PlanAggregate>,
    },
    /// Emits `columns` from each input row. Only the first `headers.len()`
    /// are visible; the rest feed a Sort above.
    Project {
        input: Box<LogicalPlan>,
        columns: Vec<usize>,
        labels: Vec<String>,
        headers: Vec<String>,
    },
    /// Sorts by `keys`, breaks ties on the visible row, then trims hidden
    /// columns.
    Sort {
        input: Box<LogicalPlan>,
        keys: Vec<SortKey>,
        width: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannerOptions {
    pub pushdown: bool,
    pub build: BuildSide,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions { pushdown: true, build: BuildSide::Smaller }
    }
}

pub fn plan(query: &BoundQuery) -> LogicalPlan {
    plan_with(query, PlannerOptions::default())
}

pub fn plan_with(query: &BoundQuery, options: PlannerOptions) -> LogicalPlan {
    let n = query.tables.len();
    let mut offsets = Vec::with_capacity(n);
    let mut width = 0;
    for t in &query.tables {
        offsets.push(width);
        width += t.columns.len();
    }

    // pushed[i]: filters on the scan of table i; after[i]: filters above the
    // join chain once tables 0..=i are present
    let mut pushed: Vec<Vec<PlanPredicate>> = vec![Vec::new(); n];
    let mut after: Vec<Vec<PlanPredicate>> = vec![Vec::new(); n];
    for p in &query.predicates {
        let tables = p.tables();
        let label = query.predicate_label(p);
        if options.pushdown && tables.len() == 1 {
            let t = tables[0];
            let right = match &p.right {
                BoundOperand::Column(c) => PlanOperand::Column(c.column),
                BoundOperand::Literal(v) => PlanOperand::Literal(v.clone()),
            };
            pushed[t].push(PlanPredicate { left: p.left.column, op: p.op, right, label });
        } else {
            let pos = |c: ColumnId| offsets[c.table] + c.column;
            let right = match &p.right {
                BoundOperand::Column(c) => PlanOperand::Column(pos(*c)),
                BoundOperand::Literal(v) => PlanOperand::Literal(v.clone()),
            };
            let at = if options.pushdown { *tables.iter().max().unwrap() } else { n - 1 };
            after[at].push(PlanPredicate { left: pos(p.left), op: p.op, right, label });
        }
    }

    let mut scans = query.tables.iter().zip(pushed).map(|(t, preds)| {
        let scan = LogicalPlan::Scan { table: t.table.clone(), alias: t.label.clone() };
        filtered(scan, preds)
    });
    let mut after = after.into_iter();
    let mut root = filtered(scans.next().expect("at least one table"), after.next().unwrap());
    for (i, (right, preds)) in scans.zip(after).enumerate() {
        let j = query.joins[i];
        root = LogicalPlan::HashJoin {
            left: Box::new(root),
            right: Box::new(right),
            left_key: offsets[j.left.table] + j.left.column,
            right_key: j.right.column,
            build: options.build,
            label: format!("{} = {}", query.column_label(j.left), query.column_label(j.right)),
        };
        root = filtered(root, preds);
    }

    // positions of select/order expressions in the row feeding Project
    let position_of: Box<dyn Fn(&BoundExpr) -> usize>;
    if query.is_aggregate() {
        let mut aggs: Vec<BoundExpr> = Vec::new();
        for e in query.select.iter().map(|s| &s.expr).chain(query.order_by.iter().map(|o| &o.expr)) {
            if matches!(e, BoundExpr::Aggregate { .. }) && !aggs.contains(e) {
                aggs.push(*e);
            }
        }
        let aggregates = aggs
            .iter()
            .map(|e| {
                let BoundExpr::Aggregate { func, arg } = *e else { unreachable!() };
                let output = match func {
                    AggFunc::Count => ColumnType::Int,
                    AggFunc::Sum => query.column_type(arg),
                };
                PlanAggregate { func, column: offsets[arg.table] + arg.column, output, label: query.expr_label(e) }
            })
            .collect();
        let group = query.group_by.clone();
        root = LogicalPlan::Aggregate {
            input: Box::new(root),
            group_keys: group.iter().map(|c| offsets[c.table] + c.column).collect(),
            key_labels: group.iter().map(|c| query.column_label(*c)).collect(),
            aggregates,
        };
        let nkeys = group.len();
        position_of = Box::new(move |e| match e {
            BoundExpr::Column(c) => group.iter().position(|g| g == c).expect("binder checked grouping"),
            agg => nkeys + aggs.iter().position(|a| a == agg).unwrap(),
        });
    } else {
        position_of = Box::new(move |e| match e {
            BoundExpr::Column(c) => offsets[c.table] + c.column,
            BoundExpr::Aggregate { .. } => unreachable!("not an aggregate query"),
        });
    }

    let mut exprs: Vec<BoundExpr> = query.select.iter().map(|s| s.expr).collect();
    let headers: Vec<String> = query.select.iter().map(|s| s.header.clone()).collect();
    let mut keys = Vec::with_capacity(query.order_by.len());
    for o in &query.order_by {
        let column = match exprs.iter().position(|e| *e == o.expr) {
            Some(p) => p,
            None => {
                exprs.push(o.expr);
                exprs.len() - 1
            }
        };
        keys.push(SortKey { column, direction: o.direction, label: query.expr_label(&o.expr) });
    }
    root = LogicalPlan::Project {
        input: Box::new(root),
        columns: exprs.iter().map(&position_of).collect(),
        labels: exprs.iter().map(|e| query.expr_label(e)).collect(),
        headers,
    };
    if !keys.is_empty() {
        root = LogicalPlan::Sort { input: Box::new(root), keys, width: query.select.len() };
    }
    root
}

fn filtered(input: LogicalPlan, predicates: Vec<PlanPredicate>) -> LogicalPlan {
    if predicates.is_empty() {
        input
    } else {
        LogicalPlan::Filter { input: Box::new(input), predicates }
    }
}

impl LogicalPlan {
    /// Indented operator tree, one node per line, root first.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        self.explain_into(&mut out, 0);
        out
    }

    fn explain_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        match self {
            LogicalPlan::Scan { table, alias } => {
                if table == alias {
                    let _ = writeln!(out, "{pad}Scan: {table}");
                } else {
                    let _ = writeln!(out, "{pad}Scan: {table} AS {alias}");
                }
            }
            LogicalPlan::Filter { input, predicates } => {
                let labels: Vec<_> = predicates.iter().map(|p| p.label.as_str()).collect();
                let _ = writeln!(out, "{pad}Filter: {}", labels.join(" AND "));
                input.explain_into(out, depth + 1);
            }
            LogicalPlan::HashJoin { left, right, label, .. } => {
                let _ = writeln!(out, "{pad}HashJoin: {label}");
                left.explain_into(out, depth + 1);
                right.explain_into(out, depth + 1);
            }
            LogicalPlan::Aggregate { input, key_labels, aggregates, .. } => {
                let aggs: Vec<_> = aggregates.iter().map(|a| a.label.as_str()).collect();
                let _ =
                    writeln!(out, "{pad}Aggregate: keys [{}] aggregates [{}]", key_labels.join(", "), aggs.join(", "));
                input.explain_into(out, depth + 1);
            }
            LogicalPlan::Project { input, labels, headers, .. } => {
                let shown: Vec<String> = labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| match headers.get(i) {
                        Some(h) if h != l && !l.ends_with(&format!(".{h}")) => format!("{l} AS {h}"),
                        Some(_) => l.clone(),
                        None => format!("{l} (hidden)"),
                    })
                    .collect();
                let _ = writeln!(out, "{pad}Project: {}", shown.join(", "));
                input.explain_into(out, depth + 1);
            }
            LogicalPlan::Sort { input, keys, .. } => {
                let k: Vec<_> = keys.iter().map(|k| format!("{} {}", k.label, k.direction.as_str())).collect();
                let _ = writeln!(out, "{pad}Sort: {}", k.join(", "));
                input.explain_into(out, depth + 1);
            }
        }
    }

    /// Number of `HashJoin` nodes in the tree.
    pub fn join_count(&self) -> usize {
        match self {
            LogicalPlan::Scan { .. } => 0,
            LogicalPlan::HashJoin { left, right, .. } => 1 + left.join_count() + right.join_count(),
            LogicalPlan::Filter { input, .. }
            | LogicalPlan::Aggregate { input, .. }
            | LogicalPlan::Project { input, .. }
            | LogicalPlan::Sort { input, .. } => input.join_count(),
        }
    }

    /// Predicates sitting directly on a scan.
    pub fn pushed_predicates(&self) -> Vec<&PlanPredicate> {
        match self {
            LogicalPlan::Scan { .. } => vec![],
            LogicalPlan::Filter { input, predicates } => {
                let mut v = input.pushed_predicates();
                if matches!(**input, LogicalPlan::Scan { .. }) {
                    v.extend(predicates);
                }
                v
            }
            LogicalPlan::HashJoin { left, right, .. } => {
                let mut v = left.pushed_predicates();
                v.extend(right.pushed_predicates());
                v
            }
            LogicalPlan::Aggregate { input, .. }
            | LogicalPlan::Project { input, .. }
            | LogicalPlan::Sort { input, .. } => input.pushed_predicates(),
        }
    }
}
