//! Name resolution and semantic checks.
//!
//! Binding turns a [`QueryAst`] into a [`BoundQuery`] in which every column
//! reference is a [`ColumnId`]: a position in the FROM/JOIN scope plus a
//! column index in that table. Literals are converted to the type of the
//! column they are compared with.

use std::fmt;

use thiserror::Error;

use super::ast::*;
use super::token::Position;
use crate::catalog::{ColumnDef, Database};
use crate::value::{ColumnType, Decimal, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BindError {
    #[error("{position}: unknown table `{name}`")]
    UnknownTable { name: String, position: Position },
    #[error("{position}: unknown column `{name}`")]
    UnknownColumn { name: String, position: Position },
    #[error("{position}: column `{name}` is ambiguous (candidates: {})", candidates.join(", "))]
    AmbiguousColumn { name: String, candidates: Vec<String>, position: Position },
    #[error("{position}: column `{name}` must appear in GROUP BY or inside an aggregate")]
    UngroupedColumn { name: String, position: Position },
    #[error("{position}: table name or alias `{name}` is used twice")]
    DuplicateAlias { name: String, position: Position },
    #[error("{position}: invalid join condition: {detail}")]
    InvalidJoinCondition { detail: String, position: Position },
    #[error("{position}: type mismatch: {detail}")]
    TypeMismatch { detail: String, position: Position },
    #[error("{position}: SUM needs a numeric column, `{name}` is not numeric")]
    NonNumericAggregate { name: String, position: Position },
    #[error("{position}: invalid literal {literal}")]
    InvalidLiteral { literal: String, position: Position },
}

impl BindError {
    pub fn position(&self) -> Position {
        match self {
            BindError::UnknownTable { position, .. }
            | BindError::UnknownColumn { position, .. }
            | BindError::AmbiguousColumn { position, .. }
            | BindError::UngroupedColumn { position, .. }
            | BindError::DuplicateAlias { position, .. }
            | BindError::InvalidJoinCondition { position, .. }
            | BindError::TypeMismatch { position, .. }
            | BindError::NonNumericAggregate { position, .. }
            | BindError::InvalidLiteral { position, .. } => *position,
        }
    }
}

/// A column in the query scope: `table` indexes [`BoundQuery::tables`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnId {
    pub table: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundTable {
    /// Catalog name.
    pub table: String,
    /// Alias if one was given, otherwise the table name.
    pub label: String,
    pub columns: Vec<ColumnDef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundExpr {
    Column(ColumnId),
    Aggregate { func: AggFunc, arg: ColumnId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundOperand {
    Column(ColumnId),
    Literal(Value),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundPredicate {
    pub left: ColumnId,
    pub op: CmpOp,
    pub right: BoundOperand,
}

impl BoundPredicate {
    /// Scope positions of the tables this predicate reads.
    pub fn tables(&self) -> Vec<usize> {
        let mut t = vec![self.left.table];
        if let BoundOperand::Column(c) = &self.right {
            if c.table != self.left.table {
                t.push(c.table);
            }
        }
        t
    }
}

/// Equi-join of table `right.table` (the newly joined one) with an earlier
/// table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundJoin {
    pub left: ColumnId,
    pub right: ColumnId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundSelect {
    pub expr: BoundExpr,
    pub header: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundOrder {
    pub expr: BoundExpr,
    pub direction: SortDirection,
}

/// A query whose names are all resolved against one database schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundQuery {
    pub tables: Vec<BoundTable>,
    /// `joins[i]` attaches `tables[i + 1]`.
    pub joins: Vec<BoundJoin>,
    pub predicates: Vec<BoundPredicate>,
    pub group_by: Vec<ColumnId>,
    pub select: Vec<BoundSelect>,
    pub order_by: Vec<BoundOrder>,
}

impl BoundQuery {
    /// True when the query produces one row per group (or one row overall).
    pub fn is_aggregate(&self) -> bool {
        !self.group_by.is_empty()
            || self.select.iter().any(|s| matches!(s.expr, BoundExpr::Aggregate { .. }))
            || self.order_by.iter().any(|o| matches!(o.expr, BoundExpr::Aggregate { .. }))
    }

    pub fn column_def(&self, id: ColumnId) -> &ColumnDef {
        &self.tables[id.table].columns[id.column]
    }

    pub fn column_type(&self, id: ColumnId) -> ColumnType {
        self.column_def(id).col_type
    }

    /// `label.column`, e.g. `b.Seasons`.
    pub fn column_label(&self, id: ColumnId) -> String {
        format!("{}.{}", self.tables[id.table].label, self.column_def(id).name)
    }

    pub fn expr_label(&self, expr: &BoundExpr) -> String {
        match expr {
            BoundExpr::Column(c) => self.column_label(*c),
            BoundExpr::Aggregate { func, arg } => format!("{}({})", func.as_str(), self.column_label(*arg)),
        }
    }

    pub fn predicate_label(&self, p: &BoundPredicate) -> String {
        let right = match &p.right {
            BoundOperand::Column(c) => self.column_label(*c),
            BoundOperand::Literal(Value::Text(s)) => format!("'{}'", s.replace('\'', "''")),
            BoundOperand::Literal(v) => v.render(),
        };
        format!("{} {} {}", self.column_label(p.left), p.op.as_str(), right)
    }
}

impl fmt::Display for BoundQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.tables.iter().map(|t| format!("{} AS {}", t.table, t.label)).collect();
        write!(f, "bound query over {}", names.join(", "))
    }
}

enum Lookup {
    None,
    One(usize),
    Many(Vec<usize>),
}

/// Exact spelling wins; otherwise a unique case-insensitive match.
fn lookup<'a>(wanted: &str, candidates: impl Iterator<Item = &'a str> + Clone) -> Lookup {
    let exact: Vec<usize> = candidates.clone().enumerate().filter(|(_, c)| *c == wanted).map(|(i, _)| i).collect();
    if exact.len() == 1 {
        return Lookup::One(exact[0]);
    }
    let loose: Vec<usize> =
        candidates.enumerate().filter(|(_, c)| c.eq_ignore_ascii_case(wanted)).map(|(i, _)| i).collect();
    match loose.len() {
        0 => Lookup::None,
        1 => Lookup::One(loose[0]),
        _ => Lookup::Many(loose),
    }
}

struct Scope<'q> {
    tables: &'q [BoundTable],
}

impl Scope<'_> {
    fn resolve(&self, col: &ColumnRef) -> Result<ColumnId, BindError> {
        let find_in = |t: usize| match lookup(&col.name.text, self.tables[t].columns.iter().map(|c| c.name.as_str())) {
            Lookup::One(c) => Ok(Some(ColumnId { table: t, column: c })),
            Lookup::None => Ok(None),
            Lookup::Many(cs) => Err(BindError::AmbiguousColumn {
                name: col.plain_text(),
                candidates: cs
                    .iter()
                    .map(|&c| format!("{}.{}", self.tables[t].label, self.tables[t].columns[c].name))
                    .collect(),
                position: col.position(),
            }),
        };
        let unknown = || BindError::UnknownColumn { name: col.plain_text(), position: col.position() };
        match &col.qualifier {
            Some(q) => match lookup(&q.text, self.tables.iter().map(|t| t.label.as_str())) {
                Lookup::One(t) => find_in(t)?.ok_or_else(unknown),
                _ => Err(unknown()),
            },
            None => {
                let mut hits = Vec::new();
                for t in 0..self.tables.len() {
                    if let Some(id) = find_in(t)? {
                        hits.push(id);
                    }
                }
                match hits.len() {
                    0 => Err(unknown()),
                    1 => Ok(hits[0]),
                    _ => Err(BindError::AmbiguousColumn {
                        name: col.plain_text(),
                        candidates: hits
                            .iter()
                            .map(|id| {
                                format!(
                                    "{}.{}",
                                    self.tables[id.table].label, self.tables[id.table].columns[id.column].name
                                )
                            })
                            .collect(),
                        position: col.position(),
                    }),
                }
            }
        }
    }
}

fn literal_value(lit: &Literal, ty: ColumnType, position: Position, column: &str) -> Result<Value, BindError> {
    let mismatch =
        || BindError::TypeMismatch { detail: format!("cannot compare {ty} column `{column}` with {lit}"), position };
    match (lit, ty) {
        (Literal::String(s), ColumnType::Text) => Ok(Value::Text(s.clone())),
        (Literal::String(_), _) | (Literal::Number(_), ColumnType::Text) => Err(mismatch()),
        (Literal::Number(n), ColumnType::Bool) => match n.as_str() {
            "0" => Ok(Value::Bool(false)),
            "1" => Ok(Value::Bool(true)),
            _ => Err(mismatch()),
        },
        (Literal::Number(n), ColumnType::Int) if !n.contains('.') => {
            n.parse().map(Value::Int).map_err(|_| BindError::InvalidLiteral { literal: n.clone(), position })
        }
        (Literal::Number(n), _) => n
            .parse::<Decimal>()
            .map(Value::Decimal)
            .map_err(|_| BindError::InvalidLiteral { literal: n.clone(), position }),
    }
}

fn bind_expr(scope: &Scope, expr: &SelectExpr) -> Result<BoundExpr, BindError> {
    match expr {
        SelectExpr::Column(c) => Ok(BoundExpr::Column(scope.resolve(c)?)),
        SelectExpr::Aggregate { func, arg } => {
            let id = scope.resolve(arg)?;
            if *func == AggFunc::Sum && !scope.tables[id.table].columns[id.column].col_type.is_numeric() {
                return Err(BindError::NonNumericAggregate { name: arg.plain_text(), position: arg.position() });
            }
            Ok(BoundExpr::Aggregate { func: *func, arg: id })
        }
    }
}

/// Resolves every name in `ast` against `db`'s schema.
pub fn bind(ast: &QueryAst, db: &Database) -> Result<BoundQuery, BindError> {
    let mut tables: Vec<BoundTable> = Vec::with_capacity(1 + ast.joins.len());
    let table_refs = std::iter::once(&ast.from).chain(ast.joins.iter().map(|j| &j.table));
    for tref in table_refs {
        let t = db
            .resolve_table_name(&tref.name.text)
            .ok_or_else(|| BindError::UnknownTable { name: tref.name.text.clone(), position: tref.name.position })?;
        let label = tref.alias.as_ref().map_or_else(|| t.name().to_owned(), |a| a.text.clone());
        if tables.iter().any(|b| b.label.eq_ignore_ascii_case(&label)) {
            let position = tref.alias.as_ref().map_or(tref.name.position, |a| a.position);
            return Err(BindError::DuplicateAlias { name: label, position });
        }
        tables.push(BoundTable { table: t.name().to_owned(), label, columns: t.def().columns().to_vec() });
    }

    let mut joins = Vec::with_capacity(ast.joins.len());
    for (i, j) in ast.joins.iter().enumerate() {
        let new_table = i + 1;
        let scope = Scope { tables: &tables[..=new_table] };
        let a = scope.resolve(&j.left)?;
        let b = scope.resolve(&j.right)?;
        let (left, right) = if b.table == new_table && a.table < new_table {
            (a, b)
        } else if a.table == new_table && b.table < new_table {
            (b, a)
        } else {
            return Err(BindError::InvalidJoinCondition {
                detail: format!(
                    "`{} = {}` must relate `{}` to an earlier table",
                    j.left.plain_text(),
                    j.right.plain_text(),
                    tables[new_table].label
                ),
                position: j.left.position(),
            });
        };
        let (lt, rt) =
            (tables[left.table].columns[left.column].col_type, tables[right.table].columns[right.column].col_type);
        if !lt.comparable_with(rt) {
            return Err(BindError::TypeMismatch {
                detail: format!("cannot join {lt} with {rt}"),
                position: j.left.position(),
            });
        }
        joins.push(BoundJoin { left, right });
    }

    let scope = Scope { tables: &tables };
    let mut predicates = Vec::with_capacity(ast.where_clause.len());
    for p in &ast.where_clause {
        let left = scope.resolve(&p.left)?;
        let left_def = &tables[left.table].columns[left.column];
        let right = match &p.right {
            Operand::Column(c) => {
                let id = scope.resolve(c)?;
                let rt = tables[id.table].columns[id.column].col_type;
                if !left_def.col_type.comparable_with(rt) {
                    return Err(BindError::TypeMismatch {
                        detail: format!("cannot compare {} with {rt}", left_def.col_type),
                        position: p.left.position(),
                    });
                }
                BoundOperand::Column(id)
            }
            Operand::Literal(lit) => {
                BoundOperand::Literal(literal_value(lit, left_def.col_type, p.left.position(), &left_def.name)?)
            }
        };
        predicates.push(BoundPredicate { left, op: p.op, right });
    }

    let group_by = ast.group_by.iter().map(|c| scope.resolve(c)).collect::<Result<Vec<_>, _>>()?;

    let mut select = Vec::with_capacity(ast.select_items.len());
    for item in &ast.select_items {
        let expr = bind_expr(&scope, &item.expr)?;
        let header = item.alias.clone().unwrap_or_else(|| item.expr.display_name());
        select.push(BoundSelect { expr, header });
    }
    let mut order_by = Vec::with_capacity(ast.order_by.len());
    for o in &ast.order_by {
        order_by.push(BoundOrder { expr: bind_expr(&scope, &o.expr)?, direction: o.direction });
    }

    let bound = BoundQuery { tables, joins, predicates, group_by, select, order_by };
    if bound.is_aggregate() {
        let exprs = ast
            .select_items
            .iter()
            .map(|i| &i.expr)
            .zip(bound.select.iter().map(|s| s.expr))
            .chain(ast.order_by.iter().map(|o| &o.expr).zip(bound.order_by.iter().map(|o| o.expr)));
        for (src, expr) in exprs {
            if let BoundExpr::Column(id) = expr {
                if !bound.group_by.contains(&id) {
                    return Err(BindError::UngroupedColumn { name: src.display_name(), position: src.position() });
                }
            }
        }
    }
    Ok(bound)
}
