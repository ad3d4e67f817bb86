//! Syntax tree for the query dialect and the admin `CREATE TABLE` form.

use std::fmt::{self, Write};

use super::token::Position;
use crate::value::ColumnType;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub text: String,
    pub quoted: bool,
    pub position: Position,
}

impl Ident {
    /// Whether this identifier, as written, names `candidate`. Unquoted
    /// identifiers ignore ASCII case; quoted ones must match exactly.
    pub fn matches_strictly(&self, candidate: &str) -> bool {
        if self.quoted {
            self.text == candidate
        } else {
            self.text.eq_ignore_ascii_case(candidate)
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.quoted {
            write!(f, "`{}`", self.text.replace('`', "``"))
        } else {
            f.write_str(&self.text)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnRef {
    pub qualifier: Option<Ident>,
    pub name: Ident,
}

impl ColumnRef {
    pub fn position(&self) -> Position {
        self.qualifier.as_ref().map_or(self.name.position, |q| q.position)
    }

    /// Source-like spelling without backticks, e.g. `b.Release year`.
    pub fn plain_text(&self) -> String {
        match &self.qualifier {
            Some(q) => format!("{}.{}", q.text, self.name.text),
            None => self.name.text.clone(),
        }
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = &self.qualifier {
            write!(f, "{q}.")?;
        }
        write!(f, "{}", self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AggFunc {
    Count,
    Sum,
}

impl AggFunc {
    pub fn as_str(self) -> &'static str {
        match self {
            AggFunc::Count => "COUNT",
            AggFunc::Sum => "SUM",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectExpr {
    Column(ColumnRef),
    Aggregate { func: AggFunc, arg: ColumnRef },
}

impl SelectExpr {
    /// Header text used when no alias is given: the column name as written
    /// for plain columns, `FUNC(arg)` for aggregates.
    pub fn display_name(&self) -> String {
        match self {
            SelectExpr::Column(c) => c.name.text.clone(),
            SelectExpr::Aggregate { func, arg } => format!("{}({})", func.as_str(), arg.plain_text()),
        }
    }

    pub fn position(&self) -> Position {
        match self {
            SelectExpr::Column(c) => c.position(),
            SelectExpr::Aggregate { arg, .. } => arg.position(),
        }
    }
}

impl fmt::Display for SelectExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectExpr::Column(c) => write!(f, "{c}"),
            SelectExpr::Aggregate { func, arg } => write!(f, "{}({arg})", func.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectItem {
    pub expr: SelectExpr,
    pub alias: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRef {
    pub name: Ident,
    pub alias: Option<Ident>,
}

impl fmt::Display for TableRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if let Some(a) = &self.alias {
            write!(f, " AS {a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinClause {
    pub table: TableRef,
    pub left: ColumnRef,
    pub right: ColumnRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::NotEq => "<>",
            CmpOp::Lt => "<",
            CmpOp::LtEq => "<=",
            CmpOp::Gt => ">",
            CmpOp::GtEq => ">=",
        }
    }

    /// The operator with its operands swapped: `a < b` iff `b > a`.
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::LtEq => CmpOp::GtEq,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::GtEq => CmpOp::LtEq,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    /// Digits with an optional fractional part, as written.
    Number(String),
    String(String),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Number(n) => f.write_str(n),
            Literal::String(s) => write!(f, "'{}'", s.replace('\'', "''")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Column(ColumnRef),
    Literal(Literal),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Column(c) => write!(f, "{c}"),
            Operand::Literal(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub left: ColumnRef,
    pub op: CmpOp,
    pub right: Operand,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.op.as_str(), self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SortDirection {
    #[default]
    Asc,
    Desc,
}

impl SortDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            SortDirection::Asc => "ASC",
            SortDirection::Desc => "DESC",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderItem {
    pub expr: SelectExpr,
    pub direction: SortDirection,
}

/// One parsed `SELECT` statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryAst {
    pub select_items: Vec<SelectItem>,
    pub from: TableRef,
    pub joins: Vec<JoinClause>,
    pub where_clause: Vec<Predicate>,
    pub group_by: Vec<ColumnRef>,
    pub order_by: Vec<OrderItem>,
}

impl QueryAst {
    /// Stable, indented rendering used by `--parse-only` and golden tests.
    pub fn to_debug_text(&self) -> String {
        let mut out = String::from("Query\n  Select\n");
        for item in &self.select_items {
            let _ = write!(out, "    {}", item.expr);
            if let Some(alias) = &item.alias {
                let _ = write!(out, " AS {alias:?}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "  From {}", self.from);
        for join in &self.joins {
            let _ = writeln!(out, "  Join {} ON {} = {}", join.table, join.left, join.right);
        }
        if !self.where_clause.is_empty() {
            out.push_str("  Where\n");
            for p in &self.where_clause {
                let _ = writeln!(out, "    {p}");
            }
        }
        if !self.group_by.is_empty() {
            out.push_str("  GroupBy\n");
            for c in &self.group_by {
                let _ = writeln!(out, "    {c}");
            }
        }
        if !self.order_by.is_empty() {
            out.push_str("  OrderBy\n");
            for o in &self.order_by {
                let _ = writeln!(out, "    {} {}", o.expr, o.direction.as_str());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForeignKeyAst {
    pub columns: Vec<Ident>,
    pub foreign_table: Ident,
    pub foreign_columns: Vec<Ident>,
}

/// `CREATE TABLE` as accepted from admin sessions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreateTableAst {
    pub name: Ident,
    pub columns: Vec<(Ident, ColumnType)>,
    pub primary_key: Vec<Ident>,
    pub foreign_keys: Vec<ForeignKeyAst>,
    pub exactly_one: Vec<Vec<Ident>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Select(QueryAst),
    CreateTable(CreateTableAst),
}
