//! SQL front end: tokenizer, parser and binder for the query dialect.

mod ast;
mod bind;
mod parser;
mod token;

use thiserror::Error;

use crate::catalog::{CheckConstraint, ColumnDef, Database, ForeignKey, SchemaError, TableDef};

pub use ast::*;
pub use bind::{
    bind, BindError, BoundExpr, BoundJoin, BoundOperand, BoundOrder, BoundPredicate, BoundQuery, BoundSelect,
    BoundTable, ColumnId,
};
pub use parser::{parse, parse_statement, ParseError};
pub use token::{tokenize, Keyword, Position, Symbol, Token, TokenKind, TokenizeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SqlError {
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Bind(#[from] BindError),
}

impl SqlError {
    pub fn position(&self) -> Position {
        match self {
            SqlError::Tokenize(e) => e.position(),
            SqlError::Parse(e) => e.position(),
            SqlError::Bind(e) => e.position(),
        }
    }
}

/// Tokenizes and parses a `SELECT` statement.
pub fn parse_query(src: &str) -> Result<QueryAst, SqlError> {
    Ok(parse(&tokenize(src)?)?)
}

/// Tokenizes, parses and binds a `SELECT` statement.
pub fn compile(src: &str, db: &Database) -> Result<BoundQuery, SqlError> {
    Ok(bind(&parse_query(src)?, db)?)
}

pub fn parse_sql_statement(src: &str) -> Result<Statement, SqlError> {
    Ok(parse_statement(&tokenize(src)?)?)
}

fn texts(ids: &[Ident]) -> Vec<&str> {
    ids.iter().map(|i| i.text.as_str()).collect()
}

impl CreateTableAst {
    pub fn to_table_def(&self) -> Result<TableDef, SchemaError> {
        let columns = self.columns.iter().map(|(n, t)| ColumnDef::new(n.text.clone(), *t)).collect();
        let fks = self
            .foreign_keys
            .iter()
            .map(|fk| ForeignKey::new(&texts(&fk.columns), &fk.foreign_table.text, &texts(&fk.foreign_columns)))
            .collect();
        let checks = self
            .exactly_one
            .iter()
            .map(|cols| CheckConstraint::ExactlyOneTrue(cols.iter().map(|c| c.text.clone()).collect()))
            .collect();
        TableDef::new(self.name.text.clone(), columns, &texts(&self.primary_key), fks, checks)
    }
}
