//! Recursive-descent parser.
//!
//! ```text
//! stmt     := SELECT item (',' item)* FROM tableref join* where? groupby? orderby? ';'?
//! item     := expr (AS (ident | string))?
//! expr     := (COUNT | SUM) '(' colref ')' | colref
//! colref   := ident ('.' ident)?
//! tableref := ident (AS? ident)?
//! join     := JOIN tableref ON colref '=' colref
//! where    := WHERE pred (AND pred)*
//! pred     := colref op (colref | number | string)
//! groupby  := GROUP BY colref (',' colref)*
//! orderby  := ORDER BY expr (ASC | DESC)? (',' expr (ASC | DESC)?)*
//! ```
//!
//! `CREATE TABLE` is recognised through contextual words, so none of its
//! vocabulary is reserved in queries.

use thiserror::Error;

use super::ast::*;
use super::token::{Keyword, Position, Symbol, Token, TokenKind};
use crate::value::ColumnType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{position}: expected {expected}, found {found}")]
    UnexpectedToken { expected: String, found: String, position: Position },
    #[error("{0}: unexpected input after end of statement")]
    TrailingInput(Position),
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::UnexpectedToken { position, .. } | ParseError::TrailingInput(position) => *position,
        }
    }
}

type PResult<T> = Result<T, ParseError>;

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_nth(&self, n: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + n)
    }

    fn end_position(&self) -> Position {
        match self.tokens.last() {
            Some(t) => Position { line: t.position.line, column: t.position.column + t.span.len() },
            None => Position { line: 1, column: 1 },
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(match self.peek() {
            Some(t) => ParseError::UnexpectedToken {
                expected: expected.to_owned(),
                found: t.to_string(),
                position: t.position,
            },
            None => ParseError::UnexpectedToken {
                expected: expected.to_owned(),
                found: "end of input".to_owned(),
                position: self.end_position(),
            },
        })
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Keyword(kw))
    }

    fn at_symbol(&self, sym: Symbol) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Symbol(sym))
    }

    fn at_word(&self, n: usize, word: &str) -> bool {
        matches!(self.peek_nth(n), Some(t) if t.kind == TokenKind::Identifier && t.text.eq_ignore_ascii_case(word))
    }

    fn eat_keyword(&mut self, kw: Keyword) -> bool {
        let hit = self.at_keyword(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_symbol(&mut self, sym: Symbol) -> bool {
        let hit = self.at_symbol(sym);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_keyword(&mut self, kw: Keyword) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.error(kw.as_str())
        }
    }

    fn expect_symbol(&mut self, sym: Symbol) -> PResult<()> {
        if self.eat_symbol(sym) {
            Ok(())
        } else {
            self.error(&format!("'{}'", sym.as_str()))
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<()> {
        if self.at_word(0, word) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(word)
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek() {
            Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::QuotedIdentifier) => {
                self.pos += 1;
                Ok(Ident { text: t.text.clone(), quoted: t.kind == TokenKind::QuotedIdentifier, position: t.position })
            }
            _ => self.error("identifier"),
        }
    }

    fn colref(&mut self) -> PResult<ColumnRef> {
        let first = self.ident()?;
        if self.eat_symbol(Symbol::Dot) {
            let name = self.ident()?;
            Ok(ColumnRef { qualifier: Some(first), name })
        } else {
            Ok(ColumnRef { qualifier: None, name: first })
        }
    }

    fn expr(&mut self) -> PResult<SelectExpr> {
        let func = if self.eat_keyword(Keyword::Count) {
            Some(AggFunc::Count)
        } else if self.eat_keyword(Keyword::Sum) {
            Some(AggFunc::Sum)
        } else {
            None
        };
        match func {
            Some(func) => {
                self.expect_symbol(Symbol::LParen)?;
                let arg = self.colref()?;
                self.expect_symbol(Symbol::RParen)?;
                Ok(SelectExpr::Aggregate { func, arg })
            }
            None => match self.peek() {
                Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::QuotedIdentifier) => {
                    Ok(SelectExpr::Column(self.colref()?))
                }
                _ => self.error("column or aggregate"),
            },
        }
    }

    fn select_item(&mut self) -> PResult<SelectItem> {
        let expr = self.expr()?;
        let alias = if self.eat_keyword(Keyword::As) {
            match self.peek() {
                Some(t)
                    if matches!(
                        t.kind,
                        TokenKind::Identifier | TokenKind::QuotedIdentifier | TokenKind::StringLiteral
                    ) =>
                {
                    self.pos += 1;
                    Some(t.text.clone())
                }
                _ => return self.error("alias"),
            }
        } else {
            None
        };
        Ok(SelectItem { expr, alias })
    }

    fn table_ref(&mut self) -> PResult<TableRef> {
        let name = self.ident()?;
        let explicit = self.eat_keyword(Keyword::As);
        let alias = if explicit
            || matches!(self.peek(), Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::QuotedIdentifier))
        {
            Some(self.ident()?)
        } else {
            None
        };
        Ok(TableRef { name, alias })
    }

    fn cmp_op(&mut self) -> PResult<CmpOp> {
        let op = match self.peek().map(|t| t.kind) {
            Some(TokenKind::Symbol(Symbol::Eq)) => CmpOp::Eq,
            Some(TokenKind::Symbol(Symbol::NotEq)) => CmpOp::NotEq,
            Some(TokenKind::Symbol(Symbol::Lt)) => CmpOp::Lt,
            Some(TokenKind::Symbol(Symbol::LtEq)) => CmpOp::LtEq,
            Some(TokenKind::Symbol(Symbol::Gt)) => CmpOp::Gt,
            Some(TokenKind::Symbol(Symbol::GtEq)) => CmpOp::GtEq,
            _ => return self.error("comparison operator"),
        };
        self.pos += 1;
        Ok(op)
    }

    fn predicate(&mut self) -> PResult<Predicate> {
        let left = self.colref()?;
        let op = self.cmp_op()?;
        let right = match self.peek() {
            Some(t) if t.kind == TokenKind::NumberLiteral => {
                self.pos += 1;
                Operand::Literal(Literal::Number(t.text.clone()))
            }
            Some(t) if t.kind == TokenKind::StringLiteral => {
                self.pos += 1;
                Operand::Literal(Literal::String(t.text.clone()))
            }
            Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::QuotedIdentifier) => {
                Operand::Column(self.colref()?)
            }
            _ => return self.error("column or literal"),
        };
        Ok(Predicate { left, op, right })
    }

    fn query(&mut self) -> PResult<QueryAst> {
        self.expect_keyword(Keyword::Select)?;
        let mut select_items = vec![self.select_item()?];
        while self.eat_symbol(Symbol::Comma) {
            select_items.push(self.select_item()?);
        }
        self.expect_keyword(Keyword::From)?;
        let from = self.table_ref()?;
        let mut joins = Vec::new();
        while self.eat_keyword(Keyword::Join) {
            let table = self.table_ref()?;
            self.expect_keyword(Keyword::On)?;
            let left = self.colref()?;
            self.expect_symbol(Symbol::Eq)?;
            let right = self.colref()?;
            joins.push(JoinClause { table, left, right });
        }
        let mut where_clause = Vec::new();
        if self.eat_keyword(Keyword::Where) {
            where_clause.push(self.predicate()?);
            while self.eat_keyword(Keyword::And) {
                where_clause.push(self.predicate()?);
            }
        }
        let mut group_by = Vec::new();
        if self.eat_keyword(Keyword::Group) {
            self.expect_keyword(Keyword::By)?;
            group_by.push(self.colref()?);
            while self.eat_symbol(Symbol::Comma) {
                group_by.push(self.colref()?);
            }
        }
        let mut order_by = Vec::new();
        if self.eat_keyword(Keyword::Order) {
            self.expect_keyword(Keyword::By)?;
            loop {
                let expr = self.expr()?;
                let direction = if self.eat_keyword(Keyword::Desc) {
                    SortDirection::Desc
                } else {
                    self.eat_keyword(Keyword::Asc);
                    SortDirection::Asc
                };
                order_by.push(OrderItem { expr, direction });
                if !self.eat_symbol(Symbol::Comma) {
                    break;
                }
            }
        }
        Ok(QueryAst { select_items, from, joins, where_clause, group_by, order_by })
    }

    fn ident_list(&mut self) -> PResult<Vec<Ident>> {
        self.expect_symbol(Symbol::LParen)?;
        let mut names = vec![self.ident()?];
        while self.eat_symbol(Symbol::Comma) {
            names.push(self.ident()?);
        }
        self.expect_symbol(Symbol::RParen)?;
        Ok(names)
    }

    fn create_table(&mut self) -> PResult<CreateTableAst> {
        self.expect_word("CREATE")?;
        self.expect_word("TABLE")?;
        let name = self.ident()?;
        self.expect_symbol(Symbol::LParen)?;
        let mut ast =
            CreateTableAst { name, columns: vec![], primary_key: vec![], foreign_keys: vec![], exactly_one: vec![] };
        loop {
            if self.at_word(0, "PRIMARY") && self.at_word(1, "KEY") {
                self.pos += 2;
                if !ast.primary_key.is_empty() {
                    return self.error("a single PRIMARY KEY clause");
                }
                ast.primary_key = self.ident_list()?;
            } else if self.at_word(0, "FOREIGN") && self.at_word(1, "KEY") {
                self.pos += 2;
                let columns = self.ident_list()?;
                self.expect_word("REFERENCES")?;
                let foreign_table = self.ident()?;
                let foreign_columns = self.ident_list()?;
                ast.foreign_keys.push(ForeignKeyAst { columns, foreign_table, foreign_columns });
            } else if self.at_word(0, "CHECK") && self.at_word(1, "EXACTLY") {
                self.pos += 2;
                self.expect_word("ONE")?;
                ast.exactly_one.push(self.ident_list()?);
            } else {
                let col = self.ident()?;
                let ty = match self.peek() {
                    Some(t) if t.kind == TokenKind::Identifier => ColumnType::from_sql_name(&t.text),
                    _ => None,
                };
                match ty {
                    Some(ty) => {
                        self.pos += 1;
                        ast.columns.push((col, ty));
                    }
                    None => return self.error("column type (INT, DECIMAL, TEXT or BOOL)"),
                }
            }
            if !self.eat_symbol(Symbol::Comma) {
                break;
            }
        }
        self.expect_symbol(Symbol::RParen)?;
        Ok(ast)
    }

    fn finish(&mut self) -> PResult<()> {
        self.eat_symbol(Symbol::Semicolon);
        match self.peek() {
            Some(t) => Err(ParseError::TrailingInput(t.position)),
            None => Ok(()),
        }
    }
}

/// Parses a `SELECT` statement.
pub fn parse(tokens: &[Token]) -> Result<QueryAst, ParseError> {
    let mut p = Parser { tokens, pos: 0 };
    let q = p.query()?;
    p.finish()?;
    Ok(q)
}

/// Parses either a `SELECT` or a `CREATE TABLE` statement.
pub fn parse_statement(tokens: &[Token]) -> Result<Statement, ParseError> {
    let mut p = Parser { tokens, pos: 0 };
    let stmt =
        if p.at_word(0, "CREATE") { Statement::CreateTable(p.create_table()?) } else { Statement::Select(p.query()?) };
    p.finish()?;
    Ok(stmt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sql::token::tokenize;

    fn parse_str(src: &str) -> PResult<QueryAst> {
        parse(&tokenize(src).unwrap())
    }

    #[test]
    fn minimal_query() {
        let q = parse_str("SELECT x FROM t").unwrap();
        assert_eq!(q.select_items.len(), 1);
        assert_eq!(q.from.name.text, "t");
        assert!(q.joins.is_empty() && q.where_clause.is_empty() && q.group_by.is_empty() && q.order_by.is_empty());
    }

    #[test]
    fn misspelled_select_points_at_start() {
        let err = parse_str("SELEC x").unwrap_err();
        assert_eq!(err.position(), Position { line: 1, column: 1 });
        assert!(matches!(err, ParseError::UnexpectedToken { ref expected, .. } if expected == "SELECT"));
    }

    #[test]
    fn trailing_input() {
        assert_eq!(
            parse_str("SELECT x FROM t; SELECT").unwrap_err(),
            ParseError::TrailingInput(Position { line: 1, column: 18 })
        );
        assert!(matches!(parse_str("SELECT x FROM t u v").unwrap_err(), ParseError::TrailingInput(_)));
    }

    #[test]
    fn unexpected_end() {
        let err = parse_str("SELECT x FROM").unwrap_err();
        assert!(matches!(err, ParseError::UnexpectedToken { ref found, .. } if found == "end of input"), "{err}");
    }

    #[test]
    fn aliases() {
        let q = parse_str("SELECT SUM(v) AS 'TOTAL', a.x AS `y z` FROM t AS a").unwrap();
        assert_eq!(q.select_items[0].alias.as_deref(), Some("TOTAL"));
        assert_eq!(q.select_items[1].alias.as_deref(), Some("y z"));
        assert_eq!(q.from.alias.as_ref().unwrap().text, "a");
    }

    #[test]
    fn where_accepts_column_comparisons() {
        let q = parse_str("SELECT x FROM t WHERE x >= y AND z <> 'a' AND w < 2.5").unwrap();
        assert_eq!(q.where_clause.len(), 3);
        assert!(matches!(q.where_clause[0].right, Operand::Column(_)));
        assert_eq!(q.where_clause[2].right, Operand::Literal(Literal::Number("2.5".into())));
    }

    #[test]
    fn order_directions() {
        let q = parse_str("SELECT x FROM t ORDER BY x, y DESC, z ASC").unwrap();
        let dirs: Vec<_> = q.order_by.iter().map(|o| o.direction).collect();
        assert_eq!(dirs, [SortDirection::Asc, SortDirection::Desc, SortDirection::Asc]);
    }

    #[test]
    fn create_table() {
        let toks = tokenize(
            "create table `Extra` (`id` INT, name text, PRIMARY KEY (id), \
             FOREIGN KEY (id) REFERENCES Platforms (Platform_id), CHECK EXACTLY ONE (a, b));",
        )
        .unwrap();
        let Statement::CreateTable(ct) = parse_statement(&toks).unwrap() else { panic!() };
        assert_eq!(ct.name.text, "Extra");
        assert_eq!(ct.columns.len(), 2);
        assert_eq!(ct.columns[1].1, ColumnType::Text);
        assert_eq!(ct.primary_key[0].text, "id");
        assert_eq!(ct.foreign_keys[0].foreign_table.text, "Platforms");
        assert_eq!(ct.exactly_one.len(), 1);
        let bad = tokenize("CREATE TABLE t (x BLOB)").unwrap();
        assert!(parse_statement(&bad).is_err());
    }

    #[test]
    fn debug_text_is_stable() {
        let q = parse_str(
            "SELECT COUNT(Actor_id), Nationality FROM Actors GROUP BY Nationality ORDER BY COUNT(Actor_id) DESC;",
        )
        .unwrap();
        assert_eq!(
            q.to_debug_text(),
            "Query\n  Select\n    COUNT(Actor_id)\n    Nationality\n  From Actors\n  GroupBy\n    Nationality\n  \
             OrderBy\n    COUNT(Actor_id) DESC\n"
        );
    }
}
