//! Tokenizer for the query dialect.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

/// 1-based line and column (in characters) of a token's first byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Select,
    From,
    Join,
    On,
    Where,
    And,
    Group,
    By,
    Order,
    Asc,
    Desc,
    As,
    Count,
    Sum,
}

impl Keyword {
    const ALL: [Keyword; 14] = [
        Keyword::Select,
        Keyword::From,
        Keyword::Join,
        Keyword::On,
        Keyword::Where,
        Keyword::And,
        Keyword::Group,
        Keyword::By,
        Keyword::Order,
        Keyword::Asc,
        Keyword::Desc,
        Keyword::As,
        Keyword::Count,
        Keyword::Sum,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Select => "SELECT",
            Keyword::From => "FROM",
            Keyword::Join => "JOIN",
            Keyword::On => "ON",
            Keyword::Where => "WHERE",
            Keyword::And => "AND",
            Keyword::Group => "GROUP",
            Keyword::By => "BY",
            Keyword::Order => "ORDER",
            Keyword::Asc => "ASC",
            Keyword::Desc => "DESC",
            Keyword::As => "AS",
            Keyword::Count => "COUNT",
            Keyword::Sum => "SUM",
        }
    }

    pub fn lookup(word: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str().eq_ignore_ascii_case(word))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Comma,
    Dot,
    LParen,
    RParen,
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    Semicolon,
}

impl Symbol {
    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::Comma => ",",
            Symbol::Dot => ".",
            Symbol::LParen => "(",
            Symbol::RParen => ")",
            Symbol::Eq => "=",
            Symbol::NotEq => "<>",
            Symbol::Lt => "<",
            Symbol::LtEq => "<=",
            Symbol::Gt => ">",
            Symbol::GtEq => ">=",
            Symbol::Semicolon => ";",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Identifier,
    QuotedIdentifier,
    StringLiteral,
    NumberLiteral,
    Symbol(Symbol),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "keyword {}", k.as_str()),
            TokenKind::Identifier => f.write_str("identifier"),
            TokenKind::QuotedIdentifier => f.write_str("quoted identifier"),
            TokenKind::StringLiteral => f.write_str("string literal"),
            TokenKind::NumberLiteral => f.write_str("number"),
            TokenKind::Symbol(s) => write!(f, "'{}'", s.as_str()),
        }
    }
}

/// A lexical token. For quoted identifiers and string literals `text` is the
/// unescaped content without the surrounding quotes; `span` always covers
/// the full source bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Range<usize>,
    pub position: Position,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Identifier | TokenKind::NumberLiteral => write!(f, "{} `{}`", self.kind, self.text),
            TokenKind::QuotedIdentifier => write!(f, "{} `{}`", self.kind, self.text),
            TokenKind::StringLiteral => write!(f, "{} '{}'", self.kind, self.text),
            _ => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TokenizeError {
    #[error("{0}: unterminated string literal")]
    UnterminatedString(Position),
    #[error("{0}: unterminated quoted identifier")]
    UnterminatedQuotedIdentifier(Position),
    #[error("{position}: unexpected character {ch:?}")]
    UnknownCharacter { ch: char, position: Position },
}

impl TokenizeError {
    pub fn position(&self) -> Position {
        match self {
            TokenizeError::UnterminatedString(p) | TokenizeError::UnterminatedQuotedIdentifier(p) => *p,
            TokenizeError::UnknownCharacter { position, .. } => *position,
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.src[self.offset..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn position(&self) -> Position {
        Position { line: self.line, column: self.column }
    }

    /// Consumes a quoted run ending at `quote`; a doubled quote stands for
    /// one literal quote character.
    fn quoted(&mut self, quote: char) -> Option<String> {
        let mut text = String::new();
        loop {
            match self.bump()? {
                c if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        text.push(quote);
                    } else {
                        return Some(text);
                    }
                }
                c => text.push(c),
            }
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, TokenizeError> {
    let mut cur = Cursor { src, offset: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let start = cur.offset;
        let position = cur.position();
        let (kind, text) = match c {
            '`' => {
                cur.bump();
                let text = cur.quoted('`').ok_or(TokenizeError::UnterminatedQuotedIdentifier(position))?;
                (TokenKind::QuotedIdentifier, text)
            }
            '\'' => {
                cur.bump();
                let text = cur.quoted('\'').ok_or(TokenizeError::UnterminatedString(position))?;
                (TokenKind::StringLiteral, text)
            }
            c if c.is_ascii_digit() => {
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
                if cur.peek() == Some('.') && cur.peek_second().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                    while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                        cur.bump();
                    }
                }
                (TokenKind::NumberLiteral, src[start..cur.offset].to_owned())
            }
            c if is_ident_start(c) => {
                while cur.peek().is_some_and(is_ident_continue) {
                    cur.bump();
                }
                let word = &src[start..cur.offset];
                let kind = Keyword::lookup(word).map_or(TokenKind::Identifier, TokenKind::Keyword);
                (kind, word.to_owned())
            }
            _ => {
                cur.bump();
                let next = cur.peek();
                let symbol = match (c, next) {
                    ('<', Some('=')) => Some(Symbol::LtEq),
                    ('<', Some('>')) => Some(Symbol::NotEq),
                    ('>', Some('=')) => Some(Symbol::GtEq),
                    _ => None,
                };
                let symbol = match symbol {
                    Some(s) => {
                        cur.bump();
                        s
                    }
                    None => match c {
                        ',' => Symbol::Comma,
                        '.' => Symbol::Dot,
                        '(' => Symbol::LParen,
                        ')' => Symbol::RParen,
                        '=' => Symbol::Eq,
                        '<' => Symbol::Lt,
                        '>' => Symbol::Gt,
                        ';' => Symbol::Semicolon,
                        other => return Err(TokenizeError::UnknownCharacter { ch: other, position }),
                    },
                };
                (TokenKind::Symbol(symbol), src[start..cur.offset].to_owned())
            }
        };
        tokens.push(Token { kind, text, span: start..cur.offset, position });
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).unwrap().into_iter().map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn where_imdb_rating() {
        assert_eq!(
            kinds("WHERE `IMDB rating` = 10"),
            vec![
                (TokenKind::Keyword(Keyword::Where), "WHERE".into()),
                (TokenKind::QuotedIdentifier, "IMDB rating".into()),
                (TokenKind::Symbol(Symbol::Eq), "=".into()),
                (TokenKind::NumberLiteral, "10".into()),
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  \n\t").unwrap().is_empty());
    }

    #[test]
    fn string_literal_excludes_quotes() {
        assert_eq!(kinds("'S.S. Wilson'"), vec![(TokenKind::StringLiteral, "S.S. Wilson".into())]);
        assert_eq!(kinds("'We''ll Get By'"), vec![(TokenKind::StringLiteral, "We'll Get By".into())]);
    }

    #[test]
    fn quoted_identifiers_allow_punctuation() {
        assert_eq!(kinds("`required(y/n)`")[0].1, "required(y/n)");
        assert_eq!(kinds("`Show_id-name`")[0].1, "Show_id-name");
        assert_eq!(kinds("`a``b`")[0].1, "a`b");
    }

    #[test]
    fn operators() {
        let ops: Vec<_> = kinds("= <> < <= > >= ; , . ( )").into_iter().map(|(k, _)| k).collect();
        use Symbol::*;
        let want: Vec<_> = [Eq, NotEq, Lt, LtEq, Gt, GtEq, Semicolon, Comma, Dot, LParen, RParen]
            .into_iter()
            .map(TokenKind::Symbol)
            .collect();
        assert_eq!(ops, want);
        assert_eq!(kinds("Seasons<2").len(), 3);
    }

    #[test]
    fn keywords_are_case_insensitive() {
        assert_eq!(kinds("select")[0].0, TokenKind::Keyword(Keyword::Select));
        assert_eq!(kinds("Order")[0].0, TokenKind::Keyword(Keyword::Order));
        assert_eq!(kinds("Seasons")[0].0, TokenKind::Identifier);
    }

    #[test]
    fn numbers() {
        assert_eq!(kinds("8.5"), vec![(TokenKind::NumberLiteral, "8.5".into())]);
        // a trailing dot is not part of the number
        assert_eq!(kinds("8.").len(), 2);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            tokenize("x = 'abc").unwrap_err(),
            TokenizeError::UnterminatedString(Position { line: 1, column: 5 })
        );
        assert_eq!(
            tokenize("SELECT\n  `abc").unwrap_err(),
            TokenizeError::UnterminatedQuotedIdentifier(Position { line: 2, column: 3 })
        );
        assert_eq!(
            tokenize("a * b").unwrap_err(),
            TokenizeError::UnknownCharacter { ch: '*', position: Position { line: 1, column: 3 } }
        );
    }

    #[test]
    fn positions_track_lines() {
        let toks = tokenize("SELECT a\nFROM t").unwrap();
        assert_eq!(toks[2].position, Position { line: 2, column: 1 });
        assert_eq!(toks[3].position, Position { line: 2, column: 6 });
    }

    proptest! {
        // Tokens plus the whitespace between them reconstruct the input.
        #[test]
        fn spans_cover_every_byte(src in "[ a-zA-Z0-9_,.()=<>;'`\n]{0,60}") {
            if let Ok(tokens) = tokenize(&src) {
                let mut at = 0;
                let mut rebuilt = String::new();
                for t in &tokens {
                    prop_assert!(src[at..t.span.start].chars().all(char::is_whitespace));
                    rebuilt.push_str(&src[at..t.span.start]);
                    rebuilt.push_str(&src[t.span.clone()]);
                    at = t.span.end;
                }
                prop_assert!(src[at..].chars().all(char::is_whitespace));
                rebuilt.push_str(&src[at..]);
                prop_assert_eq!(rebuilt, src);
            }
        }
    }
}
