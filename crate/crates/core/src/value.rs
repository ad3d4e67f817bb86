//! Scalar values and column types.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use rust_decimal::prelude::ToPrimitive;
pub use rust_decimal::Decimal;

/// One tuple. Column order follows the owning table's definition.
pub type Row = Vec<Value>;

/// Declared type of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColumnType {
    Int,
    Decimal,
    Text,
    Bool,
}

impl ColumnType {
    pub fn is_numeric(self) -> bool {
        matches!(self, ColumnType::Int | ColumnType::Decimal)
    }

    /// Values of these two types can be compared with each other.
    pub fn comparable_with(self, other: ColumnType) -> bool {
        self == other || (self.is_numeric() && other.is_numeric())
    }

    /// Parses the textual (CSV) form of a value of this type.
    ///
    /// Booleans are `0` or `1`. Decimals accept plain positional notation.
    pub fn parse_value(self, text: &str) -> Option<Value> {
        match self {
            ColumnType::Int => text.parse().ok().map(Value::Int),
            ColumnType::Decimal => parse_decimal(text).map(Value::Decimal),
            ColumnType::Text => Some(Value::Text(text.to_owned())),
            ColumnType::Bool => match text {
                "0" => Some(Value::Bool(false)),
                "1" => Some(Value::Bool(true)),
                _ => None,
            },
        }
    }

    pub fn sql_name(self) -> &'static str {
        match self {
            ColumnType::Int => "INT",
            ColumnType::Decimal => "DECIMAL",
            ColumnType::Text => "TEXT",
            ColumnType::Bool => "BOOL",
        }
    }

    /// Accepts the spellings understood by `CREATE TABLE`.
    pub fn from_sql_name(name: &str) -> Option<ColumnType> {
        match name.to_ascii_uppercase().as_str() {
            "INT" | "INTEGER" | "BIGINT" => Some(ColumnType::Int),
            "DECIMAL" | "NUMERIC" => Some(ColumnType::Decimal),
            "TEXT" | "VARCHAR" => Some(ColumnType::Text),
            "BOOL" | "BOOLEAN" => Some(ColumnType::Bool),
            _ => None,
        }
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.sql_name())
    }
}

fn parse_decimal(text: &str) -> Option<Decimal> {
    let body = text.strip_prefix('-').unwrap_or(text);
    let mut parts = body.splitn(2, '.');
    let int_part = parts.next()?;
    let frac_part = parts.next();
    let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if int_part.is_empty() || !digits_ok(int_part) {
        return None;
    }
    if let Some(frac) = frac_part {
        if frac.is_empty() || !digits_ok(frac) {
            return None;
        }
    }
    Decimal::from_str(text).ok()
}

/// A tagged scalar.
///
/// `Int` and `Decimal` form one numeric domain: they compare, test equal and
/// hash by numeric value, so `Int(10) == Decimal(10.0)`.
#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Decimal(Decimal),
    Text(String),
    Bool(bool),
}

impl Value {
    pub fn column_type(&self) -> ColumnType {
        match self {
            Value::Int(_) => ColumnType::Int,
            Value::Decimal(_) => ColumnType::Decimal,
            Value::Text(_) => ColumnType::Text,
            Value::Bool(_) => ColumnType::Bool,
        }
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    /// Decimal from its textual form; panics on malformed input.
    pub fn decimal(s: &str) -> Value {
        Value::Decimal(parse_decimal(s).unwrap_or_else(|| panic!("malformed decimal {s:?}")))
    }

    fn class_rank(&self) -> u8 {
        match self {
            Value::Bool(_) => 0,
            Value::Int(_) | Value::Decimal(_) => 1,
            Value::Text(_) => 2,
        }
    }

    fn as_decimal(&self) -> Option<Decimal> {
        match self {
            Value::Int(i) => Some(Decimal::from(*i)),
            Value::Decimal(d) => Some(*d),
            _ => None,
        }
    }

    /// Canonical text form: booleans as `0`/`1`, decimals without trailing
    /// zeros.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Decimal(d) => write!(f, "{}", d.normalize()),
            Value::Text(s) => f.write_str(s),
            Value::Bool(b) => f.write_str(if *b { "1" } else { "0" }),
        }
    }
}

impl Ord for Value {
    /// Total order: booleans, then numbers (by value), then text (bytewise).
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            _ => match (self.as_decimal(), other.as_decimal()) {
                (Some(a), Some(b)) => a.cmp(&b),
                _ => self.class_rank().cmp(&other.class_rank()),
            },
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Int(i) => {
                1u8.hash(state);
                i.hash(state);
            }
            Value::Decimal(d) => {
                let n = d.normalize();
                if n.scale() == 0 {
                    if let Some(i) = n.to_i64() {
                        1u8.hash(state);
                        i.hash(state);
                        return;
                    }
                }
                2u8.hash(state);
                n.mantissa().hash(state);
                n.scale().hash(state);
            }
            Value::Text(s) => {
                3u8.hash(state);
                s.hash(state);
            }
            Value::Bool(b) => {
                0u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<Decimal> for Value {
    fn from(v: Decimal) -> Self {
        Value::Decimal(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::hash_map::DefaultHasher;

    fn hash_of(v: &Value) -> u64 {
        let mut h = DefaultHasher::new();
        v.hash(&mut h);
        h.finish()
    }

    #[test]
    fn int_and_decimal_compare_numerically() {
        assert_eq!(Value::Int(10), Value::decimal("10.0"));
        assert_eq!(hash_of(&Value::Int(10)), hash_of(&Value::decimal("10.00")));
        assert!(Value::decimal("9.5") < Value::Int(10));
        assert_ne!(Value::decimal("9.5"), Value::decimal("9.55"));
        assert_eq!(hash_of(&Value::decimal("9.50")), hash_of(&Value::decimal("9.5")));
    }

    #[test]
    fn decimals_render_without_trailing_zeros() {
        assert_eq!(Value::decimal("10.0").to_string(), "10");
        assert_eq!(Value::decimal("8.50").to_string(), "8.5");
        assert_eq!(Value::Bool(true).to_string(), "1");
    }

    #[test]
    fn parse_by_type() {
        assert_eq!(ColumnType::Int.parse_value("42"), Some(Value::Int(42)));
        assert_eq!(ColumnType::Int.parse_value("old"), None);
        assert_eq!(ColumnType::Bool.parse_value("1"), Some(Value::Bool(true)));
        assert_eq!(ColumnType::Bool.parse_value("yes"), None);
        assert_eq!(ColumnType::Decimal.parse_value("7.25"), Some(Value::decimal("7.25")));
        assert_eq!(ColumnType::Decimal.parse_value("1e3"), None);
        assert_eq!(ColumnType::Decimal.parse_value(".5"), None);
    }

    #[test]
    fn cross_class_order_is_total() {
        let mut v = vec![Value::text("a"), Value::Int(1), Value::Bool(true), Value::decimal("0.5")];
        v.sort();
        assert_eq!(v, vec![Value::Bool(true), Value::decimal("0.5"), Value::Int(1), Value::text("a")]);
    }
}
