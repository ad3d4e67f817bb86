//! Seeded generators for random databases and dialect queries.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{builtin_schema, quote_ident, CheckConstraint, Database, TableDef};
use crate::value::{ColumnType, Decimal, Row, Value};

const TEXTS: &[&str] = &[
    "S.S. Wilson",
    "We'll Meet Again",
    "Adventure",
    "Comedy",
    "Male",
    "Female",
    "India",
    "USA",
    "Netflix",
    "a",
    "A",
    "",
];

fn random_value(rng: &mut ChaCha8Rng, ty: ColumnType) -> Value {
    match ty {
        ColumnType::Int => Value::Int(rng.gen_range(0..40)),
        ColumnType::Decimal => Value::Decimal(Decimal::new(rng.gen_range(0..=20) * 5, 1)),
        ColumnType::Text => Value::text(*TEXTS.choose(rng).unwrap()),
        ColumnType::Bool => Value::Bool(rng.gen()),
    }
}

fn random_row(rng: &mut ChaCha8Rng, db: &Database, def: &TableDef, key_range: i64) -> Option<Row> {
    let mut row: Vec<Option<Value>> = vec![None; def.arity()];
    // widest foreign keys first so composite references fix their columns together
    let mut fks: Vec<_> = def.foreign_keys().iter().collect();
    fks.sort_by_key(|fk| std::cmp::Reverse(fk.local_columns.len()));
    for fk in fks {
        let locals: Vec<usize> = fk.local_columns.iter().map(|c| def.column_position(c).unwrap()).collect();
        if locals.iter().all(|&p| row[p].is_some()) {
            continue;
        }
        let parent = db.table(&fk.foreign_table)?;
        let candidates: Vec<&Row> = parent
            .store()
            .rows()
            .iter()
            .filter(|r| {
                fk.foreign_columns.iter().zip(&locals).all(|(fc, &lp)| {
                    let fp = parent.def().column_position(fc).unwrap();
                    row[lp].as_ref().is_none_or(|v| *v == r[fp])
                })
            })
            .collect();
        let chosen = candidates.choose(rng)?;
        for (fc, &lp) in fk.foreign_columns.iter().zip(&locals) {
            row[lp] = Some(chosen[parent.def().column_position(fc).unwrap()].clone());
        }
    }
    for (i, col) in def.columns().iter().enumerate() {
        if row[i].is_none() {
            let v = if def.pk_positions().contains(&i) && col.col_type == ColumnType::Int {
                Value::Int(rng.gen_range(0..key_range))
            } else {
                random_value(rng, col.col_type)
            };
            row[i] = Some(v);
        }
    }
    for check in def.checks() {
        let CheckConstraint::ExactlyOneTrue(cols) = check;
        let pick = rng.gen_range(0..cols.len());
        for (k, c) in cols.iter().enumerate() {
            row[def.column_position(c).unwrap()] = Some(Value::Bool(k == pick));
        }
    }
    Some(row.into_iter().map(Option::unwrap).collect())
}

/// A database over the built-in schema with up to `max_rows` rows per table.
/// Every foreign key holds by construction. Deterministic in `seed`.
pub fn random_database(seed: u64, max_rows: usize) -> Database {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut db = builtin_schema();
    let order: Vec<String> = db.load_order().iter().map(|s| s.to_string()).collect();
    let key_range = (2 * max_rows as i64).max(8);
    for table in order {
        let target = rng.gen_range(0..=max_rows);
        let def = db.table(&table).unwrap().def().clone();
        let mut attempts = 0;
        while db.table(&table).unwrap().len() < target && attempts < target * 4 {
            attempts += 1;
            let Some(row) = random_row(&mut rng, &db, &def, key_range) else { break };
            // duplicate keys are simply skipped
            let _ = db.insert(&table, row);
        }
    }
    db
}

struct Scope {
    table: String,
    alias: String,
}

fn column_ref(alias: &str, column: &str) -> String {
    format!("{alias}.{}", quote_ident(column))
}

fn literal(rng: &mut ChaCha8Rng, ty: ColumnType) -> String {
    match random_value(rng, ty) {
        Value::Text(s) => format!("'{}'", s.replace('\'', "''")),
        Value::Decimal(d) => {
            // an integer-looking literal against a decimal column now and then
            let n = d.normalize();
            if n.scale() == 0 && rng.gen_bool(0.5) {
                n.to_string()
            } else {
                format!("{:.1}", d)
            }
        }
        v => v.render(),
    }
}

/// A join edge from an in-scope table to a new table:
/// `(scope index, scope column, new table, new column)`.
fn join_edges(db: &Database, scope: &[Scope]) -> Vec<(usize, String, String, String)> {
    let mut edges = Vec::new();
    for (i, s) in scope.iter().enumerate() {
        let def = db.table(&s.table).unwrap().def();
        for t in db.tables() {
            // s references t
            for fk in def.foreign_keys().iter().filter(|fk| fk.foreign_table == t.name()) {
                for (l, f) in fk.local_columns.iter().zip(&fk.foreign_columns) {
                    edges.push((i, l.clone(), t.name().to_owned(), f.clone()));
                }
            }
            for fk in t.def().foreign_keys() {
                for (l, f) in fk.local_columns.iter().zip(&fk.foreign_columns) {
                    // t references s
                    if fk.foreign_table == s.table {
                        edges.push((i, f.clone(), t.name().to_owned(), l.clone()));
                    }
                    // s and t reference the same parent column
                    for sfk in def.foreign_keys().iter().filter(|x| x.foreign_table == fk.foreign_table) {
                        for (sl, sf) in sfk.local_columns.iter().zip(&sfk.foreign_columns) {
                            if sf == f {
                                edges.push((i, sl.clone(), t.name().to_owned(), l.clone()));
                            }
                        }
                    }
                }
            }
        }
    }
    edges.sort();
    edges.dedup();
    edges
}

fn random_query(rng: &mut ChaCha8Rng, db: &Database) -> String {
    let names = db.table_names();
    let first = names.choose(rng).unwrap().to_string();
    let mut scope = vec![Scope { table: first, alias: "t0".into() }];
    let mut sql_joins = Vec::new();
    let joins = rng.gen_range(0..=6);
    for _ in 0..joins {
        let edges = join_edges(db, &scope);
        let Some((i, col, table, new_col)) = edges.choose(rng).cloned() else { break };
        let alias = format!("t{}", scope.len());
        let (a, b) = (column_ref(&scope[i].alias, &col), column_ref(&alias, &new_col));
        let on = if rng.gen_bool(0.5) { format!("{a} = {b}") } else { format!("{b} = {a}") };
        sql_joins.push(format!("JOIN {} {alias} ON {on}", quote_ident(&table)));
        scope.push(Scope { table, alias });
    }

    let columns: Vec<(String, ColumnType)> = scope
        .iter()
        .flat_map(|s| {
            db.table(&s.table).unwrap().def().columns().iter().map(|c| (column_ref(&s.alias, &c.name), c.col_type))
        })
        .collect();
    let pick = |rng: &mut ChaCha8Rng| columns.choose(rng).unwrap().clone();

    let mut predicates = Vec::new();
    for _ in 0..rng.gen_range(0..=4) {
        let (col, ty) = pick(rng);
        let op = *["=", "<>", "<", "<=", ">", ">="].choose(rng).unwrap();
        let comparable: Vec<&(String, ColumnType)> =
            columns.iter().filter(|(c, t)| *c != col && t.comparable_with(ty)).collect();
        let right = match comparable.choose(rng) {
            Some((c, _)) if rng.gen_bool(0.2) => c.clone(),
            _ => literal(rng, ty),
        };
        predicates.push(format!("{col} {op} {right}"));
    }

    let mut select = Vec::new();
    let mut group_by = Vec::new();
    let mut order_by = Vec::new();
    let dir = |rng: &mut ChaCha8Rng| *["", " ASC", " DESC"].choose(rng).unwrap();
    let agg = |rng: &mut ChaCha8Rng| {
        let numeric: Vec<_> = columns.iter().filter(|(_, t)| t.is_numeric()).collect();
        match numeric.choose(rng) {
            Some((c, _)) if rng.gen_bool(0.5) => format!("SUM({c})"),
            _ => format!("COUNT({})", pick(rng).0),
        }
    };
    let alias = |rng: &mut ChaCha8Rng, k: usize| match rng.gen_range(0..6) {
        0 => format!(" AS c{k}"),
        1 => format!(" AS 'C{k}'"),
        _ => String::new(),
    };
    if rng.gen_bool(0.35) {
        for _ in 0..rng.gen_range(0..=2) {
            let (c, _) = pick(rng);
            if !group_by.contains(&c) {
                group_by.push(c);
            }
        }
        let mut items: Vec<String> = group_by.iter().filter(|_| rng.gen_bool(0.8)).cloned().collect();
        for _ in 0..rng.gen_range(1..=2) {
            items.push(agg(rng));
        }
        items.shuffle(rng);
        for (k, item) in items.iter().enumerate() {
            select.push(format!("{item}{}", alias(rng, k)));
        }
        for _ in 0..rng.gen_range(0..=2) {
            let key = match group_by.choose(rng) {
                Some(g) if rng.gen_bool(0.5) => g.clone(),
                _ => agg(rng),
            };
            order_by.push(format!("{key}{}", dir(rng)));
        }
    } else {
        for k in 0..rng.gen_range(1..=4) {
            select.push(format!("{}{}", pick(rng).0, alias(rng, k)));
        }
        for _ in 0..rng.gen_range(0..=2) {
            order_by.push(format!("{}{}", pick(rng).0, dir(rng)));
        }
    }

    let mut sql = format!("SELECT {}\nFROM {} t0", select.join(", "), quote_ident(&scope[0].table));
    for j in &sql_joins {
        sql.push('\n');
        sql.push_str(j);
    }
    if !predicates.is_empty() {
        sql.push_str("\nWHERE ");
        sql.push_str(&predicates.join(" AND "));
    }
    if !group_by.is_empty() {
        sql.push_str("\nGROUP BY ");
        sql.push_str(&group_by.join(", "));
    }
    if !order_by.is_empty() {
        sql.push_str("\nORDER BY ");
        sql.push_str(&order_by.join(", "));
    }
    sql
}

/// `count` random queries over `db`'s schema, each of which binds.
/// Deterministic in `seed`.
pub fn generate_queries(seed: u64, db: &Database, count: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_query(&mut rng, db)).collect()
}
