//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ottdb::access::{authorize, Action, AuditLog, Role, Session};
use ottdb::catalog::{CheckConstraint, TableDef, HUB_TABLE};
use ottdb::engine::{execute, plan};
use ottdb::oracle::{generate_queries, oracle, oracle_with_deadline, random_database, OracleError};
use ottdb::reference_queries::{self, Q2, Q3, Q5, Q6};
use ottdb::sql::{bind, compile, parse, tokenize};
use ottdb::storage::StorageError;
use ottdb::value::Decimal;
use ottdb::{builtin_schema, ColumnType, Database, Row, Value};

type Outcome = Result<String, String>;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/paper")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sorted(mut rows: Vec<Row>) -> Vec<Row> {
    rows.sort();
    rows
}

fn criterion_1() -> Outcome {
    let db = builtin_schema();
    let start = Instant::now();
    for (i, sql) in reference_queries::ALL.iter().enumerate() {
        let tokens = tokenize(sql).map_err(|e| format!("Q{}: {e}", i + 1))?;
        let ast = parse(&tokens).map_err(|e| format!("Q{}: {e}", i + 1))?;
        let bound = bind(&ast, &db).map_err(|e| format!("Q{}: {e}", i + 1))?;
        let _ = plan(&bound);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("6/6 queries tokenize, parse, bind and plan in {elapsed:?}"))
}

/// Reads a fixture CSV with plain string fields, independent of the engine.
fn read_fixture(file: &str) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_path(fixture_dir().join(file)).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| headers.iter().zip(rec.unwrap().iter()).map(|(h, v)| (h.to_owned(), v.to_owned())).collect())
        .collect()
}

fn criterion_2() -> Outcome {
    let mut db = builtin_schema();
    db.load_dataset(&fixture_dir()).map_err(|e| e.to_string())?;
    let run = |sql: &str| execute(&db, &plan(&compile(sql, &db).unwrap())).unwrap();

    let q3 = run(Q3);
    let want3: Vec<Row> = vec![
        vec!["For the Love of Ada".into(), "S.S. Wilson".into(), Value::Int(1974)],
        vec!["The Associates".into(), "S.S. Wilson".into(), Value::Int(1988)],
    ];
    ensure(q3.rows == want3, || format!("Q3 returned {:?}", q3.rows))?;

    let names: HashMap<String, String> =
        read_fixture("Show_id-name.csv").into_iter().map(|r| (r["Show_id"].clone(), r["Show Name"].clone())).collect();
    let ten = Decimal::from(10);
    let mut want2: Vec<Row> = read_fixture("Critics_Rating.csv")
        .into_iter()
        .filter(|r| r["IMDB rating"].parse::<Decimal>().unwrap() == ten)
        .map(|r| vec![Value::text(names[&r["Show_id"]].clone()), Value::Int(10)])
        .collect();
    want2.sort();
    let q2 = run(Q2);
    ensure(sorted(q2.rows.clone()) == want2, || format!("Q2 multiset differs: {:?}", q2.rows))?;
    let published = [
        "Make Room for Granddaddy",
        "Dinah's Place",
        "From a Bird's Eye View",
        "The Starlost",
        "Amy Prentiss",
        "My Son Reuben",
        "Adams of Eagle Lake",
        "Eigener Herd ist Goldes wert",
        "Kate McShane",
        "Three for the Road",
        "Star Maidens",
        "The Betty White Show",
        "The Marilyn McCoo and Billy Davis, Jr. Show",
        "Hedebornna",
        "Send in the Girls",
        "The Lazarus Syndrome",
        "A Man Called Sloane",
        "Sapphire & Steel",
    ];
    let got2: Vec<Row> = sorted(published.iter().map(|n| vec![Value::text(*n), Value::Int(10)]).collect());
    ensure(sorted(q2.rows.clone()) == got2, || "Q2 does not match the 18 published shows".into())?;

    let prods: HashMap<String, String> = read_fixture("Productions.csv")
        .into_iter()
        .map(|r| (r["Production_id"].clone(), r["Production_Name"].clone()))
        .collect();
    let want5: Vec<Row> = sorted(
        read_fixture("TV_series.csv")
            .into_iter()
            .filter(|r| r["Seasons"].parse::<i64>().unwrap() < 2 && r["Episodes"].parse::<i64>().unwrap() < 6)
            .map(|r| {
                vec![
                    Value::Int(r["Show_id"].parse().unwrap()),
                    Value::text(names[&r["Show_id"]].clone()),
                    Value::text(prods[&r["Production_id"]].clone()),
                    Value::Int(r["Seasons"].parse().unwrap()),
                    Value::Int(r["Episodes"].parse().unwrap()),
                ]
            })
            .collect(),
    );
    let q5 = run(Q5);
    ensure(sorted(q5.rows.clone()) == want5, || format!("Q5 differs: {:?}", q5.rows))?;
    let three_men: Row = vec!["Three Men of the City".into(), "Forward Media".into(), Value::Int(1), Value::Int(5)];
    ensure(q5.rows.iter().any(|r| r[1..] == three_men[..]), || "Q5 lacks Three Men of the City".into())?;
    Ok(format!(
        "Q3 = 2 exact rows, Q2 = {} shows rated 10, Q5 = {} rows incl. Three Men of the City",
        q2.len(),
        q5.len()
    ))
}

fn criterion_3() -> Outcome {
    let schema = builtin_schema();
    let start = Instant::now();
    let mut compared = 0;
    for seed in 0..20u64 {
        let db = random_database(seed, 200);
        for t in db.tables() {
            ensure(t.len() <= 200, || format!("seed {seed}: {} has {} rows", t.name(), t.len()))?;
        }
        ensure(db.check_integrity().is_empty(), || format!("seed {seed}: generated database is inconsistent"))?;
        let mut queries: Vec<String> = reference_queries::ALL.iter().map(|s| s.to_string()).collect();
        queries.extend(generate_queries(seed, &schema, 500));
        for sql in &queries {
            let q = compile(sql, &db).map_err(|e| format!("seed {seed}: {e}\n{sql}"))?;
            let got = execute(&db, &plan(&q));
            let want = oracle(&db, &q);
            let same = match (&got, &want) {
                (Ok(g), Ok(w)) if q.order_by.is_empty() => {
                    g.headers == w.headers && sorted(g.rows.clone()) == sorted(w.rows.clone())
                }
                (Ok(g), Ok(w)) => g == w,
                (Err(_), Err(OracleError::ArithmeticOverflow(_))) => true,
                _ => false,
            };
            ensure(same, || format!("seed {seed}: mismatch on\n{sql}\nengine {got:?}\noracle {want:?}"))?;
            compared += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{compared} query/database pairs, 0 mismatches, {elapsed:.1?}"))
}

/// Independent model of the schema's constraints, used to label attempts.
struct Model<'a> {
    db: &'a Database,
    keys: HashMap<String, HashSet<Vec<Value>>>,
}

impl Model<'_> {
    fn pk(def: &TableDef, row: &[Value]) -> Vec<Value> {
        def.primary_key().iter().map(|c| row[def.column_position(c).unwrap()].clone()).collect()
    }

    fn valid(&self, def: &TableDef, row: &[Value]) -> bool {
        if row.len() != def.arity() {
            return false;
        }
        if row.iter().zip(def.columns()).any(|(v, c)| v.column_type() != c.col_type) {
            return false;
        }
        if self.keys[def.name()].contains(&Self::pk(def, row)) {
            return false;
        }
        for fk in def.foreign_keys() {
            let parent = self.db.table(&fk.foreign_table).unwrap().def();
            let target: Vec<Value> = parent
                .primary_key()
                .iter()
                .map(|pc| {
                    let j = fk.foreign_columns.iter().position(|c| c == pc).unwrap();
                    row[def.column_position(&fk.local_columns[j]).unwrap()].clone()
                })
                .collect();
            if !self.keys[&fk.foreign_table].contains(&target) {
                return false;
            }
        }
        def.checks().iter().all(|CheckConstraint::ExactlyOneTrue(cols)| {
            cols.iter().filter(|c| row[def.column_position(c).unwrap()] == Value::Bool(true)).count() == 1
        })
    }
}

fn candidate(rng: &mut ChaCha8Rng, db: &Database, def: &TableDef) -> Row {
    let mut row: Vec<Value> = def
        .columns()
        .iter()
        .map(|c| match c.col_type {
            ColumnType::Int => Value::Int(rng.gen_range(0..5000)),
            ColumnType::Decimal => Value::Decimal(Decimal::new(rng.gen_range(0..100), 1)),
            ColumnType::Text => Value::text(["x", "We'll", "S.S. Wilson"].choose(rng).unwrap().to_string()),
            ColumnType::Bool => Value::Bool(rng.gen()),
        })
        .collect();
    let mut fks: Vec<_> = def.foreign_keys().iter().collect();
    fks.sort_by_key(|fk| std::cmp::Reverse(fk.local_columns.len()));
    let mut fixed = HashSet::new();
    for fk in fks {
        let parent = db.table(&fk.foreign_table).unwrap();
        let locals: Vec<usize> = fk.local_columns.iter().map(|c| def.column_position(c).unwrap()).collect();
        let options: Vec<&Row> = parent
            .store()
            .rows()
            .iter()
            .filter(|p| {
                fk.foreign_columns
                    .iter()
                    .zip(&locals)
                    .all(|(fc, l)| !fixed.contains(l) || p[parent.def().column_position(fc).unwrap()] == row[*l])
            })
            .collect();
        if let Some(p) = options.choose(rng) {
            for (fc, l) in fk.foreign_columns.iter().zip(&locals) {
                row[*l] = p[parent.def().column_position(fc).unwrap()].clone();
                fixed.insert(*l);
            }
        }
    }
    for CheckConstraint::ExactlyOneTrue(cols) in def.checks() {
        let pick = rng.gen_range(0..cols.len());
        for (i, c) in cols.iter().enumerate() {
            row[def.column_position(c).unwrap()] = Value::Bool(i == pick);
        }
    }
    row
}

fn corrupt(rng: &mut ChaCha8Rng, db: &Database, def: &TableDef, mut row: Row) -> Row {
    let existing = db.table(def.name()).unwrap().store().rows();
    loop {
        match rng.gen_range(0..5) {
            0 => {
                row.pop();
                return row;
            }
            1 => {
                let i = rng.gen_range(0..row.len());
                row[i] = match row[i] {
                    Value::Text(_) => Value::Int(1),
                    _ => Value::text("oops"),
                };
                return row;
            }
            2 if !existing.is_empty() => {
                let other = existing.choose(rng).unwrap();
                for &p in def.pk_positions() {
                    row[p] = other[p].clone();
                }
                return row;
            }
            3 if !def.foreign_keys().is_empty() => {
                let fk = def.foreign_keys().choose(rng).unwrap();
                let p = def.column_position(&fk.local_columns[0]).unwrap();
                row[p] = Value::Int(1_000_000 + rng.gen_range(0..1000));
                return row;
            }
            4 if !def.checks().is_empty() => {
                let CheckConstraint::ExactlyOneTrue(cols) = &def.checks()[0];
                let on = rng.gen_bool(0.5);
                for c in cols {
                    row[def.column_position(c).unwrap()] = Value::Bool(on);
                }
                return row;
            }
            _ => {}
        }
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut db = random_database(40, 40);
    let names: Vec<String> = db.table_names().iter().map(|s| s.to_string()).collect();
    let (mut attempts, mut invalid, mut rejected, mut wrong) = (0, 0, 0, 0);
    while attempts < 10_000 {
        let table = names.choose(&mut rng).unwrap().clone();
        let def = db.table(&table).unwrap().def().clone();
        let keys: HashMap<String, HashSet<Vec<Value>>> = db
            .tables()
            .map(|t| (t.name().to_owned(), t.store().rows().iter().map(|r| Model::pk(t.def(), r)).collect()))
            .collect();
        let model = Model { db: &db, keys };
        let want_invalid = rng.gen_bool(0.5);
        // redraw until the row carries the label picked above
        let mut row = None;
        for _ in 0..50 {
            let mut r = candidate(&mut rng, &db, &def);
            if want_invalid {
                r = corrupt(&mut rng, &db, &def, r);
            }
            if model.valid(&def, &r) != want_invalid {
                row = Some(r);
                break;
            }
        }
        // a table whose parents are empty cannot take a valid row
        let Some(row) = row else { continue };
        let expected_ok = !want_invalid;
        attempts += 1;
        if !expected_ok {
            invalid += 1;
        }
        let ok = db.insert(&table, row).is_ok();
        if !ok {
            rejected += 1;
        }
        if ok != expected_ok {
            wrong += 1;
        }
    }
    let violations = db.check_integrity();
    ensure(violations.is_empty(), || format!("{} violations after inserts", violations.len()))?;
    ensure(wrong == 0, || format!("{wrong} attempts judged differently from the model"))?;
    ensure(rejected == invalid, || format!("rejected {rejected}, invalid {invalid}"))?;
    ensure((4500..=5500).contains(&invalid), || format!("{invalid} of 10000 attempts were invalid"))?;

    // CSV atomicity: one bad line at a random position
    let mut csv_checks = 0;
    for seed in 0..20u64 {
        let src = random_database(100 + seed, 30);
        let candidates: Vec<&str> =
            src.tables().filter(|t| t.len() >= 2 && !t.def().foreign_keys().is_empty()).map(|t| t.name()).collect();
        let table = candidates.choose(&mut rng).unwrap().to_string();
        let mut target = builtin_schema();
        // parents only: everything before the target in load order
        for name in src.load_order().into_iter().take_while(|n| *n != table) {
            target.load_csv(name, src.dump_csv_bytes(name).unwrap().as_slice()).unwrap();
        }
        let clean = String::from_utf8(src.dump_csv_bytes(&table).unwrap()).unwrap();
        let mut lines: Vec<String> = clean.lines().map(str::to_owned).collect();
        let at = rng.gen_range(1..=lines.len());
        let arity = src.table(&table).unwrap().def().arity();
        let bad = match rng.gen_range(0..3) {
            0 => vec!["999999"; arity].join(","),
            1 => vec!["not a number"; arity].join(","),
            _ => "1".to_owned(),
        };
        lines.insert(at, bad);
        let before = target.clone();
        let err = target.load_csv(&table, format!("{}\n", lines.join("\n")).as_bytes()).unwrap_err();
        let line = match err {
            StorageError::InvalidRow { line, .. } | StorageError::MalformedCsv { line, .. } => line,
            other => return Err(format!("unexpected error {other}")),
        };
        ensure(line == at as u64 + 1, || format!("{table}: error reported at line {line}, bad line was {}", at + 1))?;
        ensure(target.table(&table).unwrap().is_empty(), || format!("{table}: partial load survived"))?;
        ensure(target.dump_csv_bytes(&table).unwrap() == before.dump_csv_bytes(&table).unwrap(), || {
            "table changed".into()
        })?;
        let n = target.load_csv(&table, clean.as_bytes()).map_err(|e| e.to_string())?;
        ensure(n == src.table(&table).unwrap().len(), || "clean reload count differs".into())?;
        csv_checks += 1;
    }
    Ok(format!(
        "10000 attempts, {invalid} invalid, {rejected} rejected, 0 violations; {csv_checks} bad-line CSV loads rolled back"
    ))
}

fn criterion_5() -> Outcome {
    use Action::*;
    let grid: [(Role, [bool; 7]); 3] = [
        (Role::Client, [true, false, false, false, false, false, true]),
        (Role::Contributor, [true, true, true, false, false, false, true]),
        (Role::Admin, [true; 7]),
    ];
    let actions = [Query, Insert, LoadCsv, CreateTable, DeleteRow, UpdateRow, DumpCsv];
    for (role, allowed) in grid {
        for (action, want) in actions.iter().zip(allowed) {
            let got = authorize(role, *action);
            ensure(got.is_allow() == want, || format!("{role} {action}: {got:?}"))?;
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut total = 0;
    for role in Role::ALL {
        let path = dir.path().join(format!("{role}.log"));
        let mut s = Session::with_audit(role, builtin_schema(), AuditLog::to_file(&path).unwrap());
        let _ = s.query("SELECT Genre FROM Collections_of_shows");
        let _ = s.insert_fields(HUB_TABLE, &["1", "1974", "S.S. Wilson", "Comedy"]);
        let _ = s.load_csv("Platforms", "Platform_id,Platform name\n1,Netflix\n".as_bytes());
        let _ = s.create_table("CREATE TABLE T (id INT, PRIMARY KEY (id))");
        let _ = s.delete_row("Platforms", &["1"]);
        let _ = s.update_row("Platforms", &["1", "Netflix India"]);
        let _ = s.dump_csv("Platforms");
        let events = s.audit().events();
        ensure(events.len() == 7, || format!("{role}: {} audit events for 7 attempts", events.len()))?;
        for (e, action) in events.iter().zip(actions) {
            ensure(e.action == action && e.verdict.is_allow() == authorize(role, action).is_allow(), || {
                format!("{e}")
            })?;
        }
        let lines = std::fs::read_to_string(&path).unwrap();
        ensure(lines.lines().count() == 7, || format!("{role}: audit file has {} lines", lines.lines().count()))?;
        ensure(
            lines.lines().all(|l| {
                l.contains(&format!("role={role}")) && (l.contains("verdict=allow") || l.contains("verdict=deny"))
            }),
            || lines.clone(),
        )?;
        total += 7;
    }
    Ok(format!("3x7 grid matches; {total} attempts produced {total} audit lines"))
}

fn synthetic(shows: i64, links: i64) -> Database {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut db = builtin_schema();
    let actors = 2000;
    let genres = ["Adventure", "Drama", "Comedy", "Horror"];
    for a in 0..actors {
        let gender = if a % 2 == 0 { "Male" } else { "Female" };
        db.insert(
            "Actors",
            vec![
                Value::Int(a),
                Value::text(format!("Actor {a}")),
                gender.into(),
                Value::Int(rng.gen_range(10..80)),
                "India".into(),
            ],
        )
        .unwrap();
    }
    for s in 0..shows {
        db.insert(
            HUB_TABLE,
            vec![
                Value::Int(s),
                Value::Int(1950 + s % 70),
                Value::text(format!("Writer {}", s % 300)),
                genres[(s % 4) as usize].into(),
            ],
        )
        .unwrap();
        db.insert("Show_id-name", vec![Value::Int(s), Value::text(format!("Show {s}"))]).unwrap();
        db.insert("Director", vec![Value::Int(s), Value::text(format!("Director {}", s % 500))]).unwrap();
        let band = rng.gen_range(0..3);
        db.insert(
            "PG_Rating",
            vec![Value::Int(s), Value::Bool(band == 0), Value::Bool(band == 1), Value::Bool(band == 2)],
        )
        .unwrap();
    }
    let mut made = 0;
    while made < links {
        let row = vec![Value::Int(rng.gen_range(0..actors)), Value::Int(rng.gen_range(0..shows))];
        if db.insert("Actor_id-Show_id", row).is_ok() {
            made += 1;
        }
    }
    db
}

fn criterion_6() -> Outcome {
    let db = synthetic(10_000, 20_000);
    let q = compile(Q6, &db).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let rs = execute(&db, &plan(&q)).map_err(|e| e.to_string())?;
    let engine = start.elapsed();
    ensure(engine < Duration::from_secs(1), || format!("engine took {engine:?}"))?;
    ensure(!rs.is_empty(), || "synthetic query returned nothing".into())?;
    let budget = engine * 10;
    let start = Instant::now();
    let result = oracle_with_deadline(&db, &q, start + budget);
    let waited = start.elapsed();
    ensure(result == Err(OracleError::DeadlineExceeded), || {
        format!("oracle finished within {budget:?}: the gap is under 10x")
    })?;
    Ok(format!("engine {engine:?} for {} rows; oracle unfinished after {waited:?} (10x budget {budget:?})", rs.len()))
}

fn criterion_7() -> Outcome {
    let mut db = builtin_schema();
    db.load_dataset(&fixture_dir()).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for (n, sql) in [(1, reference_queries::Q1), (4, reference_queries::Q4)] {
        let q = compile(sql, &db).map_err(|e| e.to_string())?;
        let rs = execute(&db, &plan(&q)).map_err(|e| e.to_string())?;
        let want = oracle(&db, &q).map_err(|e| e.to_string())?;
        let same =
            if q.order_by.is_empty() { sorted(rs.rows.clone()) == sorted(want.rows.clone()) } else { rs == want };
        ensure(same, || format!("Q{n} engine and oracle disagree on the fixture"))?;
        notes.push(format!("Q{n} {} rows", rs.len()));
    }
    let q4 = execute(&db, &plan(&compile(reference_queries::Q4, &db).unwrap())).unwrap();
    let eros = q4.rows.iter().find(|r| r[0] == Value::text("Eros Now")).map(|r| r[1].clone());
    ensure(eros != Some(Value::Int(23053)), || "fixture unexpectedly reproduces the published Q4 total".into())?;
    Ok(format!(
        "published Q1/Q4 numbers need the original private dataset and are not claimed; {} run on the fixture and match the oracle (also covered by criteria 1 and 3)",
        notes.join(", ")
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("criterion 1 (reference query parse suite)", criterion_1),
        ("criterion 2 (fixture replay)", criterion_2),
        ("criterion 3 (oracle differential suite)", criterion_3),
        ("criterion 4 (integrity properties)", criterion_4),
        ("criterion 5 (RBAC matrix and audit)", criterion_5),
        ("criterion 6 (performance sanity)", criterion_6),
        ("criterion 7 (Q1/Q4 published numbers not reproducible)", criterion_7),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
