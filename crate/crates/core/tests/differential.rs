use std::collections::BTreeMap;

use ottdb::engine::{execute, plan, plan_with, BuildSide, PlannerOptions};
use ottdb::oracle::{generate_queries, oracle, random_database};
use ottdb::reference_queries;
use ottdb::sql::compile;
use ottdb::{builtin_schema, Row, Value};

fn sorted(mut rows: Vec<Row>) -> Vec<Row> {
    rows.sort();
    rows
}

#[test]
fn engine_matches_oracle_on_small_databases() {
    let schema = builtin_schema();
    for seed in 100..104 {
        let db = random_database(seed, 120);
        let mut queries: Vec<String> = reference_queries::ALL.iter().map(|s| s.to_string()).collect();
        queries.extend(generate_queries(seed, &schema, 150));
        for sql in &queries {
            let q = compile(sql, &db).unwrap();
            let got = execute(&db, &plan(&q)).unwrap();
            let want = oracle(&db, &q).unwrap();
            assert_eq!(got.headers, want.headers, "{sql}");
            if q.order_by.is_empty() {
                assert_eq!(sorted(got.rows), sorted(want.rows), "seed {seed}\n{sql}");
            } else {
                assert_eq!(got.rows, want.rows, "seed {seed}\n{sql}");
            }
        }
    }
}

#[test]
fn pushdown_and_build_side_do_not_change_results() {
    let schema = builtin_schema();
    let db = random_database(5, 100);
    for sql in generate_queries(5, &schema, 200) {
        let q = compile(&sql, &db).unwrap();
        let base = sorted(execute(&db, &plan(&q)).unwrap().rows);
        for options in [
            PlannerOptions { pushdown: false, build: BuildSide::Smaller },
            PlannerOptions { pushdown: true, build: BuildSide::Left },
            PlannerOptions { pushdown: true, build: BuildSide::Right },
        ] {
            let rows = sorted(execute(&db, &plan_with(&q, options)).unwrap().rows);
            assert_eq!(rows, base, "{options:?}\n{sql}");
        }
    }
}

#[test]
fn doubling_rows_doubles_whole_table_aggregates() {
    let db = random_database(9, 60);
    let mut doubled: BTreeMap<String, Vec<Row>> = BTreeMap::new();
    for t in db.tables() {
        let rows = t.store().rows();
        doubled.insert(t.name().to_owned(), rows.iter().chain(rows).cloned().collect());
    }
    for t in db.tables() {
        for col in t.def().columns().iter().filter(|c| c.col_type.is_numeric()) {
            let sql = format!(
                "SELECT COUNT({c}), SUM({c}) FROM {}",
                ottdb::catalog::quote_ident(t.name()),
                c = ottdb::catalog::quote_ident(&col.name)
            );
            let q = compile(&sql, &db).unwrap();
            let once = oracle(&db, &q).unwrap().rows;
            let twice = oracle(&doubled, &q).unwrap().rows;
            let double = |v: &Value| match v {
                Value::Int(i) => Value::Int(2 * i),
                Value::Decimal(d) => Value::Decimal(*d * ottdb::value::Decimal::TWO),
                other => other.clone(),
            };
            assert_eq!(twice[0], once[0].iter().map(double).collect::<Row>(), "{sql}");
        }
    }
}
