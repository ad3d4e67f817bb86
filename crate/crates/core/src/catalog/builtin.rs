//! The built-in OTT catalog schema.
//!
//! Table and column names are kept verbatim (spaces, `/` and `-` included)
//! so queries written against the original schema run unmodified.

use super::{CheckConstraint, ColumnDef, Database, ForeignKey, TableDef};
use crate::value::ColumnType::{self, Bool, Decimal, Int, Text};

/// The root relation; every show-describing table references its `Show_id`.
pub const HUB_TABLE: &str = "Collections_of_shows";

struct Layout {
    name: &'static str,
    columns: &'static [(&'static str, ColumnType)],
    pk: &'static [&'static str],
    fks: &'static [(&'static [&'static str], &'static str, &'static [&'static str])],
    exactly_one: &'static [&'static str],
}

const SHOW: (&[&str], &str, &[&str]) = (&["Show_id"], HUB_TABLE, &["Show_id"]);
const PLATFORM: (&[&str], &str, &[&str]) = (&["Platform_id"], "Platforms", &["Platform_id"]);
const ACTOR: (&[&str], &str, &[&str]) = (&["Actor_id"], "Actors", &["Actor_id"]);
const PRODUCTION: (&[&str], &str, &[&str]) = (&["Production_id"], "Productions", &["Production_id"]);

/// Tables in creation order (parents before children).
const TABLES: &[Layout] = &[
    Layout {
        name: HUB_TABLE,
        columns: &[("Show_id", Int), ("Release year", Int), ("Writer", Text), ("Genre", Text)],
        pk: &["Show_id"],
        fks: &[],
        exactly_one: &[],
    },
    Layout {
        name: "Actors",
        columns: &[("Actor_id", Int), ("Actor name", Text), ("Gender", Text), ("Age", Int), ("Nationality", Text)],
        pk: &["Actor_id"],
        fks: &[],
        exactly_one: &[],
    },
    Layout {
        name: "Productions",
        columns: &[("Production_id", Int), ("Production_Name", Text)],
        pk: &["Production_id"],
        fks: &[],
        exactly_one: &[],
    },
    Layout {
        name: "Platforms",
        columns: &[("Platform_id", Int), ("Platform name", Text)],
        pk: &["Platform_id"],
        fks: &[],
        exactly_one: &[],
    },
    Layout {
        name: "Show_id-name",
        columns: &[("Show_id", Int), ("Show Name", Text)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Actor_id-Show_id",
        columns: &[("Actor_id", Int), ("Show_id", Int)],
        pk: &["Actor_id", "Show_id"],
        fks: &[ACTOR, SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Production_id-Show_id",
        columns: &[("Production_id", Int), ("Show_id", Int)],
        pk: &["Production_id", "Show_id"],
        fks: &[PRODUCTION, SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Critics_Rating",
        columns: &[("Show_id", Int), ("IMDB rating", Decimal), ("Rotten Tomatoes", Decimal)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "PG_Rating",
        columns: &[("Show_id", Int), ("U", Bool), ("U/A", Bool), ("A", Bool)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &["U", "U/A", "A"],
    },
    Layout {
        name: "Platform_id-Show_id",
        columns: &[("Platform_id", Int), ("Show_id", Int)],
        pk: &["Platform_id", "Show_id"],
        fks: &[PLATFORM, SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Subscriptions",
        columns: &[("Platform_id", Int), ("Show_id", Int), ("required(y/n)", Bool)],
        pk: &["Platform_id", "Show_id"],
        fks: &[PLATFORM, SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Availability",
        columns: &[("Platform_id", Int), ("Show_id", Int), ("Availability", Bool)],
        pk: &["Platform_id", "Show_id"],
        fks: &[PLATFORM, SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Relevance",
        columns: &[("Show_id", Int), ("Relevance", Bool)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Duration",
        columns: &[("Show_id", Int), ("Duration", Int)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Resolution",
        columns: &[("Platform_id", Int), ("Show_id", Int), ("Resolution", Text), ("Required", Bool)],
        pk: &["Platform_id", "Show_id"],
        fks: &[PLATFORM, SHOW, (&["Platform_id", "Show_id"], "Subscriptions", &["Platform_id", "Show_id"])],
        exactly_one: &[],
    },
    Layout {
        name: "TV_series",
        columns: &[("Show_id", Int), ("Production_id", Int), ("Duration", Int), ("Seasons", Int), ("Episodes", Int)],
        pk: &["Show_id"],
        fks: &[SHOW, PRODUCTION],
        exactly_one: &[],
    },
    Layout {
        name: "Subtitles",
        columns: &[("Show_id", Int), ("Hindi", Bool), ("English", Bool), ("Tamil", Bool), ("Telugu", Bool)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Ongoing",
        columns: &[("Show_id", Int), ("Ongoing", Bool)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Director",
        columns: &[("Show_id", Int), ("Director", Text)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Related_shows",
        columns: &[("Show_id", Int), ("Related_Show_id", Int)],
        pk: &["Show_id", "Related_Show_id"],
        fks: &[SHOW, (&["Related_Show_id"], HUB_TABLE, &["Show_id"])],
        exactly_one: &[],
    },
    Layout {
        name: "Inspiration",
        columns: &[("Show_id", Int), ("Inspired from", Text)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Nominations",
        columns: &[("Show_id", Int), ("Oscar nominated(y/n)", Bool)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Budget",
        columns: &[("Show_id", Int), ("Budget", Int)],
        pk: &["Show_id"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Statistics",
        columns: &[("Platform_id", Int), ("Show_id", Int), ("views/mo", Int)],
        pk: &["Platform_id", "Show_id"],
        fks: &[PLATFORM, SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Best_of_year",
        columns: &[("Show_id", Int), ("Year", Int)],
        pk: &["Show_id", "Year"],
        fks: &[SHOW],
        exactly_one: &[],
    },
    Layout {
        name: "Actor_nomination",
        columns: &[("Actor_id", Int), ("Actor Oscar nominated(y/n)", Bool)],
        pk: &["Actor_id"],
        fks: &[ACTOR],
        exactly_one: &[],
    },
];

/// An empty database carrying the 26-table OTT schema.
pub fn builtin_schema() -> Database {
    let mut db = Database::new();
    for layout in TABLES {
        let columns = layout.columns.iter().map(|(n, t)| ColumnDef::new(*n, *t)).collect();
        let fks = layout.fks.iter().map(|(l, t, f)| ForeignKey::new(l, t, f)).collect();
        let checks = if layout.exactly_one.is_empty() {
            vec![]
        } else {
            vec![CheckConstraint::ExactlyOneTrue(layout.exactly_one.iter().map(|s| s.to_string()).collect())]
        };
        let def = TableDef::new(layout.name, columns, layout.pk, fks, checks).expect("built-in table is well formed");
        db.add_table(def).expect("built-in schema is consistent");
    }
    db
}
