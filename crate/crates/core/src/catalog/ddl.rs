//! Deterministic `CREATE TABLE` listing of a schema.

use std::fmt::Write;

use super::{CheckConstraint, Database, TableDef};

/// Backtick-quotes an identifier, doubling embedded backticks.
pub fn quote_ident(name: &str) -> String {
    format!("`{}`", name.replace('`', "``"))
}

fn ident_list(names: &[String]) -> String {
    names.iter().map(|n| quote_ident(n)).collect::<Vec<_>>().join(", ")
}

impl TableDef {
    /// `CREATE TABLE` statement for this definition. The output parses back
    /// through the SQL front end into an identical definition.
    pub fn to_ddl(&self) -> String {
        let mut lines: Vec<String> =
            self.columns().iter().map(|c| format!("  {} {}", quote_ident(&c.name), c.col_type)).collect();
        lines.push(format!("  PRIMARY KEY ({})", ident_list(self.primary_key())));
        for fk in self.foreign_keys() {
            lines.push(format!(
                "  FOREIGN KEY ({}) REFERENCES {} ({})",
                ident_list(&fk.local_columns),
                quote_ident(&fk.foreign_table),
                ident_list(&fk.foreign_columns)
            ));
        }
        for check in self.checks() {
            match check {
                CheckConstraint::ExactlyOneTrue(cols) => {
                    lines.push(format!("  CHECK EXACTLY ONE ({})", ident_list(cols)))
                }
            }
        }
        format!("CREATE TABLE {} (\n{}\n);\n", quote_ident(self.name()), lines.join(",\n"))
    }
}

impl Database {
    /// Every table's DDL, sorted by table name, blocks separated by a blank
    /// line.
    pub fn schema_ddl(&self) -> String {
        let mut defs: Vec<&TableDef> = self.tables().map(|t| t.def()).collect();
        defs.sort_by(|a, b| a.name().cmp(b.name()));
        let mut out = String::new();
        for (i, def) in defs.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = write!(out, "{}", def.to_ddl());
        }
        out
    }
}
