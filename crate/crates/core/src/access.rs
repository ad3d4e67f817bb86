//! Roles, authorization and the audit trail.
//!
//! A [`Session`] owns a database and a role. Each public session method
//! performs exactly one authorization check and records it in the
//! session's [`AuditLog`] before doing any work.

use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::catalog::{Database, Violation};
use crate::engine::{execute, plan, ResultSet};
use crate::error::Error;
use crate::sql::{bind, compile, parse_query, parse_sql_statement, Statement};
use crate::value::Row;

/// Privilege levels, ordered from least to most privileged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Client,
    Contributor,
    Admin,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Client, Role::Contributor, Role::Admin];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Client => "client",
            Role::Contributor => "contributor",
            Role::Admin => "admin",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown role `{s}` (expected client, contributor or admin)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Query,
    Insert,
    LoadCsv,
    CreateTable,
    DeleteRow,
    UpdateRow,
    DumpCsv,
}

impl Action {
    pub const ALL: [Action; 7] = [
        Action::Query,
        Action::Insert,
        Action::LoadCsv,
        Action::CreateTable,
        Action::DeleteRow,
        Action::UpdateRow,
        Action::DumpCsv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Query => "query",
            Action::Insert => "insert",
            Action::LoadCsv => "load_csv",
            Action::CreateTable => "create_table",
            Action::DeleteRow => "delete_row",
            Action::UpdateRow => "update_row",
            Action::DumpCsv => "dump_csv",
        }
    }

    /// The least privileged role allowed to perform this action.
    pub fn minimum_role(self) -> Role {
        match self {
            Action::Query | Action::DumpCsv => Role::Client,
            Action::Insert | Action::LoadCsv => Role::Contributor,
            Action::CreateTable | Action::DeleteRow | Action::UpdateRow => Role::Admin,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Allow,
    Deny(String),
}

impl Verdict {
    pub fn is_allow(&self) -> bool {
        matches!(self, Verdict::Allow)
    }
}

pub fn authorize(role: Role, action: Action) -> Verdict {
    let needed = action.minimum_role();
    if role >= needed {
        Verdict::Allow
    } else {
        Verdict::Deny(format!("{action} requires role {needed} or higher"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditEvent {
    pub timestamp: DateTime<Utc>,
    pub role: Role,
    pub action: Action,
    pub verdict: Verdict,
}

impl fmt::Display for AuditEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} role={} action={} verdict=",
            self.timestamp.to_rfc3339_opts(SecondsFormat::Millis, true),
            self.role,
            self.action
        )?;
        match &self.verdict {
            Verdict::Allow => f.write_str("allow"),
            Verdict::Deny(reason) => write!(f, "deny reason=\"{reason}\""),
        }
    }
}

/// In-memory record of authorization decisions, optionally mirrored to a
/// file one line per event.
#[derive(Debug, Default)]
pub struct AuditLog {
    events: Vec<AuditEvent>,
    sink: Option<File>,
}

impl AuditLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends to `path`, creating it if needed.
    pub fn to_file(path: &Path) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(AuditLog { events: Vec::new(), sink: Some(file) })
    }

    pub fn events(&self) -> &[AuditEvent] {
        &self.events
    }

    fn record(&mut self, event: AuditEvent) -> io::Result<()> {
        if let Some(f) = &mut self.sink {
            writeln!(f, "{event}")?;
            f.flush()?;
        }
        self.events.push(event);
        Ok(())
    }
}

pub struct Session {
    role: Role,
    db: Database,
    audit: AuditLog,
}

impl Session {
    pub fn new(role: Role, db: Database) -> Self {
        Session { role, db, audit: AuditLog::new() }
    }

    pub fn with_audit(role: Role, db: Database, audit: AuditLog) -> Self {
        Session { role, db, audit }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    /// Read-only view of the underlying database.
    pub fn database(&self) -> &Database {
        &self.db
    }

    pub fn into_database(self) -> Database {
        self.db
    }

    pub fn audit(&self) -> &AuditLog {
        &self.audit
    }

    fn gate(&mut self, action: Action) -> Result<(), Error> {
        let verdict = authorize(self.role, action);
        let allowed = verdict.is_allow();
        self.audit
            .record(AuditEvent { timestamp: Utc::now(), role: self.role, action, verdict })
            .map_err(Error::Audit)?;
        if allowed {
            Ok(())
        } else {
            Err(Error::Denied { role: self.role, action })
        }
    }

    pub fn query(&mut self, sql: &str) -> Result<ResultSet, Error> {
        self.gate(Action::Query)?;
        let bound = compile(sql, &self.db)?;
        Ok(execute(&self.db, &plan(&bound))?)
    }

    pub fn explain(&mut self, sql: &str) -> Result<String, Error> {
        self.gate(Action::Query)?;
        let bound = compile(sql, &self.db)?;
        Ok(plan(&bound).explain())
    }

    /// Parses without binding and returns the AST's debug rendering.
    pub fn parse_only(&mut self, sql: &str) -> Result<String, Error> {
        self.gate(Action::Query)?;
        Ok(parse_query(sql)?.to_debug_text())
    }

    /// Parses and binds, reporting any error.
    pub fn validate_query(&mut self, sql: &str) -> Result<(), Error> {
        self.gate(Action::Query)?;
        bind(&parse_query(sql)?, &self.db).map_err(|e| Error::Sql(e.into()))?;
        Ok(())
    }

    pub fn check(&mut self) -> Result<Vec<Violation>, Error> {
        self.gate(Action::Query)?;
        Ok(self.db.check_integrity())
    }

    pub fn schema(&mut self) -> Result<String, Error> {
        self.gate(Action::Query)?;
        Ok(self.db.schema_ddl())
    }

    pub fn insert(&mut self, table: &str, row: Row) -> Result<(), Error> {
        self.gate(Action::Insert)?;
        self.db.insert(table, row)?;
        Ok(())
    }

    /// Inserts a row given as text fields in column order.
    pub fn insert_fields(&mut self, table: &str, fields: &[&str]) -> Result<(), Error> {
        self.gate(Action::Insert)?;
        let row = self.db.parse_row(table, fields)?;
        self.db.insert(table, row)?;
        Ok(())
    }

    pub fn load_csv<R: Read>(&mut self, table: &str, source: R) -> Result<usize, Error> {
        self.gate(Action::LoadCsv)?;
        Ok(self.db.load_csv(table, source)?)
    }

    pub fn load_dataset(&mut self, dir: &Path) -> Result<Vec<(String, usize)>, Error> {
        self.gate(Action::LoadCsv)?;
        Ok(self.db.load_dataset(dir)?)
    }

    /// Runs one `CREATE TABLE` statement; returns the new table's name.
    pub fn create_table(&mut self, ddl: &str) -> Result<String, Error> {
        self.gate(Action::CreateTable)?;
        match parse_sql_statement(ddl)? {
            Statement::CreateTable(ct) => {
                let def = ct.to_table_def()?;
                let name = def.name().to_owned();
                self.db.add_table(def)?;
                Ok(name)
            }
            Statement::Select(_) => Err(Error::Usage("expected a CREATE TABLE statement".into())),
        }
    }

    /// Deletes the row whose primary key has the given text fields.
    pub fn delete_row(&mut self, table: &str, key: &[&str]) -> Result<Row, Error> {
        self.gate(Action::DeleteRow)?;
        let key = self.db.parse_key(table, key)?;
        Ok(self.db.delete_row(table, &key)?)
    }

    /// Replaces the row with the same primary key; returns the old row.
    pub fn update_row(&mut self, table: &str, fields: &[&str]) -> Result<Row, Error> {
        self.gate(Action::UpdateRow)?;
        let row = self.db.parse_row(table, fields)?;
        Ok(self.db.update_row(table, row)?)
    }

    pub fn dump_csv(&mut self, table: &str) -> Result<Vec<u8>, Error> {
        self.gate(Action::DumpCsv)?;
        Ok(self.db.dump_csv_bytes(table)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_schema;

    #[test]
    fn grant_table() {
        assert!(!authorize(Role::Client, Action::Insert).is_allow());
        assert!(authorize(Role::Admin, Action::CreateTable).is_allow());
        assert!(authorize(Role::Contributor, Action::Query).is_allow());
        assert!(authorize(Role::Contributor, Action::LoadCsv).is_allow());
        assert!(!authorize(Role::Contributor, Action::DeleteRow).is_allow());
    }

    #[test]
    fn denied_insert_is_audited() {
        let mut s = Session::new(Role::Client, builtin_schema());
        let err = s.insert_fields("Platforms", &["1", "Netflix"]).unwrap_err();
        assert!(matches!(err, Error::Denied { .. }));
        assert_eq!(s.audit().events().len(), 1);
        let line = s.audit().events()[0].to_string();
        assert!(line.contains("role=client action=insert verdict=deny"), "{line}");
        assert_eq!(s.database().row_count(), 0);
    }

    #[test]
    fn roles_parse() {
        assert_eq!("Admin".parse::<Role>(), Ok(Role::Admin));
        assert!("root".parse::<Role>().is_err());
    }
}
