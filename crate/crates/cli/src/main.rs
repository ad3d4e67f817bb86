//! `ottdb`: command-line front end for the OTT catalog engine.

use std::fs;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ottdb::access::AuditLog;
use ottdb::reference_queries::reference_query;
use ottdb::sql::{parse_sql_statement, Statement};
use ottdb::{builtin_schema, Database, Error, ResultSet, Role, Session};

/// Extra tables created by admins are kept next to the CSVs in this file.
const SCHEMA_FILE: &str = "schema.sql";

#[derive(Parser, Debug)]
#[command(name = "ottdb", version, about = "Embedded OTT catalog database")]
struct Cli {
    /// Session role: client, contributor or admin.
    #[arg(long, global = true, default_value = "client", value_parser = parse_role)]
    role: Role,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Dataset directory (CSV files plus manifest.txt) to open.
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    /// Append authorization decisions to this file.
    #[arg(long, global = true)]
    audit: Option<PathBuf>,
    /// Save changes back into the --dataset directory.
    #[arg(long, global = true)]
    write_back: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a dataset directory in manifest order.
    Load { dir: PathBuf },
    /// Run a SELECT given inline or as @file.
    Query {
        sql: String,
        /// Print the syntax tree instead of running the query.
        #[arg(long)]
        parse_only: bool,
    },
    /// Interactive shell; statements end with `;`.
    Repl,
    /// Run one of the six built-in reference queries.
    Paperq {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
        n: u8,
    },
    /// Show the plan for a SELECT.
    Explain { sql: String },
    /// Report integrity violations.
    Check,
    /// Print a table as CSV.
    Dump { table: String },
    /// Print the schema as CREATE TABLE statements.
    Schema,
    /// Insert one row given as values in column order.
    Insert {
        table: String,
        #[arg(required = true, allow_hyphen_values = true)]
        values: Vec<String>,
    },
    /// Delete the row with the given primary key values.
    Delete {
        table: String,
        #[arg(required = true, allow_hyphen_values = true)]
        key: Vec<String>,
    },
    /// Replace the row that has the same primary key.
    Update {
        table: String,
        #[arg(required = true, allow_hyphen_values = true)]
        values: Vec<String>,
    },
    /// Run a CREATE TABLE statement given inline or as @file.
    Create { sql: String },
}

fn parse_role(s: &str) -> Result<Role, String> {
    s.parse()
}

fn read_arg(arg: &str) -> Result<String, Error> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::Storage(e.into())),
        None => Ok(arg.to_owned()),
    }
}

fn render(rs: &ResultSet, format: Format) -> String {
    match format {
        Format::Table => rs.to_table(),
        Format::Csv => rs.to_csv(),
    }
}

fn open_dataset(dir: &Path) -> Result<Database, Error> {
    let mut db = builtin_schema();
    let extra = dir.join(SCHEMA_FILE);
    if extra.exists() {
        let text = fs::read_to_string(&extra).map_err(|e| Error::Storage(e.into()))?;
        for stmt in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            match parse_sql_statement(stmt)? {
                Statement::CreateTable(ct) => db.add_table(ct.to_table_def()?)?,
                Statement::Select(_) => {
                    return Err(Error::Usage(format!("{}: only CREATE TABLE is allowed", extra.display())))
                }
            }
        }
    }
    db.load_dataset(dir)?;
    Ok(db)
}

fn save_dataset(db: &Database, dir: &Path) -> Result<(), Error> {
    db.save_dataset(dir)?;
    let builtin = builtin_schema();
    let extra: Vec<String> =
        db.tables().filter(|t| builtin.table(t.name()).is_none()).map(|t| t.def().to_ddl()).collect();
    let path = dir.join(SCHEMA_FILE);
    if extra.is_empty() {
        if path.exists() {
            fs::remove_file(&path).map_err(|e| Error::Storage(e.into()))?;
        }
    } else {
        fs::write(&path, extra.join("\n")).map_err(|e| Error::Storage(e.into()))?;
    }
    Ok(())
}

struct App {
    session: Session,
    format: Format,
}

impl App {
    fn out(&self, text: &str) {
        let mut stdout = io::stdout().lock();
        let _ = stdout.write_all(text.as_bytes());
        let _ = stdout.flush();
    }

    /// Runs one subcommand; returns whether it changed the database.
    fn run(&mut self, command: Command) -> Result<bool, Error> {
        match command {
            Command::Load { dir } => {
                for (table, n) in self.session.load_dataset(&dir)? {
                    self.out(&format!("{table}: {n} rows\n"));
                }
                Ok(true)
            }
            Command::Query { sql, parse_only } => {
                let sql = read_arg(&sql)?;
                if parse_only {
                    let text = self.session.parse_only(&sql)?;
                    self.out(&text);
                } else {
                    let rs = self.session.query(&sql)?;
                    self.out(&render(&rs, self.format));
                }
                Ok(false)
            }
            Command::Repl => {
                self.repl();
                Ok(false)
            }
            Command::Paperq { n } => {
                let sql = reference_query(n as usize).expect("range checked by the argument parser");
                let rs = self.session.query(sql)?;
                self.out(&render(&rs, self.format));
                Ok(false)
            }
            Command::Explain { sql } => {
                let text = self.session.explain(&read_arg(&sql)?)?;
                self.out(&text);
                Ok(false)
            }
            Command::Check => {
                let violations = self.session.check()?;
                if violations.is_empty() {
                    self.out("ok: no integrity violations\n");
                    return Ok(false);
                }
                for v in &violations {
                    self.out(&format!("{v}\n"));
                }
                Err(Error::Violations(violations.len()))
            }
            Command::Dump { table } => {
                let bytes = self.session.dump_csv(&table)?;
                self.out(&String::from_utf8_lossy(&bytes));
                Ok(false)
            }
            Command::Schema => {
                let text = self.session.schema()?;
                self.out(&text);
                Ok(false)
            }
            Command::Insert { table, values } => {
                let fields: Vec<&str> = values.iter().map(String::as_str).collect();
                self.session.insert_fields(&table, &fields)?;
                self.out("inserted 1 row\n");
                Ok(true)
            }
            Command::Delete { table, key } => {
                let fields: Vec<&str> = key.iter().map(String::as_str).collect();
                self.session.delete_row(&table, &fields)?;
                self.out("deleted 1 row\n");
                Ok(true)
            }
            Command::Update { table, values } => {
                let fields: Vec<&str> = values.iter().map(String::as_str).collect();
                self.session.update_row(&table, &fields)?;
                self.out("updated 1 row\n");
                Ok(true)
            }
            Command::Create { sql } => {
                let name = self.session.create_table(&read_arg(&sql)?)?;
                self.out(&format!("created table {name}\n"));
                Ok(true)
            }
        }
    }

    fn statement(&mut self, text: &str) -> Result<(), Error> {
        let first = text.split_whitespace().next().unwrap_or("");
        if first.eq_ignore_ascii_case("create") {
            let name = self.session.create_table(text)?;
            self.out(&format!("created table {name}\n"));
        } else {
            let rs = self.session.query(text)?;
            self.out(&render(&rs, self.format));
        }
        Ok(())
    }

    /// Handles a `.command`; returns false to leave the shell.
    fn dot_command(&mut self, line: &str, history: &[String]) -> Result<bool, Error> {
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match cmd {
            ".quit" | ".exit" => return Ok(false),
            ".help" => self.out(
                "statements end with ';'\n.tables  .schema  .check  .dump TABLE  .explain SQL\n.format table|csv  .history  .help  .quit\n",
            ),
            ".history" => {
                for (i, h) in history.iter().enumerate() {
                    self.out(&format!("{:>4}  {h}\n", i + 1));
                }
            }
            ".tables" => {
                let names = self.session.database().table_names().join("\n");
                self.out(&format!("{names}\n"));
            }
            ".schema" => {
                let text = self.session.schema()?;
                self.out(&text);
            }
            ".check" => {
                let violations = self.session.check()?;
                self.out(&format!("{} violation(s)\n", violations.len()));
                for v in violations {
                    self.out(&format!("{v}\n"));
                }
            }
            ".dump" => {
                let bytes = self.session.dump_csv(rest)?;
                self.out(&String::from_utf8_lossy(&bytes));
            }
            ".explain" => {
                let text = self.session.explain(rest.trim_end_matches(';'))?;
                self.out(&text);
            }
            ".format" => match rest {
                "table" => self.format = Format::Table,
                "csv" => self.format = Format::Csv,
                _ => return Err(Error::Usage("usage: .format table|csv".into())),
            },
            _ => return Err(Error::Usage(format!("unknown command {cmd}; try .help"))),
        }
        Ok(true)
    }

    fn repl(&mut self) {
        let stdin = io::stdin();
        let interactive = stdin.is_terminal();
        let mut history: Vec<String> = Vec::new();
        let mut buffer = String::new();
        let prompt = |buffer: &str| {
            if interactive {
                print!("{}", if buffer.is_empty() { "ottdb> " } else { "  ...> " });
                let _ = io::stdout().flush();
            }
        };
        prompt(&buffer);
        for line in stdin.lock().lines() {
            let Ok(line) = line else { break };
            let trimmed = line.trim();
            if buffer.is_empty() && trimmed.starts_with('.') {
                history.push(trimmed.to_owned());
                match self.dot_command(trimmed, &history) {
                    Ok(true) => {}
                    Ok(false) => return,
                    Err(e) => eprintln!("error: {e}"),
                }
            } else if !trimmed.is_empty() || !buffer.is_empty() {
                if !buffer.is_empty() {
                    buffer.push('\n');
                }
                buffer.push_str(&line);
                if trimmed.ends_with(';') {
                    let text = std::mem::take(&mut buffer);
                    history.push(text.clone());
                    if let Err(e) = self.statement(text.trim()) {
                        eprintln!("error: {e}");
                    }
                }
            }
            prompt(&buffer);
        }
        if !buffer.trim().is_empty() {
            eprintln!("error: incomplete statement at end of input (missing ';')");
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.category().exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let db = match &cli.dataset {
        Some(dir) => match open_dataset(dir) {
            Ok(db) => db,
            Err(e) => return fail(&e),
        },
        None => builtin_schema(),
    };
    let audit = match &cli.audit {
        Some(path) => match AuditLog::to_file(path) {
            Ok(log) => log,
            Err(e) => return fail(&Error::Audit(e)),
        },
        None => AuditLog::new(),
    };
    if cli.write_back && cli.dataset.is_none() {
        return fail(&Error::Usage("--write-back needs --dataset".into()));
    }
    let mut app = App { session: Session::with_audit(cli.role, db, audit), format: cli.format };
    match app.run(cli.command) {
        Ok(changed) => {
            if changed && cli.write_back {
                let dir = cli.dataset.as_deref().expect("checked above");
                if let Err(e) = save_dataset(app.session.database(), dir) {
                    return fail(&e);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
