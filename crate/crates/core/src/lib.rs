//! Embedded relational catalog engine for OTT show metadata.

pub mod access;
pub mod catalog;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod reference_queries;
pub mod sql;
pub mod storage;
pub mod value;

pub use access::{Action, Role, Session};
pub use catalog::{builtin_schema, Database};
pub use engine::{run_query, ResultSet};
pub use error::{Error, ErrorCategory};
pub use value::{ColumnType, Row, Value};
