//! Crate-wide error type.

use std::io;

use thiserror::Error;

use crate::access::{Action, Role};
use crate::catalog::{SchemaError, ValidationError};
use crate::engine::{ExecError, QueryError};
use crate::sql::SqlError;
use crate::storage::StorageError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Sql(#[from] SqlError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error("permission denied: role {role} may not {action}")]
    Denied { role: Role, action: Action },
    #[error("{0} integrity violation(s) found")]
    Violations(usize),
    #[error("audit log: {0}")]
    Audit(io::Error),
    #[error("{0}")]
    Usage(String),
}

/// Coarse classes of failure, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad query text, unknown names, arithmetic errors.
    Query,
    /// Constraint violations, malformed data, denied actions.
    Integrity,
    Io,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Query => 1,
            ErrorCategory::Integrity => 2,
            ErrorCategory::Io => 3,
        }
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Sql(_) | Error::Exec(_) | Error::Usage(_) => ErrorCategory::Query,
            Error::Validation(_) | Error::Schema(_) | Error::Denied { .. } | Error::Violations(_) => {
                ErrorCategory::Integrity
            }
            Error::Audit(_) => ErrorCategory::Io,
            Error::Storage(e) => match e.root() {
                StorageError::Io(_) => ErrorCategory::Io,
                StorageError::UnknownTable(_) | StorageError::UnknownColumn { .. } => ErrorCategory::Query,
                _ => ErrorCategory::Integrity,
            },
        }
    }
}

impl From<QueryError> for Error {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Sql(e) => Error::Sql(e),
            QueryError::Exec(e) => Error::Exec(e),
        }
    }
}
