use std::fmt;

use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single schema violation. Validation collects these instead of stopping
/// at the first one.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("attribute `{0}` is not declared")]
    UndeclaredAttribute(String),
    #[error("attribute `{0}` is declared more than once")]
    DuplicateAttribute(String),
    #[error("attribute name must be a nonempty identifier, got `{0}`")]
    InvalidAttributeName(String),
    #[error("ordinal attribute `{attr}` lists label `{label}` more than once")]
    DuplicateLabel { attr: String, label: String },
    #[error("attribute `{attr}` expects a {expected} value, got `{found}`")]
    KindMismatch {
        attr: String,
        expected: &'static str,
        found: String,
    },
    #[error("label `{label}` is not in the declared order of `{attr}`")]
    UnknownLabel { attr: String, label: String },
    #[error("item id `{0}` is used more than once")]
    DuplicateItem(String),
    #[error("item id must be a nonempty identifier, got `{0}`")]
    InvalidItemId(String),
    #[error("item `{item}` has no value for attribute `{attr}`")]
    MissingValue { item: String, attr: String },
    #[error("item `{item}` has a value for undeclared attribute `{attr}`")]
    ExtraValue { item: String, attr: String },
    #[error("unknown item id `{0}`")]
    UnknownItem(String),
    #[error("values of different kinds or orders cannot be compared")]
    Incomparable,
}

/// Newtype over a nonempty list of violations so it can travel inside [`Error`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaErrors(pub Vec<SchemaError>);

impl fmt::Display for SchemaErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl From<SchemaError> for SchemaErrors {
    fn from(e: SchemaError) -> Self {
        SchemaErrors(vec![e])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("schema error: {0}")]
    Schema(SchemaErrors),
    #[error("no alternative to choose from: the list is empty")]
    EmptyChoice,
    #[error("no satisfactory element in the list")]
    NoSatisfactoryElement,
    #[error("procedure contains a disjunctive filter; use the general normal form")]
    NotSimple,
    #[error("ordering uses attribute `{0}` more than once")]
    DuplicateOrderingAttribute(String),
    #[error("bounds on ordinal attribute `{0}` can only be compared against a schema")]
    UnresolvedBound(String),
    #[error("resource limit exceeded: {what} needs {needed}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("format error: {0}")]
    Format(String),
}

impl From<SchemaError> for Error {
    fn from(e: SchemaError) -> Self {
        Error::Schema(e.into())
    }
}

impl From<SchemaErrors> for Error {
    fn from(e: SchemaErrors) -> Self {
        Error::Schema(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
