use std::fmt;

use thiserror::Error;

use crate::algebra::MapReport;
use crate::topology::ElementId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("foreign key violation: pair ({ida}, {idb}) references unknown element {missing}")]
    DanglingPair {
        ida: ElementId,
        idb: ElementId,
        missing: ElementId,
    },
    #[error("T0 violation: relation contains the cycle {}", Cycle(.0))]
    T0Violation(Vec<ElementId>),
    #[error("unknown element {0}")]
    NotFound(ElementId),
    #[error("duplicate element {0}")]
    DuplicateElement(ElementId),
    #[error("reflexive pair ({0}, {0}) is not allowed in a stored relation")]
    ReflexivePair(ElementId),
    #[error("size guard: {size} elements exceed the limit of {limit}")]
    SizeGuard { size: usize, limit: usize },
    #[error("dimension is undefined on a cyclic relation: {}", Cycle(.0))]
    DimensionUndefined(Vec<ElementId>),
    #[error("the empty space has no dimension")]
    EmptySpace,
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("map rejected: {0}")]
    RejectedMap(Box<MapReport>),
    #[error("{0} lies outside the query region")]
    OutsideRegion(ElementId),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("missing geometry for element {0}")]
    MissingGeometry(ElementId),
    #[error("unknown version {0:?}")]
    UnknownVersion(String),
    #[error("invalid changeset: {0}")]
    InvalidChangeSet(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{table}: expected header {expected:?}, found {found:?}")]
    BadHeader {
        table: &'static str,
        expected: Vec<&'static str>,
        found: Vec<String>,
    },
    #[error("{table} row {row}: {message}")]
    BadRow {
        table: &'static str,
        row: usize,
        message: String,
    },
    #[error("foreign key {key} violated by {table} row {row}")]
    ForeignKey {
        table: &'static str,
        row: String,
        key: &'static str,
    },
    #[error("duplicate primary key in {table}: {row}")]
    PrimaryKey { table: &'static str, row: String },
}

struct Cycle<'a>(&'a [ElementId]);

impl fmt::Display for Cycle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, id) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            write!(f, "{id}")?;
        }
        if let Some(first) = self.0.first() {
            write!(f, " -> {first}")?;
        }
        Ok(())
    }
}
