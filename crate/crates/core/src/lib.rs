//! Embedded topological-relational database engine over finite Alexandrov
//! spaces.
//!
//! Spatial cells, moments and spans of time, versions and levels of detail are
//! all stored the same way: a table of elements plus a bounded-by relation.
//! The modules layer relational-style operators and consistency checks on top
//! of that single representation.

pub mod algebra;
pub mod demo;
pub mod error;
pub mod lod;
pub mod spacetime;
pub mod storage;
pub mod topology;
pub mod versioning;

pub use error::{Error, Result};
pub use topology::{BoundedByPair, CellKind, Element, ElementId, Limits, Preorder, Scalar, Space};
