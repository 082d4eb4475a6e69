//! Relational storage of all versions and levels of detail of a space.
//!
//! Tables: `X(id, lod, gid, glod, version)`, `R(ida, idb, lod, version)`,
//! `Point(pid, lod, x, y, z, t)`, `DelX(id, lod, version)`,
//! `DelR(ida, idb, lod, version)`, `VX(version)`, `VR(fromv, tov)` and the
//! attribute sidecar `Atts(id, lod, name, value)`.

mod io;
mod path;
mod store;
mod validate;

pub use io::{decode_scalar, encode_scalar, load, load_unchecked, save};
pub use path::{versions_with_path, PathOptions};
pub use store::{VersionStore, XRow};
pub use validate::{check_foreign_keys, validate, ValidateOptions, ValidationReport, Violation};
