use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Key of a stored element: an opaque id plus its level-of-detail tag.
///
/// The textual form is `id` for level 0 and `id@lod` otherwise. An id that
/// itself ends in `@<digits>` always prints its level so that parsing the
/// text gives back the same key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId {
    pub id: String,
    pub lod: u32,
}

impl ElementId {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), lod: 0 }
    }

    pub fn at(id: impl Into<String>, lod: u32) -> Self {
        Self { id: id.into(), lod }
    }
}

fn lod_suffix(s: &str) -> Option<(&str, u32)> {
    let (head, tail) = s.rsplit_once('@')?;
    if head.is_empty() || tail.is_empty() || !tail.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    tail.parse().ok().map(|lod| (head, lod))
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lod == 0 && lod_suffix(&self.id).is_none() {
            f.write_str(&self.id)
        } else {
            write!(f, "{}@{}", self.id, self.lod)
        }
    }
}

impl FromStr for ElementId {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match lod_suffix(s) {
            Some((id, lod)) => ElementId::at(id, lod),
            None => ElementId::new(s),
        })
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        s.parse().unwrap_or_else(|never| match never {})
    }
}

impl From<String> for ElementId {
    fn from(s: String) -> Self {
        ElementId::from(s.as_str())
    }
}

impl From<&ElementId> for ElementId {
    fn from(id: &ElementId) -> Self {
        id.clone()
    }
}

/// Semantic attribute value.
///
/// Floats compare by bit pattern so that equality is reflexive and exact
/// round trips through CSV can be asserted.
#[derive(Debug, Clone)]
pub enum Scalar {
    Str(String),
    Int(i64),
    Float(f64),
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Str(a), Scalar::Str(b)) => a == b,
            (Scalar::Int(a), Scalar::Int(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Str(s) => f.write_str(s),
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Float(x) => write!(f, "{x:?}"),
        }
    }
}

impl From<&str> for Scalar {
    fn from(s: &str) -> Self {
        Scalar::Str(s.to_owned())
    }
}

impl From<String> for Scalar {
    fn from(s: String) -> Self {
        Scalar::Str(s)
    }
}

impl From<i64> for Scalar {
    fn from(i: i64) -> Self {
        Scalar::Int(i)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

/// A row of the element table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub key: ElementId,
    /// Version in which the element first appears.
    pub version: Option<String>,
    /// Coarser element this one generalises to (`gid`, `glod`).
    pub gen_target: Option<ElementId>,
    pub attributes: BTreeMap<String, Scalar>,
}

impl Element {
    pub fn new(key: impl Into<ElementId>) -> Self {
        Self {
            key: key.into(),
            version: None,
            gen_target: None,
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_version(mut self, version: impl Into<String>) -> Self {
        self.version = Some(version.into());
        self
    }

    pub fn with_gen_target(mut self, target: impl Into<ElementId>) -> Self {
        self.gen_target = Some(target.into());
        self
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<Scalar>) -> Self {
        self.attributes.insert(name.into(), value.into());
        self
    }

    /// Copy of this element under another key, keeping attributes and version.
    pub(crate) fn rekeyed(&self, key: ElementId) -> Self {
        Self {
            key,
            version: self.version.clone(),
            gen_target: None,
            attributes: self.attributes.clone(),
        }
    }
}

/// `ida` is bounded by `idb`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundedByPair {
    pub ida: ElementId,
    pub idb: ElementId,
}

impl BoundedByPair {
    pub fn new(ida: impl Into<ElementId>, idb: impl Into<ElementId>) -> Self {
        Self {
            ida: ida.into(),
            idb: idb.into(),
        }
    }
}

impl fmt::Display for BoundedByPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.ida, self.idb)
    }
}
