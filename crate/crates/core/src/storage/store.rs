use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::spacetime::PointRow;
use crate::topology::{BoundedByPair, Element, ElementId, Scalar, Space};
use crate::versioning::{apply_changeset, reconstruct_version, ChangeSet, VersionSpace};

/// Non-key columns of the element table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct XRow {
    pub gen_target: Option<ElementId>,
    pub version: String,
}

/// All versions and levels of detail of one space, as relational tables.
///
/// Tables are keyed by their primary keys. A pair's level is that of its
/// endpoints, which must agree.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VersionStore {
    pub x: BTreeMap<ElementId, XRow>,
    /// Pair to the version that created it.
    pub r: BTreeMap<BoundedByPair, String>,
    pub points: BTreeMap<ElementId, PointRow>,
    pub del_x: BTreeSet<(ElementId, String)>,
    pub del_r: BTreeSet<(BoundedByPair, String)>,
    pub vx: BTreeSet<String>,
    pub vr: BTreeSet<(String, String)>,
    pub atts: BTreeMap<ElementId, BTreeMap<String, Scalar>>,
}

impl VersionStore {
    /// A store holding `space` as its only version.
    pub fn initial(version: impl Into<String>, space: &Space) -> Self {
        let version = version.into();
        let mut store = Self::default();
        store.vx.insert(version.clone());
        for e in space.elements() {
            store.insert_element(e, &version);
        }
        for p in space.relation() {
            store.r.insert(p.clone(), version.clone());
        }
        store
    }

    fn insert_element(&mut self, e: &Element, version: &str) {
        self.x.insert(
            e.key.clone(),
            XRow {
                gen_target: e.gen_target.clone(),
                version: version.to_string(),
            },
        );
        if !e.attributes.is_empty() {
            self.atts.insert(e.key.clone(), e.attributes.clone());
        }
    }

    pub fn with_points(mut self, points: impl IntoIterator<Item = PointRow>) -> Self {
        self.points.extend(points.into_iter().map(|p| (p.pid.clone(), p)));
        self
    }

    /// The stored element `key` with its first version, target and attributes.
    pub fn element(&self, key: &ElementId) -> Option<Element> {
        let row = self.x.get(key)?;
        Some(Element {
            key: key.clone(),
            version: Some(row.version.clone()),
            gen_target: row.gen_target.clone(),
            attributes: self.atts.get(key).cloned().unwrap_or_default(),
        })
    }

    pub fn version_space(&self) -> Result<VersionSpace> {
        VersionSpace::new(&self.vx, self.vr.iter().map(|(a, b)| (a, b)))
    }

    /// Levels of detail present in the element table.
    pub fn lods(&self) -> BTreeSet<u32> {
        self.x.keys().map(|k| k.lod).collect()
    }

    /// Records `cs` as the new version `cs.version` with the given parents.
    ///
    /// The changeset is applied to the reconstruction of the new version (the
    /// union of what its parents contribute), and only the net difference is
    /// stored. On error the store is left unchanged.
    pub fn commit(&mut self, parents: &[&str], cs: &ChangeSet) -> Result<()> {
        let v = cs.version.as_str();
        if self.vx.contains(v) {
            return Err(Error::InvalidChangeSet(format!("version {v} already exists")));
        }
        if let Some(p) = parents.iter().find(|p| !self.vx.contains(**p)) {
            return Err(Error::UnknownVersion(p.to_string()));
        }
        let mut next = self.clone();
        next.vx.insert(v.to_string());
        next.vr.extend(parents.iter().map(|p| (p.to_string(), v.to_string())));
        let before = reconstruct_version(&next, v)?;
        let after = apply_changeset(&before, cs)?;

        for x in before.ids().filter(|x| !after.contains(x)) {
            next.del_x.insert((x.clone(), v.to_string()));
        }
        for p in before.relation().difference(after.relation()) {
            next.del_r.insert((p.clone(), v.to_string()));
        }
        for e in after.elements().filter(|e| !before.contains(&e.key)) {
            if next.x.contains_key(&e.key) {
                return Err(Error::PrimaryKey {
                    table: "X",
                    row: e.key.to_string(),
                });
            }
            next.insert_element(e, v);
        }
        for p in after.relation().difference(before.relation()) {
            if p.ida.lod != p.idb.lod {
                return Err(Error::InvalidChangeSet(format!("pair {p} crosses levels of detail")));
            }
            if next.r.insert(p.clone(), v.to_string()).is_some() {
                return Err(Error::PrimaryKey {
                    table: "R",
                    row: p.to_string(),
                });
            }
        }
        *self = next;
        Ok(())
    }
}
