//! Versions of a space.
//!
//! A store keeps every element and pair ever created, tagged with the version
//! that introduced it, plus deletion rows. The versions themselves form a T0
//! space: `fromv` is bounded by `tov`, so the star of `v` is exactly the set
//! of versions whose rows are needed to rebuild `v`.

mod merge;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::storage::VersionStore;
use crate::topology::{BoundedByPair, Element, ElementId, Space};

pub use merge::{
    merge, ConflictReport, ConsistencyConflict, ConsistencyRule, InherentConflict, LinearDag, PredicateRule,
    RuleRegistry, T0Rule,
};

/// Versions and transitions `(fromv, tov)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionSpace {
    space: Space,
}

fn token(v: &str) -> ElementId {
    ElementId::new(v)
}

impl VersionSpace {
    pub fn new<V, T, A, B>(versions: V, transitions: T) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: AsRef<str>,
        T: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let elements: Vec<Element> = versions.into_iter().map(|v| Element::new(token(v.as_ref()))).collect();
        let pairs: Vec<BoundedByPair> = transitions
            .into_iter()
            .map(|(a, b)| BoundedByPair {
                ida: token(a.as_ref()),
                idb: token(b.as_ref()),
            })
            .collect();
        let space = Space::new(elements, pairs, false).map_err(|e| match e {
            Error::DanglingPair { missing, .. } => Error::UnknownVersion(missing.id),
            other => other,
        })?;
        space.ensure_t0()?;
        Ok(Self { space })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn versions(&self) -> impl Iterator<Item = &str> + '_ {
        self.space.ids().map(|x| x.id.as_str())
    }

    pub fn contains(&self, v: &str) -> bool {
        self.space.contains(&token(v))
    }

    fn tokens<'a>(&self, vs: impl IntoIterator<Item = &'a str>) -> Result<Vec<ElementId>> {
        vs.into_iter()
            .map(|v| {
                let t = token(v);
                if self.space.contains(&t) {
                    Ok(t)
                } else {
                    Err(Error::UnknownVersion(v.to_string()))
                }
            })
            .collect()
    }

    fn untokens(set: BTreeSet<ElementId>) -> BTreeSet<String> {
        set.into_iter().map(|x| x.id).collect()
    }

    /// `U_A`: the versions with a path into `vs`, including `vs`.
    pub fn star<'a>(&self, vs: impl IntoIterator<Item = &'a str>) -> Result<BTreeSet<String>> {
        let t = self.tokens(vs)?;
        Ok(Self::untokens(self.space.star(&t)?))
    }

    /// `cl(A)`: the versions reachable from `vs`, including `vs`.
    pub fn closure<'a>(&self, vs: impl IntoIterator<Item = &'a str>) -> Result<BTreeSet<String>> {
        let t = self.tokens(vs)?;
        Ok(Self::untokens(self.space.closure(&t)?))
    }

    /// Versions with no parent.
    pub fn roots(&self) -> BTreeSet<String> {
        let children: BTreeSet<&ElementId> = self.space.relation().iter().map(|p| &p.idb).collect();
        self.space
            .ids()
            .filter(|x| !children.contains(x))
            .map(|x| x.id.clone())
            .collect()
    }

    /// Versions with no child.
    pub fn heads(&self) -> BTreeSet<String> {
        let parents: BTreeSet<&ElementId> = self.space.relation().iter().map(|p| &p.ida).collect();
        self.space
            .ids()
            .filter(|x| !parents.contains(x))
            .map(|x| x.id.clone())
            .collect()
    }
}

/// Every version whose rows are needed to rebuild `v`.
pub fn version_star(vs: &VersionSpace, v: &str) -> Result<BTreeSet<String>> {
    vs.star([v])
}

/// Whether `P(V0, v) = U_v ∩ cl(V0)` lies inside `P(W) = U_W ∪ cl(W)`.
pub fn reconstruction_covers(vs: &VersionSpace, v0_set: &[&str], v: &str, w_set: &[&str]) -> Result<bool> {
    let from_v0 = vs.closure(v0_set.iter().copied())?;
    let to_v = vs.star([v])?;
    let through_w: BTreeSet<String> = vs
        .star(w_set.iter().copied())?
        .union(&vs.closure(w_set.iter().copied())?)
        .cloned()
        .collect();
    Ok(to_v.intersection(&from_v0).all(|x| through_w.contains(x)))
}

/// A general modification: elementary removals and additions, tagged with the
/// version they produce.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChangeSet {
    pub version: String,
    pub add_elements: Vec<Element>,
    pub remove_elements: BTreeSet<ElementId>,
    pub add_pairs: BTreeSet<BoundedByPair>,
    pub remove_pairs: BTreeSet<BoundedByPair>,
}

impl ChangeSet {
    pub fn new(version: impl Into<String>) -> Self {
        Self {
            version: version.into(),
            ..Self::default()
        }
    }

    pub fn add_element(mut self, element: impl Into<Element>) -> Self {
        self.add_elements.push(element.into());
        self
    }

    pub fn remove_element(mut self, id: impl Into<ElementId>) -> Self {
        self.remove_elements.insert(id.into());
        self
    }

    pub fn add_pair(mut self, ida: impl Into<ElementId>, idb: impl Into<ElementId>) -> Self {
        self.add_pairs.insert(BoundedByPair::new(ida, idb));
        self
    }

    pub fn remove_pair(mut self, ida: impl Into<ElementId>, idb: impl Into<ElementId>) -> Self {
        self.remove_pairs.insert(BoundedByPair::new(ida, idb));
        self
    }
}

/// Applies removals of elements, removals of pairs, additions of elements and
/// additions of pairs, in that order.
///
/// Removing `x` connects every `y` bounded by `x` to everything `x` is bounded
/// by, so what remains is the subspace on the other elements.
pub fn apply_changeset(space: &Space, cs: &ChangeSet) -> Result<Space> {
    if let Some(e) = cs.add_elements.iter().find(|e| cs.remove_elements.contains(&e.key)) {
        return Err(Error::InvalidChangeSet(format!("{} is both added and removed", e.key)));
    }
    space.ensure_known(&cs.remove_elements)?;

    let mut elements: BTreeMap<ElementId, Element> = space.elements().map(|e| (e.key.clone(), e.clone())).collect();
    let mut pairs: BTreeSet<BoundedByPair> = space.relation().clone();
    for x in &cs.remove_elements {
        let preds: Vec<ElementId> = pairs.iter().filter(|p| p.idb == *x).map(|p| p.ida.clone()).collect();
        let succs: Vec<ElementId> = pairs.iter().filter(|p| p.ida == *x).map(|p| p.idb.clone()).collect();
        pairs.retain(|p| p.ida != *x && p.idb != *x);
        for y in &preds {
            for z in &succs {
                if y != z {
                    pairs.insert(BoundedByPair {
                        ida: y.clone(),
                        idb: z.clone(),
                    });
                }
            }
        }
        elements.remove(x);
    }
    for p in &cs.remove_pairs {
        if !pairs.remove(p) {
            return Err(Error::InvalidChangeSet(format!("pair {p} is not in the relation")));
        }
    }
    for e in &cs.add_elements {
        if elements.insert(e.key.clone(), e.clone()).is_some() {
            return Err(Error::DuplicateElement(e.key.clone()));
        }
    }
    pairs.extend(cs.add_pairs.iter().cloned());
    Space::new(elements.into_values(), pairs, true)
}

/// The space of version `v`: rows tagged by a version in the star of `v` and
/// not deleted by one.
pub fn reconstruct_version(store: &VersionStore, v: &str) -> Result<Space> {
    let vs = store.version_space()?;
    let star = version_star(&vs, v)?;
    let live_x: BTreeSet<&ElementId> = store
        .x
        .iter()
        .filter(|(_, row)| star.contains(&row.version))
        .map(|(key, _)| key)
        .collect();
    let live_r: BTreeSet<&BoundedByPair> = store
        .r
        .iter()
        .filter(|(_, version)| star.contains(*version))
        .map(|(pair, _)| pair)
        .collect();

    let mut dead_x = BTreeSet::new();
    for (key, version) in &store.del_x {
        if star.contains(version) {
            if !live_x.contains(key) {
                return Err(Error::Integrity(format!(
                    "{key} is deleted in {version} but never created in an ancestor of {v}"
                )));
            }
            dead_x.insert(key);
        }
    }
    let mut dead_r = BTreeSet::new();
    for (pair, version) in &store.del_r {
        if star.contains(version) {
            if !live_r.contains(pair) {
                return Err(Error::Integrity(format!(
                    "pair {pair} is deleted in {version} but never created in an ancestor of {v}"
                )));
            }
            dead_r.insert(pair);
        }
    }

    let elements: Vec<Element> = live_x
        .into_iter()
        .filter(|key| !dead_x.contains(key))
        .map(|key| store.element(key).expect("live rows exist"))
        .collect();
    let alive: BTreeSet<&ElementId> = elements.iter().map(|e| &e.key).collect();
    let mut pairs = Vec::new();
    for p in live_r.into_iter().filter(|p| !dead_r.contains(p)) {
        if let Some(end) = [&p.ida, &p.idb].into_iter().find(|x| !alive.contains(x)) {
            return Err(Error::Integrity(format!("pair {p} is live in {v} but {end} is not")));
        }
        pairs.push(p.clone());
    }
    Space::new(elements, pairs, true)
}
