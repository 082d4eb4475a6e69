use std::collections::BTreeSet;

use super::store::VersionStore;
use crate::algebra::SpaceMap;
use crate::error::{Error, Result};
use crate::lod::{direct_path, level_space, monotone_path_query};
use crate::topology::{BoundedByPair, ElementId, Space};
use crate::versioning::reconstruct_version;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PathOptions {
    /// Treat generalisations as monotonic and answer single-level regions
    /// through the coarser level first.
    pub monotone: bool,
}

/// Versions in which `a` and `b` are connected inside `region`.
///
/// Only versions where both points are live are candidates. Within a level
/// the stored relation connects; across levels, an element and its
/// generalisation are adjacent.
pub fn versions_with_path(
    store: &VersionStore,
    a: &ElementId,
    b: &ElementId,
    region: &BTreeSet<ElementId>,
    options: &PathOptions,
) -> Result<BTreeSet<String>> {
    for x in [a, b] {
        if !region.contains(x) {
            return Err(Error::OutsideRegion(x.clone()));
        }
    }
    if let Some(x) = region.iter().find(|x| !store.x.contains_key(*x)) {
        return Err(Error::NotFound(x.clone()));
    }
    let vs = store.version_space()?;
    let mut out = BTreeSet::new();
    for v in vs.versions() {
        let space = reconstruct_version(store, v)?;
        if !space.contains(a) || !space.contains(b) {
            continue;
        }
        let live: BTreeSet<ElementId> = region.iter().filter(|x| space.contains(x)).cloned().collect();
        if path_in_version(&space, &live, a, b, options)? {
            out.insert(v.to_string());
        }
    }
    Ok(out)
}

fn path_in_version(
    space: &Space,
    live: &BTreeSet<ElementId>,
    a: &ElementId,
    b: &ElementId,
    options: &PathOptions,
) -> Result<bool> {
    let lods: BTreeSet<u32> = live.iter().map(|x| x.lod).collect();
    if options.monotone && lods.len() == 1 {
        if let Some(g) = generalisation_of_level(space, a.lod)? {
            return Ok(monotone_path_query(&g, live, a, b)?.answer);
        }
    }
    let mut pairs: BTreeSet<BoundedByPair> = space.relation().clone();
    for e in space.elements() {
        if let Some(t) = e.gen_target.as_ref().filter(|t| space.contains(t)) {
            pairs.insert(BoundedByPair {
                ida: e.key.clone(),
                idb: t.clone(),
            });
        }
    }
    let joined = Space::new(space.elements().cloned(), pairs, false)?;
    direct_path(&joined, live, a, b)
}

/// The map out of level `lod`, if every element there points into one
/// coarser level.
fn generalisation_of_level(space: &Space, lod: u32) -> Result<Option<SpaceMap>> {
    let source = level_space(space, lod)?;
    let targets: Option<Vec<(ElementId, ElementId)>> = source
        .elements()
        .map(|e| {
            e.gen_target
                .clone()
                .filter(|t| space.contains(t))
                .map(|t| (e.key.clone(), t))
        })
        .collect();
    let Some(mapping) = targets else { return Ok(None) };
    let glods: BTreeSet<u32> = mapping.iter().map(|(_, t)| t.lod).collect();
    let [glod] = glods.into_iter().collect::<Vec<_>>()[..] else {
        return Ok(None);
    };
    let target = level_space(space, glod)?;
    Ok(Some(SpaceMap::total(source, target, mapping)?))
}
