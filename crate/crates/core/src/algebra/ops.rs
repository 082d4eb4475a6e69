use std::collections::{BTreeMap, BTreeSet};

use super::map::SpaceMap;
use super::reduce::open_reduction;
use crate::error::{Error, Result};
use crate::topology::{BoundedByPair, Element, ElementId, Scalar, Space};

/// Default separator between the component ids of a product element.
pub const PRODUCT_SEPARATOR: &str = "⊗";

/// Topological selection: the subspace on `keep`.
///
/// The relation is `OPEN` of the strict preorder restricted to `keep`, so
/// indirect boundary relations through dropped elements survive.
pub fn select_subspace<'a>(space: &Space, keep: impl IntoIterator<Item = &'a ElementId>) -> Result<Space> {
    let keep: BTreeSet<&ElementId> = keep.into_iter().collect();
    space.ensure_known(keep.iter().copied())?;
    let index = space.index();
    let mut restricted = BTreeSet::new();
    for &a in &keep {
        let reach = index.reach([index.pos[a]], true);
        for j in reach.ones() {
            let b = index.ids[j];
            if b != a && keep.contains(b) {
                restricted.insert(BoundedByPair {
                    ida: a.clone(),
                    idb: b.clone(),
                });
            }
        }
    }
    let relation = open_reduction(&restricted)?;
    let elements = keep
        .into_iter()
        .map(|id| (id.clone(), space.element(id).expect("checked").clone()))
        .collect();
    Ok(Space::from_parts(elements, relation))
}

/// Id of the product element `(x, y)`.
pub fn product_key(x: &ElementId, y: &ElementId, separator: &str) -> ElementId {
    ElementId::new(format!("{x}{separator}{y}"))
}

pub fn product(a: &Space, b: &Space) -> Space {
    product_with(a, b, PRODUCT_SEPARATOR)
}

/// Product space: `(x, y)` is bounded by `(x', y)` for each pair `(x, x')`
/// of `a` and by `(x, y')` for each pair `(y, y')` of `b`.
pub fn product_with(a: &Space, b: &Space, separator: &str) -> Space {
    let mut elements = BTreeMap::new();
    for x in a.ids() {
        for y in b.ids() {
            let key = product_key(x, y, separator);
            elements.insert(key.clone(), Element::new(key));
        }
    }
    let mut relation = BTreeSet::new();
    for p in a.relation() {
        for y in b.ids() {
            relation.insert(BoundedByPair {
                ida: product_key(&p.ida, y, separator),
                idb: product_key(&p.idb, y, separator),
            });
        }
    }
    for p in b.relation() {
        for x in a.ids() {
            relation.insert(BoundedByPair {
                ida: product_key(x, &p.ida, separator),
                idb: product_key(x, &p.idb, separator),
            });
        }
    }
    Space::from_parts(elements, relation)
}

/// Tagged disjoint union. Member `i` contributes its elements under level
/// tag `i`; the id is the element's full text form.
pub fn disjoint_union(spaces: &[Space]) -> Space {
    let mut elements = BTreeMap::new();
    let mut relation = BTreeSet::new();
    for (i, space) in spaces.iter().enumerate() {
        let tag = |id: &ElementId| ElementId::at(id.to_string(), i as u32);
        for e in space.elements() {
            let key = tag(&e.key);
            elements.insert(key.clone(), e.rekeyed(key));
        }
        for p in space.relation() {
            relation.insert(BoundedByPair {
                ida: tag(&p.ida),
                idb: tag(&p.idb),
            });
        }
    }
    Space::from_parts(elements, relation)
}

/// Two members of one class disagreeing on an attribute; the value of the
/// representative's first-listed member wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeClash {
    pub class: ElementId,
    pub attribute: String,
    pub kept: Scalar,
    pub dropped: Scalar,
    pub dropped_from: ElementId,
}

/// Result of a quotient with the projection map and attribute clashes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub space: Space,
    pub projection: BTreeMap<ElementId, ElementId>,
    pub clashes: Vec<AttributeClash>,
}

pub fn quotient(space: &Space, classes: &[BTreeSet<ElementId>]) -> Result<Space> {
    quotient_detailed(space, classes).map(|q| q.space)
}

/// Identifies the members of each class. The class is represented by its
/// least member id and carries the final topology of the projection.
pub fn quotient_detailed(space: &Space, classes: &[BTreeSet<ElementId>]) -> Result<Quotient> {
    let mut projection = BTreeMap::new();
    for class in classes {
        let Some(rep) = class.first() else {
            return Err(Error::InvalidPartition("empty class".into()));
        };
        for x in class {
            if !space.contains(x) {
                return Err(Error::NotFound(x.clone()));
            }
            if projection.insert(x.clone(), rep.clone()).is_some() {
                return Err(Error::InvalidPartition(format!("{x} is in two classes")));
            }
        }
    }
    if let Some(x) = space.ids().find(|x| !projection.contains_key(*x)) {
        return Err(Error::InvalidPartition(format!("{x} is in no class")));
    }

    let mut elements = BTreeMap::new();
    let mut clashes = Vec::new();
    for class in classes {
        let rep = class.first().expect("non-empty");
        let mut merged = space.element(rep).expect("checked").rekeyed(rep.clone());
        for x in class.iter().skip(1) {
            let member = space.element(x).expect("checked");
            for (name, value) in &member.attributes {
                match merged.attributes.get(name) {
                    None => {
                        merged.attributes.insert(name.clone(), value.clone());
                    }
                    Some(kept) if kept != value => {
                        log::warn!("quotient: {name} of {x} clashes with class {rep}, keeping {kept}");
                        clashes.push(AttributeClash {
                            class: rep.clone(),
                            attribute: name.clone(),
                            kept: kept.clone(),
                            dropped: value.clone(),
                            dropped_from: x.clone(),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        elements.insert(rep.clone(), merged);
    }
    let relation = induced_relation(space, &projection)?;
    Ok(Quotient {
        space: Space::from_parts(elements, relation),
        projection,
        clashes,
    })
}

/// Final topology on the image of `f`.
pub fn image_space(f: &SpaceMap) -> Result<Space> {
    f.require_total("image_space")?;
    let elements = f
        .image()
        .into_iter()
        .map(|y| {
            let e = f.target().element(&y).expect("validated map").clone();
            (y, e)
        })
        .collect();
    let relation = induced_relation(f.source(), f.mapping())?;
    Ok(Space::from_parts(elements, relation))
}

/// `OPEN` of the projected relation; a cycle means the final topology is
/// not T0.
fn induced_relation(source: &Space, projection: &BTreeMap<ElementId, ElementId>) -> Result<BTreeSet<BoundedByPair>> {
    let projected: BTreeSet<BoundedByPair> = source
        .relation()
        .iter()
        .map(|p| BoundedByPair {
            ida: projection[&p.ida].clone(),
            idb: projection[&p.idb].clone(),
        })
        .filter(|p| p.ida != p.idb)
        .collect();
    open_reduction(&projected)
}

/// Equi-join space: the subspace of the product of the sources on the pairs
/// `(a, b)` with `f(a) = g(b)`.
pub fn pullback(f: &SpaceMap, g: &SpaceMap) -> Result<Space> {
    pullback_with(f, g, PRODUCT_SEPARATOR)
}

pub fn pullback_with(f: &SpaceMap, g: &SpaceMap, separator: &str) -> Result<Space> {
    f.require_total("pullback")?;
    g.require_total("pullback")?;
    if f.target() != g.target() {
        return Err(Error::InvalidMap("pullback maps need a common target".into()));
    }
    let full = product_with(f.source(), g.source(), separator);
    let keep: Vec<ElementId> = f
        .mapping()
        .iter()
        .flat_map(|(a, fa)| {
            g.mapping()
                .iter()
                .filter(move |(_, gb)| *gb == fa)
                .map(move |(b, _)| product_key(a, b, separator))
        })
        .collect();
    select_subspace(&full, &keep)
}
