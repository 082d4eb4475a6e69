use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use super::element::{BoundedByPair, Element, ElementId};
use crate::error::{Error, Result};

/// A topological data type: a finite set of elements together with the
/// bounded-by relation that generates its Alexandrov topology.
///
/// Values are immutable once built; every operation on a space returns a new
/// one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Space {
    elements: BTreeMap<ElementId, Element>,
    relation: BTreeSet<BoundedByPair>,
}

impl Space {
    /// Validates foreign keys and, when `t0_check` is set, acyclicity.
    pub fn new(
        elements: impl IntoIterator<Item = Element>,
        pairs: impl IntoIterator<Item = BoundedByPair>,
        t0_check: bool,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for e in elements {
            if map.contains_key(&e.key) {
                return Err(Error::DuplicateElement(e.key));
            }
            map.insert(e.key.clone(), e);
        }
        let mut relation = BTreeSet::new();
        for p in pairs {
            if p.ida == p.idb {
                return Err(Error::ReflexivePair(p.ida));
            }
            for end in [&p.ida, &p.idb] {
                if !map.contains_key(end) {
                    return Err(Error::DanglingPair {
                        ida: p.ida.clone(),
                        idb: p.idb.clone(),
                        missing: end.clone(),
                    });
                }
            }
            relation.insert(p);
        }
        let space = Self {
            elements: map,
            relation,
        };
        if t0_check {
            space.ensure_t0()?;
        }
        Ok(space)
    }

    pub fn builder() -> SpaceBuilder {
        SpaceBuilder::default()
    }

    /// Caller guarantees the foreign keys hold and no pair is reflexive.
    pub(crate) fn from_parts(elements: BTreeMap<ElementId, Element>, relation: BTreeSet<BoundedByPair>) -> Self {
        debug_assert!(relation
            .iter()
            .all(|p| p.ida != p.idb && elements.contains_key(&p.ida) && elements.contains_key(&p.idb)));
        Self { elements, relation }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, id: &ElementId) -> bool {
        self.elements.contains_key(id)
    }

    pub fn element(&self, id: &ElementId) -> Option<&Element> {
        self.elements.get(id)
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> + '_ {
        self.elements.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &ElementId> + '_ {
        self.elements.keys()
    }

    pub fn id_set(&self) -> BTreeSet<ElementId> {
        self.elements.keys().cloned().collect()
    }

    pub fn relation(&self) -> &BTreeSet<BoundedByPair> {
        &self.relation
    }

    pub fn has_pair(&self, ida: &ElementId, idb: &ElementId) -> bool {
        self.relation.contains(&BoundedByPair {
            ida: ida.clone(),
            idb: idb.clone(),
        })
    }

    /// Fails with [`Error::NotFound`] on the first id that is not an element.
    pub fn ensure_known<'a>(&self, ids: impl IntoIterator<Item = &'a ElementId>) -> Result<()> {
        for id in ids {
            if !self.contains(id) {
                return Err(Error::NotFound(id.clone()));
            }
        }
        Ok(())
    }

    /// One cycle of the relation, if any.
    pub fn find_cycle(&self) -> Option<Vec<ElementId>> {
        let index = self.index();
        index
            .find_cycle()
            .map(|c| c.into_iter().map(|i| index.ids[i].clone()).collect())
    }

    pub fn is_t0(&self) -> bool {
        self.find_cycle().is_none()
    }

    pub fn ensure_t0(&self) -> Result<()> {
        match self.find_cycle() {
            Some(cycle) => Err(Error::T0Violation(cycle)),
            None => Ok(()),
        }
    }

    pub(crate) fn index(&self) -> Indexed<'_> {
        Indexed::new(self.elements.keys(), &self.relation)
    }
}

#[derive(Debug, Clone)]
pub struct SpaceBuilder {
    elements: Vec<Element>,
    pairs: Vec<BoundedByPair>,
    t0_check: bool,
}

impl Default for SpaceBuilder {
    fn default() -> Self {
        Self {
            elements: Vec::new(),
            pairs: Vec::new(),
            t0_check: true,
        }
    }
}

impl SpaceBuilder {
    pub fn element(mut self, element: impl Into<Element>) -> Self {
        self.elements.push(element.into());
        self
    }

    pub fn elements<I>(mut self, elements: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<Element>,
    {
        self.elements.extend(elements.into_iter().map(Into::into));
        self
    }

    pub fn pair(mut self, ida: impl Into<ElementId>, idb: impl Into<ElementId>) -> Self {
        self.pairs.push(BoundedByPair::new(ida, idb));
        self
    }

    pub fn pairs<I, A, B>(mut self, pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<ElementId>,
        B: Into<ElementId>,
    {
        self.pairs
            .extend(pairs.into_iter().map(|(a, b)| BoundedByPair::new(a, b)));
        self
    }

    pub fn t0_check(mut self, on: bool) -> Self {
        self.t0_check = on;
        self
    }

    pub fn build(self) -> Result<Space> {
        Space::new(self.elements, self.pairs, self.t0_check)
    }
}

impl From<&str> for Element {
    fn from(id: &str) -> Self {
        Element::new(id)
    }
}

impl From<ElementId> for Element {
    fn from(id: ElementId) -> Self {
        Element::new(id)
    }
}

impl From<&ElementId> for Element {
    fn from(id: &ElementId) -> Self {
        Element::new(id.clone())
    }
}

/// Dense index over a space (or any id set with pairs) for graph algorithms.
/// `succ[i]` lists the boundary of `ids[i]`, `pred[i]` what it bounds.
pub(crate) struct Indexed<'a> {
    pub ids: Vec<&'a ElementId>,
    pub pos: HashMap<&'a ElementId, usize>,
    pub succ: Vec<Vec<usize>>,
    pub pred: Vec<Vec<usize>>,
}

impl<'a> Indexed<'a> {
    pub fn new(
        ids: impl IntoIterator<Item = &'a ElementId>,
        pairs: impl IntoIterator<Item = &'a BoundedByPair>,
    ) -> Self {
        let ids: Vec<&ElementId> = ids.into_iter().collect();
        let pos: HashMap<&ElementId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut succ = vec![Vec::new(); ids.len()];
        let mut pred = vec![Vec::new(); ids.len()];
        for p in pairs {
            let (Some(&a), Some(&b)) = (pos.get(&p.ida), pos.get(&p.idb)) else {
                continue;
            };
            succ[a].push(b);
            pred[b].push(a);
        }
        Self { ids, pos, succ, pred }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn position(&self, id: &ElementId) -> Result<usize> {
        self.pos.get(id).copied().ok_or_else(|| Error::NotFound(id.clone()))
    }

    /// Everything reachable from `starts` (inclusive), following boundary
    /// pairs when `forward`, otherwise following them backwards.
    pub fn reach(&self, starts: impl IntoIterator<Item = usize>, forward: bool) -> FixedBitSet {
        let adj = if forward { &self.succ } else { &self.pred };
        let mut seen = FixedBitSet::with_capacity(self.len());
        let mut stack: Vec<usize> = Vec::new();
        for s in starts {
            if !seen.put(s) {
                stack.push(s);
            }
        }
        while let Some(n) = stack.pop() {
            for &m in &adj[n] {
                if !seen.put(m) {
                    stack.push(m);
                }
            }
        }
        seen
    }

    /// Reflexive-transitive reachability row for every element.
    pub fn reachability(&self) -> Vec<FixedBitSet> {
        (0..self.len()).map(|i| self.reach([i], true)).collect()
    }

    /// Topological order (bounded elements before their boundary), or a cycle.
    pub fn topo_order(&self) -> std::result::Result<Vec<usize>, Vec<usize>> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop() {
            order.push(i);
            for &j in &self.succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push(j);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(self.find_cycle().unwrap_or_default())
        }
    }

    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let n = self.len();
        let mut colour = vec![WHITE; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if colour[root] != WHITE {
                continue;
            }
            // (node, next child offset)
            let mut stack = vec![(root, 0usize)];
            colour[root] = GREY;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(&child) = self.succ[node].get(*next) {
                    *next += 1;
                    match colour[child] {
                        WHITE => {
                            colour[child] = GREY;
                            parent[child] = node;
                            stack.push((child, 0));
                        }
                        GREY => {
                            let mut cycle = vec![node];
                            let mut cur = node;
                            while cur != child {
                                cur = parent[cur];
                                cycle.push(cur);
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    colour[node] = BLACK;
                    stack.pop();
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_edge_with_two_vertices() {
        let f1 = Space::builder()
            .elements(["u", "v", "e"])
            .pairs([("e", "u"), ("e", "v")])
            .build()
            .unwrap();
        assert_eq!(f1.len(), 3);
        assert_eq!(f1.relation().len(), 2);
        assert!(f1.is_t0());
    }

    #[test]
    fn dangling_pair_is_a_foreign_key_error() {
        let err = Space::builder().elements(["u"]).pair("e", "u").build().unwrap_err();
        assert_eq!(
            err,
            Error::DanglingPair {
                ida: "e".into(),
                idb: "u".into(),
                missing: "e".into()
            }
        );
    }

    #[test]
    fn two_cycle_violates_t0() {
        let err = Space::builder()
            .elements(["a", "b"])
            .pairs([("a", "b"), ("b", "a")])
            .build()
            .unwrap_err();
        match err {
            Error::T0Violation(cycle) => {
                assert_eq!(cycle.len(), 2);
                assert!(cycle.contains(&"a".into()) && cycle.contains(&"b".into()));
            }
            other => panic!("unexpected {other:?}"),
        }
        let lenient = Space::builder()
            .elements(["a", "b"])
            .pairs([("a", "b"), ("b", "a")])
            .t0_check(false)
            .build()
            .unwrap();
        assert!(!lenient.is_t0());
    }

    #[test]
    fn reported_cycle_is_a_real_cycle() {
        let s = Space::builder()
            .elements(["a", "b", "c", "d"])
            .pairs([("d", "a"), ("a", "b"), ("b", "c"), ("c", "a")])
            .t0_check(false)
            .build()
            .unwrap();
        let cycle = s.find_cycle().unwrap();
        for (i, id) in cycle.iter().enumerate() {
            let next = &cycle[(i + 1) % cycle.len()];
            assert!(s.has_pair(id, next), "{id} -> {next}");
        }
    }

    #[test]
    fn reflexive_and_duplicate_rejected() {
        assert!(matches!(
            Space::builder().elements(["a"]).pair("a", "a").build(),
            Err(Error::ReflexivePair(_))
        ));
        assert!(matches!(
            Space::builder().elements(["a", "a"]).build(),
            Err(Error::DuplicateElement(_))
        ));
    }
}
