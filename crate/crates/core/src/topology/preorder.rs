use std::collections::BTreeSet;

use super::element::ElementId;
use super::space::Space;
use crate::error::Result;

/// Reflexive-transitive closure `R*` of a bounded-by relation.
///
/// `(a, b)` is contained iff `b` lies in the closure of `a`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Preorder {
    pairs: BTreeSet<(ElementId, ElementId)>,
}

impl Preorder {
    pub fn contains(&self, a: &ElementId, b: &ElementId) -> bool {
        // BTreeSet lookup needs owned tuples
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn pairs(&self) -> &BTreeSet<(ElementId, ElementId)> {
        &self.pairs
    }

    pub fn strict_pairs(&self) -> impl Iterator<Item = &(ElementId, ElementId)> + '_ {
        self.pairs.iter().filter(|(a, b)| a != b)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl Space {
    pub fn preorder(&self) -> Preorder {
        let index = self.index();
        let mut pairs = BTreeSet::new();
        for (i, row) in index.reachability().into_iter().enumerate() {
            for j in row.ones() {
                pairs.insert((index.ids[i].clone(), index.ids[j].clone()));
            }
        }
        Preorder { pairs }
    }

    /// `cl(A)`: everything some element of `A` is (indirectly) bounded by,
    /// including `A` itself. The smallest closed superset of `A`.
    pub fn closure<'a>(&self, a_set: impl IntoIterator<Item = &'a ElementId>) -> Result<BTreeSet<ElementId>> {
        self.reach_set(a_set, true)
    }

    /// `U_A`: everything that is (indirectly) bounded by some element of `A`,
    /// including `A` itself. The smallest open superset of `A`.
    pub fn star<'a>(&self, a_set: impl IntoIterator<Item = &'a ElementId>) -> Result<BTreeSet<ElementId>> {
        self.reach_set(a_set, false)
    }

    fn reach_set<'a>(
        &self,
        a_set: impl IntoIterator<Item = &'a ElementId>,
        forward: bool,
    ) -> Result<BTreeSet<ElementId>> {
        let index = self.index();
        let starts = a_set
            .into_iter()
            .map(|id| index.position(id))
            .collect::<Result<Vec<_>>>()?;
        Ok(index
            .reach(starts, forward)
            .ones()
            .map(|i| index.ids[i].clone())
            .collect())
    }

    /// Whether `a_set` is open in the topology generated by the relation.
    pub fn is_open<'a>(&self, a_set: impl IntoIterator<Item = &'a ElementId>) -> Result<bool> {
        let set: BTreeSet<&ElementId> = a_set.into_iter().collect();
        self.ensure_known(set.iter().copied())?;
        Ok(self
            .relation()
            .iter()
            .all(|p| !set.contains(&p.idb) || set.contains(&p.ida)))
    }
}
