use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::element::ElementId;
use super::space::Space;
use crate::error::Result;

/// Kind of a cell, read off the bounded-by relation alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    /// Not bounded by anything.
    Vertex,
    /// Non-empty boundary consisting only of vertices.
    Edge,
    Higher,
}

impl Space {
    pub fn classify(&self, x: &ElementId) -> Result<CellKind> {
        let index = self.index();
        let i = index.position(x)?;
        if index.succ[i].is_empty() {
            return Ok(CellKind::Vertex);
        }
        let mut below = index.reach([i], true);
        below.set(i, false);
        if below.ones().all(|j| index.succ[j].is_empty()) {
            Ok(CellKind::Edge)
        } else {
            Ok(CellKind::Higher)
        }
    }

    /// Connected components of the whole space.
    pub fn connected_components(&self) -> Vec<BTreeSet<ElementId>> {
        let all: Vec<ElementId> = self.ids().cloned().collect();
        self.components_of(&all).expect("own ids are known")
    }

    /// Connected components of the subspace on `a_set`.
    ///
    /// Two members are adjacent when they are comparable in the preorder, so
    /// indirect boundary relations through elements outside the set count.
    pub fn components_of<'a>(
        &self,
        a_set: impl IntoIterator<Item = &'a ElementId>,
    ) -> Result<Vec<BTreeSet<ElementId>>> {
        let index = self.index();
        let members: BTreeSet<usize> = a_set.into_iter().map(|id| index.position(id)).collect::<Result<_>>()?;
        let members: Vec<usize> = members.into_iter().collect();
        let reach: Vec<FixedBitSet> = members.iter().map(|&m| index.reach([m], true)).collect();
        let groups = components_by_reach(&members, |k, j| reach[k].contains(j));
        Ok(groups
            .into_iter()
            .map(|g| g.into_iter().map(|i| index.ids[i].clone()).collect())
            .collect())
    }

    /// The empty set counts as connected.
    pub fn is_connected<'a>(&self, a_set: impl IntoIterator<Item = &'a ElementId>) -> Result<bool> {
        Ok(self.components_of(a_set)?.len() <= 1)
    }
}

/// Groups `members` (dense indices) into comparability components.
/// `reaches(k, j)` answers whether `members[k]` reaches index `j`.
pub(crate) fn components_by_reach(members: &[usize], reaches: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let n = members.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for k in 0..n {
        for l in 0..n {
            if k != l && reaches(k, members[l]) {
                let (a, b) = (find(&mut parent, k), find(&mut parent, l));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for k in 0..n {
        let root = find(&mut parent, k);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(members[k]);
    }
    groups
}
