use super::element::ElementId;
use super::space::{Indexed, Space};
use crate::error::{Error, Result};

impl Space {
    /// Combinatorial (Krull) dimension: the number of strict steps in the
    /// longest chain of the preorder.
    pub fn krull_dimension(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptySpace);
        }
        let index = self.index();
        Ok(heights(self, &index)?.into_iter().max().unwrap_or(0))
    }

    /// Length of the longest chain descending from `x` along the relation.
    pub fn element_dimension(&self, x: &ElementId) -> Result<usize> {
        let index = self.index();
        let i = index.position(x)?;
        Ok(heights(self, &index)?[i])
    }
}

fn heights(space: &Space, index: &Indexed<'_>) -> Result<Vec<usize>> {
    let order = index
        .topo_order()
        .map_err(|cycle| Error::DimensionUndefined(cycle.into_iter().map(|i| index.ids[i].clone()).collect()))?;
    debug_assert_eq!(order.len(), space.len());
    let mut height = vec![0usize; index.len()];
    for &i in order.iter().rev() {
        height[i] = index.succ[i].iter().map(|&j| height[j] + 1).max().unwrap_or(0);
    }
    Ok(height)
}
