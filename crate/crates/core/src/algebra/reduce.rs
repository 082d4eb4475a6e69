use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::topology::{BoundedByPair, ElementId, Indexed};

/// Codd's `OPEN`: the minimal relation with the same transitive closure as
/// the input.
///
/// Reflexive pairs are dropped first. On a DAG the answer is the unique
/// transitive reduction; cyclic input is refused with the offending cycle.
pub fn open_reduction<'a, I>(pairs: I) -> Result<BTreeSet<BoundedByPair>>
where
    I: IntoIterator<Item = &'a BoundedByPair>,
{
    let pairs: BTreeSet<&BoundedByPair> = pairs.into_iter().filter(|p| p.ida != p.idb).collect();
    let ids: BTreeSet<&ElementId> = pairs.iter().flat_map(|p| [&p.ida, &p.idb]).collect();
    let index = Indexed::new(ids, pairs.iter().copied());
    let order = index
        .topo_order()
        .map_err(|cycle| Error::T0Violation(cycle.into_iter().map(|i| index.ids[i].clone()).collect()))?;

    // strict[a]: everything reachable from a in one or more steps
    let n = index.len();
    let mut strict = vec![FixedBitSet::with_capacity(n); n];
    let mut out = BTreeSet::new();
    for &a in order.iter().rev() {
        let mut row = FixedBitSet::with_capacity(n);
        let mut indirect = FixedBitSet::with_capacity(n);
        for &c in &index.succ[a] {
            row.insert(c);
            row.union_with(&strict[c]);
            indirect.union_with(&strict[c]);
        }
        for &b in &index.succ[a] {
            if !indirect.contains(b) {
                out.insert(BoundedByPair {
                    ida: index.ids[a].clone(),
                    idb: index.ids[b].clone(),
                });
            }
        }
        strict[a] = row;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(pairs: &[(&str, &str)]) -> BTreeSet<BoundedByPair> {
        pairs.iter().map(|(a, b)| BoundedByPair::new(*a, *b)).collect()
    }

    #[test]
    fn drops_the_shortcut() {
        // the only subsets of {ab, bc, ac} with closure {ab, bc, ac} are
        // {ab, bc} and the full set; {ab, bc} is the minimal one
        let input = rel(&[("a", "b"), ("b", "c"), ("a", "c")]);
        assert_eq!(open_reduction(&input).unwrap(), rel(&[("a", "b"), ("b", "c")]));
    }

    #[test]
    fn trivial_inputs() {
        assert!(open_reduction(&rel(&[])).unwrap().is_empty());
        assert_eq!(open_reduction(&rel(&[("a", "b")])).unwrap(), rel(&[("a", "b")]));
        assert_eq!(
            open_reduction(&rel(&[("a", "a"), ("a", "b")])).unwrap(),
            rel(&[("a", "b")])
        );
    }

    #[test]
    fn cyclic_input_is_refused() {
        let err = open_reduction(&rel(&[("a", "b"), ("b", "c"), ("c", "a")])).unwrap_err();
        assert!(matches!(err, Error::T0Violation(c) if c.len() == 3));
    }
}
