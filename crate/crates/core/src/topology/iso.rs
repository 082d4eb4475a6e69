use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use super::element::ElementId;
use super::space::Space;

/// A bijection between the element sets that preserves and reflects the
/// preorder, if one exists. For finite Alexandrov spaces this is exactly a
/// homeomorphism.
pub fn homeomorphism(a: &Space, b: &Space) -> Option<BTreeMap<ElementId, ElementId>> {
    if a.len() != b.len() {
        return None;
    }
    let ia = a.index();
    let ib = b.index();
    let ra = ia.reachability();
    let rb = ib.reachability();
    let sig = |reach: &[FixedBitSet], i: usize| -> (usize, usize) {
        let down = reach[i].count_ones(..);
        let up = reach.iter().filter(|row| row.contains(i)).count();
        (down, up)
    };
    let sa: Vec<_> = (0..ia.len()).map(|i| sig(&ra, i)).collect();
    let sb: Vec<_> = (0..ib.len()).map(|i| sig(&rb, i)).collect();
    let mut ka = sa.clone();
    let mut kb = sb.clone();
    ka.sort_unstable();
    kb.sort_unstable();
    if ka != kb {
        return None;
    }
    // most constrained elements first
    let mut order: Vec<usize> = (0..ia.len()).collect();
    order.sort_by_key(|&i| {
        let count = sa.iter().filter(|s| **s == sa[i]).count();
        (count, std::cmp::Reverse(sa[i].0 + sa[i].1))
    });
    let mut image = vec![usize::MAX; ia.len()];
    let mut used = vec![false; ib.len()];
    if extend(0, &order, &sa, &sb, &ra, &rb, &mut image, &mut used) {
        Some(
            (0..ia.len())
                .map(|i| (ia.ids[i].clone(), ib.ids[image[i]].clone()))
                .collect(),
        )
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    depth: usize,
    order: &[usize],
    sa: &[(usize, usize)],
    sb: &[(usize, usize)],
    ra: &[FixedBitSet],
    rb: &[FixedBitSet],
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&x) = order.get(depth) else {
        return true;
    };
    for y in 0..sb.len() {
        if used[y] || sb[y] != sa[x] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&p| {
            let q = image[p];
            ra[x].contains(p) == rb[y].contains(q) && ra[p].contains(x) == rb[q].contains(y)
        });
        if !consistent {
            continue;
        }
        image[x] = y;
        used[y] = true;
        if extend(depth + 1, order, sa, sb, ra, rb, image, used) {
            return true;
        }
        used[y] = false;
        image[x] = usize::MAX;
    }
    false
}

pub fn is_homeomorphic(a: &Space, b: &Space) -> bool {
    homeomorphism(a, b).is_some()
}
