//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use alexdb_core::algebra::{quotient, SpaceMap};
use alexdb_core::spacetime::PointRow;
use alexdb_core::storage::VersionStore;
use alexdb_core::versioning::ChangeSet;
use alexdb_core::{BoundedByPair, Element, ElementId, Scalar, Space};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn name(i: usize) -> ElementId {
    ElementId::new(format!("x{i}"))
}

/// Random DAG on `n` points: a hidden order, each forward pair kept with
/// probability `p`.
pub fn random_dag(rng: &mut Rng8, n: usize, p: f64) -> Space {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                pairs.push((name(order[i]), name(order[j])));
            }
        }
    }
    Space::builder()
        .elements((0..n).map(name))
        .pairs(pairs)
        .build()
        .unwrap()
}

pub fn random_space(rng: &mut Rng8, max: usize) -> Space {
    let n = rng.gen_range(0..=max);
    let p = rng.gen_range(0.1..0.6);
    random_dag(rng, n, p)
}

pub fn random_subset(rng: &mut Rng8, space: &Space) -> BTreeSet<ElementId> {
    space.ids().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// Dense reachability matrix by Floyd–Warshall, over `ids` in order.
pub fn reach_matrix(ids: &[ElementId], pairs: &BTreeSet<BoundedByPair>) -> Vec<Vec<bool>> {
    let n = ids.len();
    let pos: BTreeMap<&ElementId, usize> = ids.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    for p in pairs {
        m[pos[&p.ida]][pos[&p.idb]] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    m
}

/// Reflexive-transitive closure as a set of pairs.
pub fn closure_pairs(ids: &[ElementId], pairs: &BTreeSet<BoundedByPair>) -> BTreeSet<(ElementId, ElementId)> {
    let m = reach_matrix(ids, pairs);
    let mut out = BTreeSet::new();
    for i in 0..ids.len() {
        for j in 0..ids.len() {
            if m[i][j] {
                out.insert((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    out
}

/// All open sets straight from the definition, independent of the library.
pub fn brute_open_sets(space: &Space) -> Vec<BTreeSet<ElementId>> {
    let ids: Vec<ElementId> = space.ids().cloned().collect();
    let n = ids.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let set: BTreeSet<&ElementId> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &ids[i]).collect();
        if space
            .relation()
            .iter()
            .all(|p| !set.contains(&p.idb) || set.contains(&p.ida))
        {
            out.push(set.into_iter().cloned().collect());
        }
    }
    out
}

/// Smallest open superset, as an intersection of opens.
pub fn oracle_star(
    opens: &[BTreeSet<ElementId>],
    all: &BTreeSet<ElementId>,
    a: &BTreeSet<ElementId>,
) -> BTreeSet<ElementId> {
    opens
        .iter()
        .filter(|o| a.is_subset(o))
        .fold(all.clone(), |acc, o| acc.intersection(o).cloned().collect())
}

/// Smallest closed superset, as an intersection of complements of opens.
pub fn oracle_closure(
    opens: &[BTreeSet<ElementId>],
    all: &BTreeSet<ElementId>,
    a: &BTreeSet<ElementId>,
) -> BTreeSet<ElementId> {
    opens
        .iter()
        .map(|o| all.difference(o).cloned().collect::<BTreeSet<_>>())
        .filter(|c| a.is_subset(c))
        .fold(all.clone(), |acc, c| acc.intersection(&c).cloned().collect())
}

/// Relative opens `O ∩ S`.
pub fn relative_opens(opens: &[BTreeSet<ElementId>], s: &BTreeSet<ElementId>) -> BTreeSet<BTreeSet<ElementId>> {
    opens.iter().map(|o| o.intersection(s).cloned().collect()).collect()
}

/// `S` is connected iff no non-trivial subset is open and closed in `S`.
pub fn oracle_connected(opens: &[BTreeSet<ElementId>], s: &BTreeSet<ElementId>) -> bool {
    let rel = relative_opens(opens, s);
    !rel.iter().any(|u| {
        if u.is_empty() || u == s {
            return false;
        }
        let rest: BTreeSet<ElementId> = s.difference(u).cloned().collect();
        rel.contains(&rest)
    })
}

/// Longest strict chain, by trying every path of the preorder.
pub fn oracle_dimension(space: &Space) -> usize {
    let ids: Vec<ElementId> = space.ids().cloned().collect();
    let m = reach_matrix(&ids, space.relation());
    fn longest(m: &[Vec<bool>], i: usize, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(d) = memo[i] {
            return d;
        }
        let mut best = 0;
        for j in 0..m.len() {
            if j != i && m[i][j] {
                best = best.max(1 + longest(m, j, memo));
            }
        }
        memo[i] = Some(best);
        best
    }
    let mut memo = vec![None; ids.len()];
    (0..ids.len()).map(|i| longest(&m, i, &mut memo)).max().unwrap_or(0)
}

/// Continuity as "preimages of opens are open".
pub fn oracle_continuous(f: &SpaceMap) -> bool {
    let src = f.source();
    brute_open_sets(f.target()).iter().all(|o| {
        let pre: BTreeSet<ElementId> = f
            .mapping()
            .iter()
            .filter(|(_, y)| o.contains(*y))
            .map(|(x, _)| x.clone())
            .collect();
        src.relation()
            .iter()
            .all(|p| !pre.contains(&p.idb) || pre.contains(&p.ida))
    })
}

/// Random total map by choosing an image per element.
pub fn random_map(rng: &mut Rng8, source: &Space, target: &Space) -> SpaceMap {
    let tids: Vec<ElementId> = target.ids().cloned().collect();
    let mapping: Vec<(ElementId, ElementId)> = source
        .ids()
        .map(|x| (x.clone(), tids.choose(rng).unwrap().clone()))
        .collect();
    SpaceMap::total(source.clone(), target.clone(), mapping).unwrap()
}

/// Random generalisation by collapsing random connected groups. Returns
/// `None` when the collapse is not T0.
pub fn random_collapse(rng: &mut Rng8, fine: &Space) -> Option<SpaceMap> {
    let mut unassigned: BTreeSet<ElementId> = fine.id_set();
    let mut classes: Vec<BTreeSet<ElementId>> = Vec::new();
    while let Some(start) = unassigned.iter().next().cloned() {
        unassigned.remove(&start);
        let mut class: BTreeSet<ElementId> = [start].into_iter().collect();
        // grow along pairs so each class is connected
        let target_size = rng.gen_range(1..=3);
        while class.len() < target_size {
            let frontier: Vec<ElementId> = fine
                .relation()
                .iter()
                .filter_map(|p| match (class.contains(&p.ida), class.contains(&p.idb)) {
                    (true, false) => Some(p.idb.clone()),
                    (false, true) => Some(p.ida.clone()),
                    _ => None,
                })
                .filter(|x| unassigned.contains(x))
                .collect();
            let Some(next) = frontier.choose(rng).cloned() else {
                break;
            };
            unassigned.remove(&next);
            class.insert(next);
        }
        classes.push(class);
    }
    let coarse = quotient(fine, &classes).ok()?;
    let mapping: Vec<(ElementId, ElementId)> = classes
        .iter()
        .flat_map(|c| {
            let rep = c.first().unwrap().clone();
            c.iter().map(move |x| (x.clone(), rep.clone()))
        })
        .collect();
    Some(SpaceMap::total(fine.clone(), coarse, mapping).unwrap())
}

/// Connectivity of `a` and `b` in the subspace on `region`, by BFS over
/// comparability from the oracle matrix.
pub fn oracle_path(space: &Space, region: &BTreeSet<ElementId>, a: &ElementId, b: &ElementId) -> bool {
    let ids: Vec<ElementId> = space.ids().cloned().collect();
    let m = reach_matrix(&ids, space.relation());
    let pos = |x: &ElementId| ids.iter().position(|y| y == x).unwrap();
    let members: Vec<usize> = region.iter().map(pos).collect();
    let mut seen = BTreeSet::from([pos(a)]);
    let mut stack = vec![pos(a)];
    while let Some(i) = stack.pop() {
        for &j in &members {
            if (m[i][j] || m[j][i]) && seen.insert(j) {
                stack.push(j);
            }
        }
    }
    seen.contains(&pos(b))
}

pub fn random_scalar(rng: &mut Rng8) -> Scalar {
    match rng.gen_range(0..6) {
        0 => Scalar::Int(rng.gen()),
        1 => Scalar::Float(rng.gen::<f64>() * 10f64.powi(rng.gen_range(-30..30))),
        2 => Scalar::Float(-(rng.gen_range(0..1000) as f64)),
        3 => Scalar::from(["42", "1.5", "'q", "inf", "", "a,b", "line\nbreak", "\"x\""][rng.gen_range(0..8)]),
        _ => Scalar::from(format!("s{}", rng.gen_range(0..100))),
    }
}

/// Random versioned store: a random initial space with attributes and
/// points, then a few random commits.
pub fn random_store(rng: &mut Rng8) -> VersionStore {
    let base = random_space(rng, 8);
    let elements: Vec<Element> = base
        .elements()
        .map(|e| {
            let mut e = e.clone();
            for k in 0..rng.gen_range(0..3) {
                e = e.with_attr(format!("a{k}"), random_scalar(rng));
            }
            e
        })
        .collect();
    let base = Space::new(elements, base.relation().clone(), true).unwrap();
    let mut store = VersionStore::initial("v0", &base);
    for x in base.ids() {
        if rng.gen_bool(0.5) {
            let coords: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>() * 100.0 - 50.0);
            let [px, py, pz, pt] = coords;
            store.points.insert(x.clone(), PointRow::new(x.clone(), px, py, pz, pt));
        }
    }
    let mut fresh = 100;
    for k in 1..=rng.gen_range(0..4) {
        let versions: Vec<String> = store.vx.iter().cloned().collect();
        let parent = versions.choose(rng).unwrap().clone();
        let Ok(current) = alexdb_core::versioning::reconstruct_version(&store, &parent) else {
            continue;
        };
        let mut cs = ChangeSet::new(format!("v{k}"));
        let ids: Vec<ElementId> = current.ids().cloned().collect();
        if let Some(x) = ids.choose(rng) {
            if rng.gen_bool(0.5) {
                cs = cs.remove_element(x.clone());
            }
        }
        let new = ElementId::new(format!("n{fresh}"));
        fresh += 1;
        cs = cs.add_element(Element::new(new.clone()).with_attr("k", random_scalar(rng)));
        if let Some(x) = ids
            .iter()
            .filter(|x| !cs.remove_elements.contains(*x))
            .collect::<Vec<_>>()
            .choose(rng)
        {
            cs = cs.add_pair(new, (*x).clone());
        }
        let _ = store.commit(&[&parent], &cs);
    }
    store
}

/// Every directed path of a DAG, as vertex sequences (length ≥ 1).
pub fn all_paths(ids: &[ElementId], pairs: &BTreeSet<BoundedByPair>) -> Vec<Vec<ElementId>> {
    let mut succ: BTreeMap<&ElementId, Vec<&ElementId>> = BTreeMap::new();
    for p in pairs {
        succ.entry(&p.ida).or_default().push(&p.idb);
    }
    let mut out = Vec::new();
    fn walk<'a>(
        at: &'a ElementId,
        path: &mut Vec<ElementId>,
        succ: &BTreeMap<&'a ElementId, Vec<&'a ElementId>>,
        out: &mut Vec<Vec<ElementId>>,
    ) {
        path.push(at.clone());
        out.push(path.clone());
        if let Some(next) = succ.get(at) {
            for n in next {
                walk(n, path, succ, out);
            }
        }
        path.pop();
    }
    for x in ids {
        walk(x, &mut Vec::new(), &succ, &mut out);
    }
    out
}
