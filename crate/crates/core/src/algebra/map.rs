use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ops::select_subspace;
use crate::error::{Error, Result};
use crate::topology::{components_by_reach, BoundedByPair, ElementId, Limits, Space};

/// A function between two spaces, possibly undefined on part of its source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceMap {
    source: Space,
    target: Space,
    mapping: BTreeMap<ElementId, ElementId>,
    partial: bool,
}

impl SpaceMap {
    pub fn new<I, A, B>(source: Space, target: Space, mapping: I, partial: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<ElementId>,
        B: Into<ElementId>,
    {
        let mapping: BTreeMap<ElementId, ElementId> = mapping.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        for (x, y) in &mapping {
            if !source.contains(x) {
                return Err(Error::InvalidMap(format!("{x} is not a source element")));
            }
            if !target.contains(y) {
                return Err(Error::InvalidMap(format!("image {y} of {x} is not a target element")));
            }
        }
        if !partial {
            if let Some(x) = source.ids().find(|x| !mapping.contains_key(*x)) {
                return Err(Error::InvalidMap(format!("total map is undefined on {x}")));
            }
        }
        Ok(Self {
            source,
            target,
            mapping,
            partial,
        })
    }

    pub fn total<I, A, B>(source: Space, target: Space, mapping: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<ElementId>,
        B: Into<ElementId>,
    {
        Self::new(source, target, mapping, false)
    }

    pub fn partial<I, A, B>(source: Space, target: Space, mapping: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<ElementId>,
        B: Into<ElementId>,
    {
        Self::new(source, target, mapping, true)
    }

    pub fn identity(space: Space) -> Self {
        let mapping = space.ids().map(|x| (x.clone(), x.clone())).collect();
        Self {
            source: space.clone(),
            target: space,
            mapping,
            partial: false,
        }
    }

    /// Everything onto one target element.
    pub fn constant(source: Space, target: Space, point: &ElementId) -> Result<Self> {
        let mapping: Vec<_> = source.ids().map(|x| (x.clone(), point.clone())).collect();
        Self::total(source, target, mapping)
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn mapping(&self) -> &BTreeMap<ElementId, ElementId> {
        &self.mapping
    }

    pub fn is_partial(&self) -> bool {
        self.partial
    }

    pub fn is_total(&self) -> bool {
        self.mapping.len() == self.source.len()
    }

    pub fn apply(&self, x: &ElementId) -> Option<&ElementId> {
        self.mapping.get(x)
    }

    pub fn domain(&self) -> BTreeSet<ElementId> {
        self.mapping.keys().cloned().collect()
    }

    pub fn image(&self) -> BTreeSet<ElementId> {
        self.mapping.values().cloned().collect()
    }

    pub fn image_of<'a>(&self, set: impl IntoIterator<Item = &'a ElementId>) -> BTreeSet<ElementId> {
        set.into_iter().filter_map(|x| self.mapping.get(x)).cloned().collect()
    }

    pub fn preimage<'a>(&self, set: impl IntoIterator<Item = &'a ElementId>) -> BTreeSet<ElementId> {
        let set: BTreeSet<&ElementId> = set.into_iter().collect();
        self.mapping
            .iter()
            .filter(|(_, y)| set.contains(y))
            .map(|(x, _)| x.clone())
            .collect()
    }

    /// The total map obtained by restricting the source to the subspace on
    /// the domain.
    pub fn restricted(&self) -> Result<SpaceMap> {
        if self.is_total() {
            return Ok(SpaceMap {
                partial: false,
                ..self.clone()
            });
        }
        let source = select_subspace(&self.source, &self.domain())?;
        Ok(SpaceMap {
            source,
            target: self.target.clone(),
            mapping: self.mapping.clone(),
            partial: false,
        })
    }

    pub(crate) fn require_total(&self, what: &str) -> Result<()> {
        if let Some(x) = self.source.ids().find(|x| !self.mapping.contains_key(*x)) {
            return Err(Error::InvalidMap(format!("{what} needs a total map; undefined on {x}")));
        }
        Ok(())
    }
}

/// Outcome of the monotonicity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Monotonicity {
    Monotonic,
    /// `target_set` is connected but its preimage splits into these parts.
    Violated {
        target_set: BTreeSet<ElementId>,
        preimage_components: Vec<BTreeSet<ElementId>>,
    },
    /// Target too large for the exhaustive search; only closures of single
    /// elements were checked and none failed.
    Refused {
        target_size: usize,
        limit: usize,
    },
}

/// Continuity, surjectivity and monotonicity of a [`SpaceMap`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapReport {
    /// A source pair `(x1, x2)` whose images are distinct and not related
    /// in the target preorder.
    pub discontinuity: Option<BoundedByPair>,
    pub missed_targets: BTreeSet<ElementId>,
    pub monotonicity: Monotonicity,
}

impl MapReport {
    pub fn is_continuous(&self) -> bool {
        self.discontinuity.is_none()
    }

    pub fn is_surjective(&self) -> bool {
        self.missed_targets.is_empty()
    }

    /// `None` when the check was refused.
    pub fn is_monotonic(&self) -> Option<bool> {
        match self.monotonicity {
            Monotonicity::Monotonic => Some(true),
            Monotonicity::Violated { .. } => Some(false),
            Monotonicity::Refused { .. } => None,
        }
    }

    /// Continuous and surjective, the requirement on a generalisation.
    pub fn is_generalisation(&self) -> bool {
        self.is_continuous() && self.is_surjective()
    }
}

impl fmt::Display for MapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.discontinuity {
            None => f.write_str("continuous")?,
            Some(p) => write!(f, "not continuous at {p}")?,
        }
        if self.missed_targets.is_empty() {
            f.write_str(", surjective")?;
        } else {
            let missed: Vec<String> = self.missed_targets.iter().map(ToString::to_string).collect();
            write!(f, ", misses {{{}}}", missed.join(", "))?;
        }
        match &self.monotonicity {
            Monotonicity::Monotonic => f.write_str(", monotonic"),
            Monotonicity::Violated { target_set, .. } => {
                let set: Vec<String> = target_set.iter().map(ToString::to_string).collect();
                write!(f, ", not monotonic at {{{}}}", set.join(", "))
            }
            Monotonicity::Refused { target_size, limit } => {
                write!(f, ", monotonicity unchecked ({target_size} target elements > {limit})")
            }
        }
    }
}

pub fn check_map(f: &SpaceMap) -> Result<MapReport> {
    check_map_within(f, &Limits::default())
}

/// Checks a map, restricting a partial map to its domain subspace first.
pub fn check_map_within(f: &SpaceMap, limits: &Limits) -> Result<MapReport> {
    let f = f.restricted()?;
    let source = f.source();
    let target = f.target();
    let ti = target.index();
    let treach = ti.reachability();
    let tpos = |id: &ElementId| ti.pos[id];

    let discontinuity = source
        .relation()
        .iter()
        .find(|p| {
            let (a, b) = (&f.mapping[&p.ida], &f.mapping[&p.idb]);
            a != b && !treach[tpos(a)].contains(tpos(b))
        })
        .cloned();

    let image = f.image();
    let missed_targets = target.ids().filter(|y| !image.contains(*y)).cloned().collect();

    let monotonicity = monotonicity(&f, limits.monotonicity);
    Ok(MapReport {
        discontinuity,
        missed_targets,
        monotonicity,
    })
}

fn monotonicity(f: &SpaceMap, limit: usize) -> Monotonicity {
    let source = f.source();
    let target = f.target();
    let si = source.index();
    let sreach = si.reachability();
    let ti = target.index();
    let treach = ti.reachability();
    let n = ti.len();

    // fibres over each target index, as source indices
    let mut fibres = vec![Vec::new(); n];
    for (x, y) in f.mapping() {
        fibres[ti.pos[y]].push(si.pos[x]);
    }
    let preimage_split = |targets: &[usize]| -> Option<Vec<BTreeSet<ElementId>>> {
        let members: Vec<usize> = targets.iter().flat_map(|&t| fibres[t].iter().copied()).collect();
        let groups = components_by_reach(&members, |k, j| sreach[members[k]].contains(j));
        (groups.len() > 1).then(|| {
            groups
                .into_iter()
                .map(|g| g.into_iter().map(|i| si.ids[i].clone()).collect())
                .collect()
        })
    };
    let violation = |targets: Vec<usize>, parts| Monotonicity::Violated {
        target_set: targets.iter().map(|&t| ti.ids[t].clone()).collect(),
        preimage_components: parts,
    };

    if n <= limit && n < 64 {
        let comparable: Vec<u64> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| treach[i].contains(j) || treach[j].contains(i))
                    .fold(0u64, |m, j| m | 1 << j)
            })
            .collect();
        for set in 1u64..(1u64 << n) {
            if !mask_connected(set, &comparable) {
                continue;
            }
            let targets: Vec<usize> = (0..n).filter(|i| set & (1 << i) != 0).collect();
            if let Some(parts) = preimage_split(&targets) {
                return violation(targets, parts);
            }
        }
        Monotonicity::Monotonic
    } else {
        for t in 0..n {
            let closure: Vec<usize> = treach[t].ones().collect();
            for targets in [vec![t], closure] {
                if let Some(parts) = preimage_split(&targets) {
                    return violation(targets, parts);
                }
            }
        }
        Monotonicity::Refused { target_size: n, limit }
    }
}

fn mask_connected(set: u64, comparable: &[u64]) -> bool {
    let start = set.trailing_zeros() as usize;
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let i = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let next = comparable[i] & set & !seen;
        seen |= next;
        frontier |= next;
    }
    seen == set
}
