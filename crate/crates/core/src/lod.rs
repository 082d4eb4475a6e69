//! Levels of detail linked by generalisation functions.
//!
//! A generalisation `g: X_i → X_{i+1}` is a continuous surjection from a
//! finer to a coarser space. When it is also monotonic, path queries on the
//! fine level can often be answered on the coarse one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::algebra::{check_map, check_map_within, pullback, select_subspace, MapReport, SpaceMap};
use crate::error::{Error, Result};
use crate::spacetime::PointRow;
use crate::storage::VersionStore;
use crate::topology::{BoundedByPair, Element, ElementId, Limits, Space};
use crate::versioning::reconstruct_version;

/// Spaces from fine to coarse and the maps between neighbours.
#[derive(Debug, Clone)]
pub struct LodChain {
    spaces: Vec<Space>,
    gens: Vec<SpaceMap>,
}

impl LodChain {
    pub fn new(spaces: Vec<Space>, gens: Vec<SpaceMap>) -> Result<Self> {
        if spaces.is_empty() || gens.len() + 1 != spaces.len() {
            return Err(Error::InvalidArgument(format!(
                "{} spaces need {} maps, got {}",
                spaces.len(),
                spaces.len().saturating_sub(1),
                gens.len()
            )));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.source() != &spaces[i] || g.target() != &spaces[i + 1] {
                return Err(Error::InvalidMap(format!(
                    "map {i} does not connect levels {i} and {}",
                    i + 1
                )));
            }
            g.require_total("a generalisation")?;
        }
        Ok(Self { spaces, gens })
    }

    /// The chain stored in version `v`: one space per level of detail, with
    /// the maps read off `(gid, glod)`.
    pub fn from_store(store: &VersionStore, v: &str) -> Result<Self> {
        let space = reconstruct_version(store, v)?;
        let lods: Vec<u32> = space
            .ids()
            .map(|x| x.lod)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let levels = lods
            .iter()
            .map(|&l| level_space(&space, l))
            .collect::<Result<Vec<_>>>()?;
        let mut gens = Vec::new();
        for i in 1..levels.len() {
            let mapping: Vec<(ElementId, ElementId)> = levels[i - 1]
                .elements()
                .map(|e| match &e.gen_target {
                    Some(t) => Ok((e.key.clone(), t.clone())),
                    None => Err(Error::InvalidMap(format!("{} has no generalisation target", e.key))),
                })
                .collect::<Result<_>>()?;
            gens.push(SpaceMap::total(levels[i - 1].clone(), levels[i].clone(), mapping)?);
        }
        Self::new(levels, gens)
    }

    pub fn spaces(&self) -> &[Space] {
        &self.spaces
    }

    pub fn gens(&self) -> &[SpaceMap] {
        &self.gens
    }

    /// Index of the level containing `x`.
    pub fn level_of(&self, x: &ElementId) -> Option<usize> {
        self.spaces.iter().position(|s| s.contains(x))
    }
}

/// The elements of one level of detail.
pub fn level_space(space: &Space, lod: u32) -> Result<Space> {
    let ids: Vec<ElementId> = space.ids().filter(|x| x.lod == lod).cloned().collect();
    select_subspace(space, &ids)
}

/// One report per map. The chain is valid iff every map is continuous and
/// surjective; monotonicity is reported separately.
pub fn validate_chain(chain: &LodChain) -> Result<Vec<MapReport>> {
    chain.gens.iter().map(check_map).collect()
}

/// Which step of the filtered query settled the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// No path between the images in the generalised region.
    CoarseNo,
    /// Path on the coarse level and the region is a full preimage.
    PreimageContained,
    /// Fell back to the query on the fine level.
    DirectQuery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathOutcome {
    pub answer: bool,
    pub decided_by: Decision,
}

impl fmt::Display for PathOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let answer = if self.answer { "yes" } else { "no" };
        write!(f, "{answer} ({:?})", self.decided_by)
    }
}

/// Whether `a` and `b` lie in one connected component of the subspace on
/// `region`.
pub fn direct_path<'a>(
    space: &Space,
    region: impl IntoIterator<Item = &'a ElementId>,
    a: &ElementId,
    b: &ElementId,
) -> Result<bool> {
    let region: BTreeSet<&ElementId> = region.into_iter().collect();
    for x in [a, b] {
        if !region.contains(x) {
            return Err(Error::OutsideRegion(x.clone()));
        }
    }
    let components = space.components_of(region)?;
    Ok(components.iter().any(|c| c.contains(a) && c.contains(b)))
}

/// Path query inside `region` accelerated by a monotonic generalisation `g`.
///
/// Asks the coarse level first. A coarse "no" is final because `g` is
/// continuous; a coarse "yes" is final when `region` contains the whole
/// preimage of its image, because `g` is monotonic. Otherwise the fine level
/// is queried directly.
pub fn monotone_path_query(
    g: &SpaceMap,
    region: &BTreeSet<ElementId>,
    a: &ElementId,
    b: &ElementId,
) -> Result<PathOutcome> {
    for x in [a, b] {
        if !region.contains(x) {
            return Err(Error::OutsideRegion(x.clone()));
        }
    }
    g.source().ensure_known(region)?;
    if let Some(x) = region.iter().find(|x| g.apply(x).is_none()) {
        return Err(Error::InvalidMap(format!("generalisation undefined on {x}")));
    }
    let image = g.image_of(region);
    let (ga, gb) = (g.apply(a).expect("checked"), g.apply(b).expect("checked"));
    if !direct_path(g.target(), &image, ga, gb)? {
        return Ok(PathOutcome {
            answer: false,
            decided_by: Decision::CoarseNo,
        });
    }
    if g.preimage(&image).is_subset(region) {
        return Ok(PathOutcome {
            answer: true,
            decided_by: Decision::PreimageContained,
        });
    }
    Ok(PathOutcome {
        answer: direct_path(g.source(), region, a, b)?,
        decided_by: Decision::DirectQuery,
    })
}

/// Position along the trajectory from an element to its generalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolated {
    /// `x, y, z, t` and the level coordinate.
    pub coords: [f64; 5],
    /// Level whose topology holds at this parameter.
    pub level: usize,
}

/// Linear path from the representative of `x` (level `i`) at `s = 0` to that
/// of `g_i(x)` at `s = 1`. The topology stays that of level `i` until `s`
/// reaches 1.
pub fn interpolate(chain: &LodChain, points: &[PointRow], x: &ElementId, s: f64) -> Result<Interpolated> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "interpolation parameter {s} outside [0, 1]"
        )));
    }
    let i = chain.level_of(x).ok_or_else(|| Error::NotFound(x.clone()))?;
    let g = chain
        .gens
        .get(i)
        .ok_or_else(|| Error::InvalidArgument(format!("{x} is on the coarsest level")))?;
    let gx = g.apply(x).expect("generalisations are total");
    let rep = |y: &ElementId, level: usize| -> Result<[f64; 5]> {
        let p = points
            .iter()
            .find(|p| &p.pid == y)
            .ok_or_else(|| Error::MissingGeometry(y.clone()))?;
        Ok([p.x, p.y, p.z, p.t, level as f64])
    };
    let (from, to) = (rep(x, i)?, rep(gx, i + 1)?);
    let mut coords = [0.0; 5];
    for k in 0..5 {
        coords[k] = if s == 1.0 {
            to[k]
        } else {
            from[k] + s * (to[k] - from[k])
        };
    }
    Ok(Interpolated {
        coords,
        level: if s < 1.0 { i } else { i + 1 },
    })
}

/// Id of the node `(a, b)` of the edge graph.
pub fn lod_node(a: u32, b: u32) -> ElementId {
    ElementId::new(format!("({a},{b})"))
}

/// The levels of version `v` with their generalisation links, and the edge
/// graph: a vertex `(a,a)` per level and an edge `(a,b)` per link, bounded by
/// its two endpoints.
pub fn lod_graph(store: &VersionStore, v: &str) -> Result<(Space, Space)> {
    let space = reconstruct_version(store, v)?;
    let mut levels = BTreeSet::new();
    let mut links = BTreeSet::new();
    for e in space.elements() {
        levels.insert(e.key.lod);
        if let Some(t) = &e.gen_target {
            levels.insert(t.lod);
            if t.lod != e.key.lod {
                links.insert((e.key.lod, t.lod));
            }
        }
    }
    let level_id = |l: u32| ElementId::new(l.to_string());
    let lod_space = Space::new(
        levels.iter().map(|&l| Element::new(level_id(l))),
        links.iter().map(|&(a, b)| BoundedByPair::new(level_id(a), level_id(b))),
        true,
    )?;
    let mut nodes: Vec<Element> = levels.iter().map(|&l| Element::new(lod_node(l, l))).collect();
    let mut pairs = Vec::new();
    for &(a, b) in &links {
        nodes.push(Element::new(lod_node(a, b)));
        pairs.push(BoundedByPair::new(lod_node(a, b), lod_node(a, a)));
        pairs.push(BoundedByPair::new(lod_node(a, b), lod_node(b, b)));
    }
    Ok((lod_space, Space::new(nodes, pairs, true)?))
}

/// How elements are matched to edge-graph nodes in the telescope.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TelescopeJoin {
    /// Level `i` pairs with the vertex `(i,i)` and with every edge `(i,j)`.
    #[default]
    VertexAndEdge,
    /// Level `i` pairs with the vertex `(i,i)` only.
    VertexOnly,
}

/// Combinatorial mapping telescope of version `v`.
///
/// The version's relation is extended by the graph of the generalisation
/// function and joined with the edge graph on the level. With the default
/// join every non-coarsest level appears twice: over its vertex and over the
/// edge to the next level, where it is glued to the coarser level.
pub fn telescope(store: &VersionStore, v: &str, join: TelescopeJoin) -> Result<Space> {
    let space = reconstruct_version(store, v)?;
    for report in generalisation_reports(
        &space,
        &Limits {
            monotonicity: 0,
            ..Limits::default()
        },
    )? {
        if !report.1.is_generalisation() {
            return Err(Error::RejectedMap(Box::new(report.1)));
        }
    }
    let mut pairs: BTreeSet<BoundedByPair> = space.relation().clone();
    for e in space.elements() {
        if let Some(t) = &e.gen_target {
            pairs.insert(BoundedByPair {
                ida: e.key.clone(),
                idb: t.clone(),
            });
        }
    }
    let augmented = Space::new(space.elements().cloned(), pairs, true)?;
    let (_, edges) = lod_graph(store, v)?;

    let levels: BTreeSet<u32> = space.ids().map(|x| x.lod).collect();
    let unmatched = ElementId::new("-");
    let base = Space::new(
        levels
            .iter()
            .map(|l| Element::new(l.to_string()))
            .chain([Element::new(unmatched.clone())]),
        Vec::<BoundedByPair>::new(),
        true,
    )?;
    let by_level = SpaceMap::total(
        augmented.clone(),
        base.clone(),
        augmented.ids().map(|x| (x.clone(), ElementId::new(x.lod.to_string()))),
    )?;
    let node_level = |node: &ElementId| -> ElementId {
        let inner = node.id.trim_start_matches('(').trim_end_matches(')');
        let (a, b) = inner.split_once(',').expect("edge graph ids are (a,b)");
        if a == b || join == TelescopeJoin::VertexAndEdge {
            ElementId::new(a)
        } else {
            unmatched.clone()
        }
    };
    let by_first = SpaceMap::total(edges.clone(), base, edges.ids().map(|w| (w.clone(), node_level(w))))?;
    pullback(&by_level, &by_first)
}

/// The map each element's `(gid, glod)` defines, per pair of levels, with
/// its report. The source is every element of the level, the domain those
/// pointing into the target level.
pub fn generalisation_reports(space: &Space, limits: &Limits) -> Result<Vec<((u32, u32), MapReport)>> {
    let mut groups: BTreeMap<(u32, u32), Vec<(ElementId, ElementId)>> = BTreeMap::new();
    for e in space.elements() {
        if let Some(t) = &e.gen_target {
            groups
                .entry((e.key.lod, t.lod))
                .or_default()
                .push((e.key.clone(), t.clone()));
        }
    }
    let mut out = Vec::new();
    for ((from, to), mapping) in groups {
        let source = level_space(space, from)?;
        let target = level_space(space, to)?;
        let map = SpaceMap::partial(source, target, mapping)?;
        out.push(((from, to), check_map_within(&map, limits)?));
    }
    Ok(out)
}
