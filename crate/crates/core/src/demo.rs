//! Small worked examples: text versions, the Lineland house, a two-level map
//! generalisation. Used by the tests and by `alexdb demo`.

use std::collections::BTreeSet;
use std::path::Path;

use crate::algebra::{quotient, SpaceMap};
use crate::error::{Error, Result};
use crate::lod::LodChain;
use crate::spacetime::{at_time, attach_change, AttachmentSpec, PointRow};
use crate::storage::{save, VersionStore};
use crate::topology::{Element, ElementId, Scalar, Space};
use crate::versioning::{ChangeSet, ConsistencyRule, LinearDag};

/// A word as a space: character `i` has id `i` (from 1) and is bounded by
/// its successor.
pub fn text_space(word: &str) -> Space {
    let n = word.chars().count();
    Space::builder()
        .elements(
            word.chars()
                .enumerate()
                .map(|(i, c)| Element::new((i + 1).to_string()).with_attr("letter", c.to_string())),
        )
        .pairs((1..n).map(|i| (i.to_string(), (i + 1).to_string())))
        .build()
        .expect("a chain is T0")
}

/// Reads the letters along a linear space.
pub fn read_text(space: &Space) -> Result<String> {
    if !LinearDag.check(space).is_empty() {
        return Err(Error::InvalidArgument("space is not a linear DAG".into()));
    }
    let targets: BTreeSet<&ElementId> = space.relation().iter().map(|p| &p.idb).collect();
    let mut at = space.ids().find(|x| !targets.contains(x)).cloned();
    let mut text = String::new();
    while let Some(x) = at {
        match space.element(&x).and_then(|e| e.attributes.get("letter")) {
            Some(Scalar::Str(s)) => text.push_str(s),
            _ => return Err(Error::InvalidArgument(format!("{x} carries no letter"))),
        }
        at = space.relation().iter().find(|p| p.ida == x).map(|p| p.idb.clone());
    }
    Ok(text)
}

/// "hello" as `v0`, edited to "help" in `v1` and independently to "halo" in
/// `v2`.
pub fn text_store() -> VersionStore {
    let mut store = VersionStore::initial("v0", &text_space("hello"));
    let help = ChangeSet::new("v1")
        .remove_element("4")
        .remove_element("5")
        .add_element(Element::new("6").with_attr("letter", "p"))
        .add_pair("3", "6");
    let halo = ChangeSet::new("v2")
        .remove_element("2")
        .remove_element("4")
        .remove_pair("1", "3")
        .add_element(Element::new("7").with_attr("letter", "a"))
        .add_pair("1", "7")
        .add_pair("7", "3");
    store.commit(&["v0"], &help).expect("valid edit");
    store.commit(&["v0"], &halo).expect("valid edit");
    store
}

/// One face `A` between walls `wl` and `wr` of a 1D house.
pub fn house() -> Space {
    Space::builder()
        .elements(["wl", "I", "wr"])
        .pairs([("I", "wl"), ("I", "wr")])
        .build()
        .expect("valid")
}

/// The house after the extension: the new room `J` spans `wl` to `wrr`.
pub fn extended_house() -> Space {
    Space::builder()
        .elements(["wl", "J", "wrr"])
        .pairs([("J", "wl"), ("J", "wrr")])
        .build()
        .expect("valid")
}

/// What is built at `t1`: the old room and wall, the extension `X` and the
/// new outer wall.
pub fn lineland_overlay() -> Space {
    Space::builder()
        .elements(["wl", "I", "wr", "X", "wrr"])
        .pairs([("I", "wl"), ("I", "wr"), ("X", "wr"), ("X", "wrr")])
        .build()
        .expect("valid")
}

pub fn lineland_attachment() -> AttachmentSpec {
    let overlay = lineland_overlay();
    let past = SpaceMap::partial(overlay.clone(), house(), [("wl", "wl"), ("I", "I"), ("wr", "wr")]).expect("valid");
    let future = SpaceMap::total(
        overlay,
        extended_house(),
        [("wl", "wl"), ("I", "J"), ("wr", "J"), ("X", "J"), ("wrr", "wrr")],
    )
    .expect("valid");
    AttachmentSpec::new(past, future)
        .spans("s01", "s12")
        .bounded("t0", "t2")
}

/// The verbose complex: past prism, overlay at `t1`, future prism.
pub fn lineland_middle() -> Space {
    attach_change(&house(), &extended_house(), &lineland_attachment(), "t1").expect("continuous attachment")
}

/// Left wall and the room trajectory are identified across `t1`.
pub fn lineland_classes() -> Vec<BTreeSet<ElementId>> {
    let middle = lineland_middle();
    let id = |x: &str, t: &str| at_time(&x.into(), &t.into());
    let wall: BTreeSet<ElementId> = [id("wl", "s01"), id("wl", "t1"), id("wl", "s12")].into_iter().collect();
    let room: BTreeSet<ElementId> = [id("I", "s01"), id("I", "t1"), id("J", "s12")].into_iter().collect();
    let mut classes = vec![wall.clone(), room.clone()];
    classes.extend(
        middle
            .ids()
            .filter(|x| !wall.contains(x) && !room.contains(x))
            .map(|x| [x.clone()].into_iter().collect()),
    );
    classes
}

pub fn lineland_lower() -> Space {
    quotient(&lineland_middle(), &lineland_classes()).expect("identification stays T0")
}

/// Positions of the vertices of the lower complex: `wl` at 0, `wr` at 1,
/// `wrr` at 2; `t0`, `t1`, `t2` at times 0, 1, 2.
pub fn lineland_points() -> Vec<PointRow> {
    let lower = lineland_lower();
    let mut out = Vec::new();
    for (wall, x) in [("wl", 0.0), ("wr", 1.0), ("wrr", 2.0)] {
        for (tok, t) in [("t0", 0.0), ("t1", 1.0), ("t2", 2.0)] {
            let pid = at_time(&wall.into(), &tok.into());
            if lower.contains(&pid) && lower.classify(&pid).ok() == Some(crate::CellKind::Vertex) {
                out.push(PointRow::new(pid, x, 0.0, 0.0, t));
            }
        }
    }
    out
}

pub fn lineland_store() -> VersionStore {
    VersionStore::initial("v0", &lineland_lower()).with_points(lineland_points())
}

fn fine(x: &str) -> ElementId {
    ElementId::at(x, 0)
}

fn coarse(x: &str) -> ElementId {
    ElementId::at(format!("{x}'"), 1)
}

/// Three faces `A`, `B`, `C`; `A` and `B` share the edges `e1`, `e2` that
/// meet in `m`; `C` is a hole-like face inside `B` bounded by `c1`, `c2`.
pub fn fig6_fine() -> Space {
    let pairs = [
        ("A", "a1"),
        ("A", "e1"),
        ("A", "e2"),
        ("B", "e1"),
        ("B", "e2"),
        ("B", "b1"),
        ("B", "c1"),
        ("B", "c2"),
        ("C", "c1"),
        ("C", "c2"),
        ("e1", "p1"),
        ("e1", "m"),
        ("e2", "m"),
        ("e2", "p2"),
        ("a1", "p1"),
        ("a1", "p2"),
        ("b1", "p1"),
        ("b1", "p2"),
        ("c1", "q1"),
        ("c1", "q2"),
        ("c2", "q1"),
        ("c2", "q2"),
    ];
    let names = [
        "A", "B", "C", "a1", "e1", "e2", "b1", "c1", "c2", "p1", "p2", "m", "q1", "q2",
    ];
    Space::builder()
        .elements(names.map(fine))
        .pairs(pairs.map(|(a, b)| (fine(a), fine(b))))
        .build()
        .expect("valid")
}

/// The generalised map: `A/B` boundary merged into `e`, `C` collapsed to a
/// point `C'` in the boundary of `B'` (when `with_bc`).
pub fn fig6_coarse(with_bc: bool) -> Space {
    let mut pairs = vec![
        ("A", "a1"),
        ("A", "e"),
        ("B", "e"),
        ("B", "b1"),
        ("a1", "p1"),
        ("a1", "p2"),
        ("e", "p1"),
        ("e", "p2"),
        ("b1", "p1"),
        ("b1", "p2"),
    ];
    if with_bc {
        pairs.push(("B", "C"));
    }
    Space::builder()
        .elements(["A", "B", "C", "a1", "e", "b1", "p1", "p2"].map(coarse))
        .pairs(pairs.into_iter().map(|(a, b)| (coarse(a), coarse(b))))
        .build()
        .expect("valid")
}

fn fig6_target(x: &str) -> &str {
    match x {
        "C" | "c1" | "c2" | "q1" | "q2" => "C",
        "e1" | "e2" | "m" => "e",
        other => other,
    }
}

pub fn fig6_chain(with_bc: bool) -> LodChain {
    let f = fig6_fine();
    let c = fig6_coarse(with_bc);
    let mapping: Vec<(ElementId, ElementId)> = f.ids().map(|x| (x.clone(), coarse(fig6_target(&x.id)))).collect();
    let g = SpaceMap::total(f.clone(), c.clone(), mapping).expect("valid");
    LodChain::new(vec![f, c], vec![g]).expect("valid")
}

/// Both levels in one version, linked through `(gid, glod)`.
pub fn fig6_store(with_bc: bool) -> VersionStore {
    let f = fig6_fine();
    let c = fig6_coarse(with_bc);
    let elements = f
        .elements()
        .map(|e| e.clone().with_gen_target(coarse(fig6_target(&e.key.id))))
        .chain(c.elements().cloned());
    let pairs = f.relation().iter().chain(c.relation()).cloned();
    let both = Space::new(elements, pairs, true).expect("valid");
    VersionStore::initial("v0", &both)
}

/// A path `a - e - b` generalised to a point and then to a point again.
pub fn three_level_store() -> VersionStore {
    let space = Space::builder()
        .element(Element::new(ElementId::at("a", 0)).with_gen_target(ElementId::at("p", 1)))
        .element(Element::new(ElementId::at("b", 0)).with_gen_target(ElementId::at("p", 1)))
        .element(Element::new(ElementId::at("e", 0)).with_gen_target(ElementId::at("p", 1)))
        .element(Element::new(ElementId::at("p", 1)).with_gen_target(ElementId::at("q", 2)))
        .element(ElementId::at("q", 2))
        .pairs([
            (ElementId::at("e", 0), ElementId::at("a", 0)),
            (ElementId::at("e", 0), ElementId::at("b", 0)),
        ])
        .build()
        .expect("valid");
    VersionStore::initial("v0", &space)
}

pub fn f1() -> Space {
    Space::builder()
        .elements(["u", "v", "e"])
        .pairs([("e", "u"), ("e", "v")])
        .build()
        .expect("valid")
}

/// The chain `3 > 2 > 1 > 0`.
pub fn f2() -> Space {
    Space::builder()
        .elements(["3", "2", "1", "0"])
        .pairs([("3", "2"), ("2", "1"), ("1", "0")])
        .build()
        .expect("valid")
}

/// Writes every example store under `dir`, one directory each. Returns the
/// names.
pub fn write_demo_stores(dir: impl AsRef<Path>) -> Result<Vec<&'static str>> {
    let dir = dir.as_ref();
    let text = text_store();
    let head = |v: &str| crate::versioning::reconstruct_version(&text, v);
    let stores: Vec<(&'static str, VersionStore)> = vec![
        ("f1", VersionStore::initial("v0", &f1())),
        ("f2", VersionStore::initial("v0", &f2())),
        ("textstore", text.clone()),
        ("help", VersionStore::initial("help", &head("v1")?)),
        ("halo", VersionStore::initial("halo", &head("v2")?)),
        ("lineland", lineland_store()),
        ("demo", fig6_store(true)),
        ("broken", fig6_store(false)),
    ];
    for (name, store) in &stores {
        save(store, dir.join(name))?;
    }
    Ok(stores.into_iter().map(|(n, _)| n).collect())
}
