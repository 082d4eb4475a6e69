//! Space-time complexes built from spatial snapshots.
//!
//! Time tokens are plain element ids. A moment `t` and a span `s` between two
//! moments form the time complex `{s, t0, t1}` with `s` bounded by both
//! moments; a prism is the product of a snapshot with it. Real timestamps only
//! enter through [`PointRow`]s, which [`time_slice`] uses to cut a complex at
//! an instant.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{check_map_within, open_reduction, product, select_subspace, SpaceMap, PRODUCT_SEPARATOR};
use crate::error::{Error, Result};
use crate::topology::{BoundedByPair, CellKind, Element, ElementId, Limits, Space};

/// Coordinates of a vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub pid: ElementId,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl PointRow {
    pub fn new(pid: impl Into<ElementId>, x: f64, y: f64, z: f64, t: f64) -> Self {
        Self {
            pid: pid.into(),
            x,
            y,
            z,
            t,
        }
    }
}

/// `{span, t0, t1}` with the span bounded by both moments.
pub fn time_complex(t0: &ElementId, t1: &ElementId, span: &ElementId) -> Result<Space> {
    if t0 == t1 {
        return Err(Error::InvalidArgument(format!(
            "time complex needs two distinct moments, got {t0} twice"
        )));
    }
    Space::builder()
        .elements([span, t0, t1])
        .pairs([(span, t0), (span, t1)])
        .build()
}

/// Default id of the span between two moments.
pub fn span_id(t0: &ElementId, t1: &ElementId) -> ElementId {
    ElementId::new(format!("{t0}..{t1}"))
}

/// `space × {t0..t1, t0, t1}`.
pub fn prism(space: &Space, t0: impl Into<ElementId>, t1: impl Into<ElementId>) -> Result<Space> {
    let (t0, t1) = (t0.into(), t1.into());
    let span = span_id(&t0, &t1);
    prism_with_span(space, &t0, &t1, &span)
}

pub fn prism_with_span(space: &Space, t0: &ElementId, t1: &ElementId, span: &ElementId) -> Result<Space> {
    Ok(product(space, &time_complex(t0, t1, span)?))
}

/// Id of `x` tagged with a time token.
pub fn at_time(x: &ElementId, t: &ElementId) -> ElementId {
    crate::algebra::product_key(x, t, PRODUCT_SEPARATOR)
}

/// Overlay and attaching maps for one change event.
///
/// The overlay is the domain of both maps. The past trajectories run over
/// `past_span`, which opens at `past_start` when given; likewise the future
/// trajectories run over `future_span` and close at `future_end`.
#[derive(Debug, Clone)]
pub struct AttachmentSpec {
    pub past_map: SpaceMap,
    pub future_map: SpaceMap,
    pub past_span: Option<ElementId>,
    pub future_span: Option<ElementId>,
    pub past_start: Option<ElementId>,
    pub future_end: Option<ElementId>,
}

impl AttachmentSpec {
    pub fn new(past_map: SpaceMap, future_map: SpaceMap) -> Self {
        Self {
            past_map,
            future_map,
            past_span: None,
            future_span: None,
            past_start: None,
            future_end: None,
        }
    }

    pub fn overlay(&self) -> &Space {
        self.past_map.source()
    }

    pub fn spans(mut self, past: impl Into<ElementId>, future: impl Into<ElementId>) -> Self {
        self.past_span = Some(past.into());
        self.future_span = Some(future.into());
        self
    }

    pub fn bounded(mut self, start: impl Into<ElementId>, end: impl Into<ElementId>) -> Self {
        self.past_start = Some(start.into());
        self.future_end = Some(end.into());
        self
    }
}

/// Pastes the overlay, tagged with moment `t`, between the past and future
/// trajectories. Each past trajectory `(x, span)` is bounded by `(o, t)` when
/// the past map sends `o` to `x`; the same for the future side.
///
/// Returns the verbose complex; identifications are a separate quotient.
pub fn attach_change(past: &Space, future: &Space, spec: &AttachmentSpec, t: impl Into<ElementId>) -> Result<Space> {
    let t = t.into();
    let overlay = spec.overlay();
    if spec.future_map.source() != overlay {
        return Err(Error::InvalidMap(
            "attaching maps must share the overlay as source".into(),
        ));
    }
    if spec.past_map.target() != past || spec.future_map.target() != future {
        return Err(Error::InvalidMap(
            "attaching maps must land in the given snapshots".into(),
        ));
    }
    let limits = Limits {
        monotonicity: 0,
        ..Limits::default()
    };
    for map in [&spec.past_map, &spec.future_map] {
        let report = check_map_within(map, &limits)?;
        if !report.is_continuous() {
            return Err(Error::RejectedMap(Box::new(report)));
        }
    }

    let past_span = spec.past_span.clone().unwrap_or_else(|| match &spec.past_start {
        Some(s) => span_id(s, &t),
        None => ElementId::new(format!("..{t}")),
    });
    let future_span = spec.future_span.clone().unwrap_or_else(|| match &spec.future_end {
        Some(e) => span_id(&t, e),
        None => ElementId::new(format!("{t}..")),
    });
    let past_part = product(past, &trajectory(&past_span, spec.past_start.as_ref())?);
    let future_part = product(future, &trajectory(&future_span, spec.future_end.as_ref())?);
    let now = product(overlay, &Space::builder().element(t.clone()).build()?);

    let mut elements: Vec<Element> = Vec::new();
    let mut pairs: BTreeSet<BoundedByPair> = BTreeSet::new();
    for part in [&past_part, &now, &future_part] {
        elements.extend(part.elements().cloned());
        pairs.extend(part.relation().iter().cloned());
    }
    for (map, span) in [(&spec.past_map, &past_span), (&spec.future_map, &future_span)] {
        for (o, x) in map.mapping() {
            pairs.insert(BoundedByPair {
                ida: at_time(x, span),
                idb: at_time(o, &t),
            });
        }
    }
    let relation = open_reduction(&pairs)?;
    Space::new(elements, relation, true)
}

fn trajectory(span: &ElementId, end: Option<&ElementId>) -> Result<Space> {
    let mut b = Space::builder().element(span.clone());
    if let Some(end) = end {
        b = b.element(end.clone()).pair(span.clone(), end.clone());
    }
    b.build()
}

/// The subspace alive at time `t`.
///
/// Each element gets `tmin`/`tmax` from the vertices in its closure. It is
/// kept iff `tmin < t < tmax` or `tmin = t = tmax`.
pub fn time_slice(space: &Space, points: &[PointRow], t: f64) -> Result<Space> {
    let times: BTreeMap<&ElementId, f64> = points.iter().map(|p| (&p.pid, p.t)).collect();
    let mut keep = Vec::new();
    for x in space.ids() {
        let (tmin, tmax) = time_range(space, &times, x)?;
        if (tmin < t && t < tmax) || (tmin == t && t == tmax) {
            keep.push(x.clone());
        }
    }
    select_subspace(space, &keep)
}

fn time_range(space: &Space, times: &BTreeMap<&ElementId, f64>, x: &ElementId) -> Result<(f64, f64)> {
    let mut range: Option<(f64, f64)> = None;
    for y in space.closure([x])? {
        if space.classify(&y)? != CellKind::Vertex {
            continue;
        }
        if let Some(&ty) = times.get(&y) {
            range = Some(match range {
                None => (ty, ty),
                Some((lo, hi)) => (lo.min(ty), hi.max(ty)),
            });
        }
    }
    range.ok_or_else(|| Error::MissingGeometry(x.clone()))
}
