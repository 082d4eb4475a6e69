use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::topology::{BoundedByPair, Element, ElementId, Scalar, Space};

/// Same element, different attribute value. `None` means absent on that side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InherentConflict {
    pub element: ElementId,
    pub attribute: String,
    pub left: Option<Scalar>,
    pub right: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyConflict {
    pub rule: String,
    pub witness: BTreeSet<ElementId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConflictReport {
    pub inherent: Vec<InherentConflict>,
    pub consistency: Vec<ConsistencyConflict>,
}

impl ConflictReport {
    /// An empty report means the merge is usable as is.
    pub fn is_empty(&self) -> bool {
        self.inherent.is_empty() && self.consistency.is_empty()
    }
}

fn show(v: &Option<Scalar>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), ToString::to_string)
}

impl fmt::Display for ConflictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("no conflicts");
        }
        for c in &self.inherent {
            writeln!(
                f,
                "inherent {} {}: {} vs {}",
                c.element,
                c.attribute,
                show(&c.left),
                show(&c.right)
            )?;
        }
        for c in &self.consistency {
            let w: Vec<String> = c.witness.iter().map(ToString::to_string).collect();
            writeln!(f, "consistency {}: {{{}}}", c.rule, w.join(", "))?;
        }
        Ok(())
    }
}

/// A predicate on spaces. `check` returns one witness set per violation.
pub trait ConsistencyRule {
    fn name(&self) -> &str;
    fn check(&self, space: &Space) -> Vec<BTreeSet<ElementId>>;
}

/// The relation must be acyclic.
#[derive(Debug, Clone, Copy, Default)]
pub struct T0Rule;

impl ConsistencyRule for T0Rule {
    fn name(&self) -> &str {
        "T0"
    }

    fn check(&self, space: &Space) -> Vec<BTreeSet<ElementId>> {
        space
            .find_cycle()
            .map(|c| c.into_iter().collect())
            .into_iter()
            .collect()
    }
}

/// Text-like spaces: at most one successor and one predecessor per element,
/// connected and acyclic.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearDag;

impl ConsistencyRule for LinearDag {
    fn name(&self) -> &str {
        "linear-dag"
    }

    fn check(&self, space: &Space) -> Vec<BTreeSet<ElementId>> {
        let mut out: BTreeMap<&ElementId, Vec<&ElementId>> = BTreeMap::new();
        let mut inc: BTreeMap<&ElementId, Vec<&ElementId>> = BTreeMap::new();
        for BoundedByPair { ida, idb } in space.relation() {
            out.entry(ida).or_default().push(idb);
            inc.entry(idb).or_default().push(ida);
        }
        let mut witnesses = Vec::new();
        for adjacency in [&out, &inc] {
            for (x, ys) in adjacency {
                if ys.len() > 1 {
                    let mut w: BTreeSet<ElementId> = ys.iter().map(|y| (*y).clone()).collect();
                    w.insert((*x).clone());
                    witnesses.push(w);
                }
            }
        }
        if let Some(cycle) = space.find_cycle() {
            witnesses.push(cycle.into_iter().collect());
        }
        let components = space.connected_components();
        if components.len() > 1 {
            witnesses.extend(components);
        }
        witnesses
    }
}

/// A rule from a closure returning whether the space is acceptable.
pub struct PredicateRule<F> {
    name: String,
    predicate: F,
}

impl<F: Fn(&Space) -> bool> PredicateRule<F> {
    pub fn new(name: impl Into<String>, predicate: F) -> Self {
        Self {
            name: name.into(),
            predicate,
        }
    }
}

impl<F: Fn(&Space) -> bool> ConsistencyRule for PredicateRule<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn check(&self, space: &Space) -> Vec<BTreeSet<ElementId>> {
        if (self.predicate)(space) {
            Vec::new()
        } else {
            vec![space.id_set()]
        }
    }
}

/// Rules looked up by case-insensitive name.
pub struct RuleRegistry {
    rules: BTreeMap<String, Box<dyn ConsistencyRule>>,
}

impl Default for RuleRegistry {
    fn default() -> Self {
        let mut r = Self { rules: BTreeMap::new() };
        r.register(T0Rule);
        r.register(LinearDag);
        r
    }
}

impl RuleRegistry {
    pub fn register(&mut self, rule: impl ConsistencyRule + 'static) {
        self.rules.insert(rule.name().to_lowercase(), Box::new(rule));
    }

    pub fn get(&self, name: &str) -> Option<&dyn ConsistencyRule> {
        self.rules.get(&name.to_lowercase()).map(|r| r.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.rules.values().map(|r| r.name())
    }
}

/// Topological merge: union of elements by id and union of pairs.
///
/// Elements present on both sides keep the data of `a`; every attribute on
/// which they differ becomes an inherent conflict. The merged space is
/// returned even when it breaks a rule or is not T0.
pub fn merge(a: &Space, b: &Space, rules: &[&dyn ConsistencyRule]) -> (Space, ConflictReport) {
    let mut report = ConflictReport::default();
    let mut elements: BTreeMap<ElementId, Element> = a.elements().map(|e| (e.key.clone(), e.clone())).collect();
    for e in b.elements() {
        match elements.get(&e.key) {
            None => {
                elements.insert(e.key.clone(), e.clone());
            }
            Some(kept) => report.inherent.extend(attribute_conflicts(kept, e)),
        }
    }
    let pairs: BTreeSet<BoundedByPair> = a.relation().union(b.relation()).cloned().collect();
    let space = Space::new(elements.into_values(), pairs, false).expect("union of valid spaces has no dangling pairs");
    for rule in rules {
        for witness in rule.check(&space) {
            report.consistency.push(ConsistencyConflict {
                rule: rule.name().to_string(),
                witness,
            });
        }
    }
    (space, report)
}

fn attribute_conflicts(left: &Element, right: &Element) -> Vec<InherentConflict> {
    let mut names: BTreeSet<&String> = left.attributes.keys().collect();
    names.extend(right.attributes.keys());
    let mut out: Vec<InherentConflict> = names
        .into_iter()
        .filter_map(|name| {
            let (l, r) = (left.attributes.get(name), right.attributes.get(name));
            (l != r).then(|| InherentConflict {
                element: left.key.clone(),
                attribute: name.clone(),
                left: l.cloned(),
                right: r.cloned(),
            })
        })
        .collect();
    if left.gen_target != right.gen_target {
        let as_scalar = |g: &Option<ElementId>| g.as_ref().map(|t| Scalar::Str(t.to_string()));
        out.push(InherentConflict {
            element: left.key.clone(),
            attribute: "gen_target".into(),
            left: as_scalar(&left.gen_target),
            right: as_scalar(&right.gen_target),
        });
    }
    out
}
