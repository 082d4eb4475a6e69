use std::collections::BTreeSet;
use std::fmt;

use super::store::VersionStore;
use crate::error::Error;
use crate::lod::generalisation_reports;
use crate::topology::{BoundedByPair, ElementId, Limits};
use crate::versioning::reconstruct_version;

/// Optional rules on top of the always-checked keys, T0 and continuity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    pub surjective: bool,
    pub monotonic: bool,
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ForeignKey {
        table: &'static str,
        key: &'static str,
        row: String,
    },
    /// The version graph has a cycle.
    VersionCycle(Vec<String>),
    /// Version could not be rebuilt: a T0 violation or an integrity error.
    Version { version: String, error: Error },
    /// `(gid, glod)` names an element that is not live in the version.
    DanglingGeneralisation {
        version: String,
        element: ElementId,
        target: ElementId,
    },
    /// The generalisation from `lod` to `glod` breaks continuity at `pair`.
    Discontinuous {
        version: String,
        lod: u32,
        glod: u32,
        pair: BoundedByPair,
    },
    NotSurjective {
        version: String,
        lod: u32,
        glod: u32,
        missed: BTreeSet<ElementId>,
    },
    NotMonotonic {
        version: String,
        lod: u32,
        glod: u32,
        target_set: BTreeSet<ElementId>,
    },
}

impl Violation {
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::ForeignKey { .. } => "FK",
            Violation::VersionCycle(_) => "T0(versions)",
            Violation::Version {
                error: Error::T0Violation(_),
                ..
            } => "T0",
            Violation::Version { .. } => "integrity",
            Violation::DanglingGeneralisation { .. } => "CFK",
            Violation::Discontinuous { .. } => "CFK",
            Violation::NotSurjective { .. } => "surjective",
            Violation::NotMonotonic { .. } => "monotonic",
        }
    }
}

fn set<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = self.rule();
        match self {
            Violation::ForeignKey { table, key, row } => write!(f, "{rule} {key}: {table} row {row}"),
            Violation::VersionCycle(c) => write!(f, "{rule}: cycle {}", c.join(" -> ")),
            Violation::Version { version, error } => write!(f, "{rule} in {version}: {error}"),
            Violation::DanglingGeneralisation {
                version,
                element,
                target,
            } => write!(
                f,
                "{rule} in {version}: {element} generalises to {target}, which is not live"
            ),
            Violation::Discontinuous {
                version,
                lod,
                glod,
                pair,
            } => write!(f, "{rule} in {version}: map {lod}->{glod} not continuous at {pair}"),
            Violation::NotSurjective {
                version,
                lod,
                glod,
                missed,
            } => write!(f, "{rule} in {version}: map {lod}->{glod} misses {}", set(missed)),
            Violation::NotMonotonic {
                version,
                lod,
                glod,
                target_set,
            } => write!(
                f,
                "{rule} in {version}: map {lod}->{glod} splits the preimage of {}",
                set(target_set)
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Every foreign key of the schema, as errors in table order.
pub fn check_foreign_keys(store: &VersionStore) -> Vec<Error> {
    let mut out = Vec::new();
    let mut fk = |ok: bool, table: &'static str, key: &'static str, row: &dyn fmt::Display| {
        if !ok {
            out.push(Error::ForeignKey {
                table,
                row: row.to_string(),
                key,
            });
        }
    };
    let version = |v: &String| store.vx.contains(v);
    for (k, row) in &store.x {
        fk(version(&row.version), "X", "X.version→VX", k);
        if let Some(t) = &row.gen_target {
            fk(store.x.contains_key(t), "X", "X.(gid,glod)→X", k);
        }
    }
    for (p, v) in &store.r {
        fk(store.x.contains_key(&p.ida), "R", "R.ida→X", p);
        fk(store.x.contains_key(&p.idb), "R", "R.idb→X", p);
        fk(version(v), "R", "R.version→VX", p);
    }
    for k in store.points.keys() {
        fk(store.x.contains_key(k), "Point", "Point.pid→X", k);
    }
    for (k, v) in &store.del_x {
        let row = format!("{k} {v}");
        fk(store.x.contains_key(k), "DelX", "DelX.id→X", &row);
        fk(version(v), "DelX", "DelX.version→VX", &row);
    }
    for (p, v) in &store.del_r {
        let row = format!("{p} {v}");
        fk(store.x.contains_key(&p.ida), "DelR", "DelR.ida→X", &row);
        fk(store.x.contains_key(&p.idb), "DelR", "DelR.idb→X", &row);
        fk(store.r.contains_key(p), "DelR", "DelR.(ida,idb)→R", &row);
        fk(version(v), "DelR", "DelR.version→VX", &row);
    }
    for (a, b) in &store.vr {
        let row = format!("{a} {b}");
        fk(version(a), "VR", "VR.fromv→VX", &row);
        fk(version(b), "VR", "VR.tov→VX", &row);
    }
    for k in store.atts.keys() {
        fk(store.x.contains_key(k), "Atts", "Atts.id→X", k);
    }
    out
}

/// Checks keys, the version graph, and per version the T0 rule and the
/// generalisation maps. Never fails; findings are data.
pub fn validate(store: &VersionStore, options: &ValidateOptions) -> ValidationReport {
    let mut report = ValidationReport::default();
    for e in check_foreign_keys(store) {
        if let Error::ForeignKey { table, row, key } = e {
            report.violations.push(Violation::ForeignKey { table, key, row });
        }
    }
    let vs = match store.version_space() {
        Ok(vs) => vs,
        Err(Error::T0Violation(cycle)) => {
            report
                .violations
                .push(Violation::VersionCycle(cycle.into_iter().map(|x| x.id).collect()));
            return report;
        }
        // unknown versions in VR are already foreign key findings
        Err(_) => return report,
    };
    for v in vs.versions() {
        let space = match reconstruct_version(store, v) {
            Ok(s) => s,
            Err(error) => {
                report.violations.push(Violation::Version {
                    version: v.to_string(),
                    error,
                });
                continue;
            }
        };
        let mut dangling = false;
        for e in space.elements() {
            if let Some(t) = e.gen_target.as_ref().filter(|t| !space.contains(t)) {
                dangling = true;
                report.violations.push(Violation::DanglingGeneralisation {
                    version: v.to_string(),
                    element: e.key.clone(),
                    target: t.clone(),
                });
            }
        }
        if dangling {
            continue;
        }
        let limits = if options.monotonic {
            options.limits
        } else {
            Limits {
                monotonicity: 0,
                ..options.limits
            }
        };
        let reports = match generalisation_reports(&space, &limits) {
            Ok(r) => r,
            Err(error) => {
                report.violations.push(Violation::Version {
                    version: v.to_string(),
                    error,
                });
                continue;
            }
        };
        for ((lod, glod), r) in reports {
            let version = v.to_string();
            if let Some(pair) = r.discontinuity.clone() {
                report.violations.push(Violation::Discontinuous {
                    version: version.clone(),
                    lod,
                    glod,
                    pair,
                });
            }
            if options.surjective && !r.is_surjective() {
                report.violations.push(Violation::NotSurjective {
                    version: version.clone(),
                    lod,
                    glod,
                    missed: r.missed_targets.clone(),
                });
            }
            if options.monotonic {
                if let crate::algebra::Monotonicity::Violated { target_set, .. } = &r.monotonicity {
                    report.violations.push(Violation::NotMonotonic {
                        version,
                        lod,
                        glod,
                        target_set: target_set.clone(),
                    });
                }
            }
        }
    }
    report
}
