//! Evaluation of query expressions against stores on disk.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use alexdb_core::algebra::{
    check_map_within, disjoint_union, image_space, product, pullback, quotient, select_subspace, SpaceMap,
};
use alexdb_core::lod::{direct_path, telescope, LodChain, TelescopeJoin};
use alexdb_core::spacetime::{time_slice, PointRow};
use alexdb_core::storage::{self, validate, versions_with_path, PathOptions, ValidateOptions, VersionStore};
use alexdb_core::versioning::{merge, reconstruct_version, ConflictReport, ConsistencyRule, RuleRegistry};
use alexdb_core::{ElementId, Limits, Space};

use crate::error::CliError;
use crate::expr::Expr;

/// Findings of a check, one `(kind, detail)` row each.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<(String, String)>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Store(Box<VersionStore>),
    /// A space with whatever point geometry its elements carry.
    Space {
        space: Space,
        points: Vec<PointRow>,
    },
    Merged {
        space: Space,
        report: ConflictReport,
    },
    Set(BTreeSet<ElementId>),
    Map(Box<SpaceMap>),
    Number(f64),
    Flag(bool),
    Report(Report),
    Text(String),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Store(_) => "store",
            Value::Space { .. } => "space",
            Value::Merged { .. } => "merge result",
            Value::Set(_) => "set",
            Value::Map(_) => "map",
            Value::Number(_) => "number",
            Value::Flag(_) => "flag",
            Value::Report(_) => "report",
            Value::Text(_) => "text",
        }
    }
}

/// Everything evaluation depends on besides the expression itself.
#[derive(Debug, Clone, Default)]
pub struct Env {
    /// Directory that relative `load` paths are tried against first.
    pub base: Option<PathBuf>,
    /// Version used when a store stands in for a space.
    pub version: Option<String>,
    /// Consistency rules applied by every merge.
    pub rules: Vec<String>,
    pub limits: Limits,
    pub bindings: BTreeMap<String, Value>,
}

pub fn load_store(env: &Env, path: &Path) -> Result<VersionStore, CliError> {
    let resolved = match &env.base {
        Some(base) if path.is_relative() && base.join(path).is_dir() => base.join(path),
        _ => path.to_path_buf(),
    };
    Ok(storage::load(&resolved)?)
}

/// The version to read: the requested one, else the only head.
pub fn pick_version(store: &VersionStore, requested: Option<&str>) -> Result<String, CliError> {
    if let Some(v) = requested {
        return Ok(v.to_string());
    }
    let heads = store.version_space()?.heads();
    match heads.len() {
        1 => Ok(heads.into_iter().next().unwrap()),
        0 => Err(CliError::Usage("store has no versions".into())),
        _ => Err(CliError::Usage(format!(
            "store has several heads ({}); pass a version",
            heads.into_iter().collect::<Vec<_>>().join(", ")
        ))),
    }
}

pub fn version_space(store: &VersionStore, v: &str) -> Result<Value, CliError> {
    let space = reconstruct_version(store, v)?;
    let points = store
        .points
        .values()
        .filter(|p| space.contains(&p.pid))
        .cloned()
        .collect();
    Ok(Value::Space { space, points })
}

struct Node<'a> {
    op: &'a str,
    path: String,
    args: &'a [Expr],
    named: &'a [(String, Expr)],
}

impl Node<'_> {
    fn type_error<T>(&self, message: impl Into<String>) -> Result<T, CliError> {
        Err(CliError::Type {
            path: self.path.clone(),
            message: message.into(),
        })
    }

    fn arity(&self, min: usize, max: usize, names: &[&str]) -> Result<(), CliError> {
        if self.args.len() < min || self.args.len() > max {
            let want = if min == max {
                min.to_string()
            } else if max == usize::MAX {
                format!("at least {min}")
            } else {
                format!("{min} to {max}")
            };
            return self.type_error(format!("{} takes {want} arguments, got {}", self.op, self.args.len()));
        }
        if let Some((k, _)) = self.named.iter().find(|(k, _)| !names.contains(&k.as_str())) {
            return self.type_error(format!("{} has no argument named {k}", self.op));
        }
        Ok(())
    }

    fn arg_path(&self, i: usize) -> String {
        format!("{}/{i}", self.path)
    }

    fn named_all(&self, key: &str) -> impl Iterator<Item = (String, &Expr)> + '_ {
        let key = key.to_string();
        self.named
            .iter()
            .filter(move |(k, _)| *k == key)
            .map(|(k, e)| (format!("{}/{k}", self.path), e))
    }

    fn named(&self, key: &str) -> Option<(String, &Expr)> {
        self.named_all(key).last()
    }
}

pub struct Evaluator<'e> {
    pub env: &'e Env,
}

fn type_error<T>(path: &str, message: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Type {
        path: path.to_string(),
        message: message.into(),
    })
}

impl Evaluator<'_> {
    pub fn eval(&self, e: &Expr) -> Result<Value, CliError> {
        self.eval_at(e, "")
    }

    fn eval_at(&self, e: &Expr, path: &str) -> Result<Value, CliError> {
        match e {
            Expr::Call { op, args, named } => {
                let node = Node {
                    op,
                    path: if path.is_empty() {
                        op.clone()
                    } else {
                        format!("{path}/{op}")
                    },
                    args,
                    named,
                };
                self.call(&node)
            }
            Expr::Set(items) => {
                let mut out = BTreeSet::new();
                for (i, x) in items.iter().enumerate() {
                    out.extend(self.members(x, &format!("{path}/{i}"))?);
                }
                Ok(Value::Set(out))
            }
            Expr::List(_) => type_error(path, "lists only appear as pairs inside map"),
            Expr::Str(s) | Expr::Word(s) => Ok(Value::Text(s.clone())),
            Expr::Num(n) => Ok(Value::Number(n.parse().expect("lexer checked"))),
            Expr::Ref(r) => self.env.bindings.get(r).cloned().ok_or_else(|| CliError::Type {
                path: path.to_string(),
                message: format!("unbound reference @{r}"),
            }),
        }
    }

    /// Element ids named by a set item: a literal, or the members of a bound set.
    fn members(&self, e: &Expr, path: &str) -> Result<BTreeSet<ElementId>, CliError> {
        match self.eval_literal(e, path)? {
            Value::Set(s) => Ok(s),
            other => type_error(path, format!("expected an element id, found {}", other.kind())),
        }
    }

    fn eval_literal(&self, e: &Expr, path: &str) -> Result<Value, CliError> {
        match e {
            Expr::Str(s) | Expr::Word(s) | Expr::Num(s) => Ok(Value::Set([ElementId::from(s.as_str())].into())),
            _ => match self.eval_at(e, path)? {
                Value::Text(s) => Ok(Value::Set([ElementId::from(s)].into())),
                v => Ok(v),
            },
        }
    }

    fn id(&self, e: &Expr, path: &str) -> Result<ElementId, CliError> {
        let set = self.members(e, path)?;
        if set.len() != 1 {
            return type_error(path, format!("expected one element id, found {} ids", set.len()));
        }
        Ok(set.into_iter().next().unwrap())
    }

    fn text(&self, e: &Expr, path: &str) -> Result<String, CliError> {
        match e {
            Expr::Str(s) | Expr::Word(s) | Expr::Num(s) => Ok(s.clone()),
            _ => match self.eval_at(e, path)? {
                Value::Text(s) => Ok(s),
                v => type_error(path, format!("expected text, found {}", v.kind())),
            },
        }
    }

    fn number(&self, e: &Expr, path: &str) -> Result<f64, CliError> {
        match self.eval_at(e, path)? {
            Value::Number(x) => Ok(x),
            v => type_error(path, format!("expected a number, found {}", v.kind())),
        }
    }

    fn flag(&self, e: &Expr, path: &str) -> Result<bool, CliError> {
        match self.eval_at(e, path)? {
            Value::Flag(b) => Ok(b),
            Value::Text(t) => match t.to_ascii_lowercase().as_str() {
                "yes" | "true" => Ok(true),
                "no" | "false" => Ok(false),
                _ => type_error(path, format!("expected yes or no, found {t}")),
            },
            v => type_error(path, format!("expected a flag, found {}", v.kind())),
        }
    }

    fn set(&self, e: &Expr, path: &str) -> Result<BTreeSet<ElementId>, CliError> {
        match self.eval_literal(e, path)? {
            Value::Set(s) => Ok(s),
            Value::Space { space, .. } | Value::Merged { space, .. } => Ok(space.id_set()),
            v => type_error(path, format!("expected a set, found {}", v.kind())),
        }
    }

    fn store(&self, e: &Expr, path: &str) -> Result<VersionStore, CliError> {
        match self.eval_at(e, path)? {
            Value::Store(s) => Ok(*s),
            v => type_error(path, format!("expected a store, found {}", v.kind())),
        }
    }

    fn space(&self, e: &Expr, path: &str) -> Result<(Space, Vec<PointRow>), CliError> {
        match self.eval_at(e, path)? {
            Value::Space { space, points } => Ok((space, points)),
            Value::Merged { space, .. } => Ok((space, Vec::new())),
            Value::Store(store) => {
                let v = pick_version(&store, self.env.version.as_deref())?;
                match version_space(&store, &v)? {
                    Value::Space { space, points } => Ok((space, points)),
                    _ => unreachable!(),
                }
            }
            v => type_error(path, format!("expected a space, found {}", v.kind())),
        }
    }

    fn map(&self, e: &Expr, path: &str) -> Result<SpaceMap, CliError> {
        match self.eval_at(e, path)? {
            Value::Map(m) => Ok(*m),
            v => type_error(path, format!("expected a map, found {}", v.kind())),
        }
    }

    fn call(&self, n: &Node) -> Result<Value, CliError> {
        let a = |i: usize| (&n.args[i], n.arg_path(i));
        let space_only = |space: Space| Value::Space {
            space,
            points: Vec::new(),
        };
        match n.op {
            "load" => {
                n.arity(1, 1, &[])?;
                let (e, p) = a(0);
                let path = self.text(e, &p)?;
                Ok(Value::Store(Box::new(load_store(self.env, Path::new(&path))?)))
            }
            "version" => {
                n.arity(2, 2, &[])?;
                let store = self.store(a(0).0, &a(0).1)?;
                let v = self.text(a(1).0, &a(1).1)?;
                version_space(&store, &v)
            }
            "heads" | "versions" => {
                n.arity(1, 1, &[])?;
                let vs = self.store(a(0).0, &a(0).1)?.version_space()?;
                let tokens: Vec<String> = if n.op == "heads" {
                    vs.heads().into_iter().collect()
                } else {
                    vs.versions().map(str::to_string).collect()
                };
                Ok(Value::Set(tokens.into_iter().map(ElementId::new).collect()))
            }
            "elements" => {
                n.arity(1, 1, &[])?;
                Ok(Value::Set(self.space(a(0).0, &a(0).1)?.0.id_set()))
            }
            "count" => {
                n.arity(1, 1, &[])?;
                Ok(Value::Number(self.set(a(0).0, &a(0).1)?.len() as f64))
            }
            "select" => {
                n.arity(2, 2, &[])?;
                let (space, points) = self.space(a(0).0, &a(0).1)?;
                let keep = self.set(a(1).0, &a(1).1)?;
                let sub = select_subspace(&space, &keep)?;
                let points = points.into_iter().filter(|p| keep.contains(&p.pid)).collect();
                Ok(Value::Space { space: sub, points })
            }
            "product" => {
                n.arity(2, 2, &[])?;
                let x = self.space(a(0).0, &a(0).1)?.0;
                let y = self.space(a(1).0, &a(1).1)?.0;
                Ok(space_only(product(&x, &y)))
            }
            "union" => {
                n.arity(1, usize::MAX, &[])?;
                let spaces = (0..n.args.len())
                    .map(|i| self.space(a(i).0, &a(i).1).map(|s| s.0))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(space_only(disjoint_union(&spaces)))
            }
            "quotient" => {
                n.arity(1, usize::MAX, &[])?;
                let space = self.space(a(0).0, &a(0).1)?.0;
                let classes = (1..n.args.len())
                    .map(|i| self.set(a(i).0, &a(i).1))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(space_only(quotient(&space, &classes)?))
            }
            "map" => {
                n.arity(2, usize::MAX, &["partial"])?;
                let source = self.space(a(0).0, &a(0).1)?.0;
                let target = self.space(a(1).0, &a(1).1)?.0;
                let mut pairs = Vec::new();
                for i in 2..n.args.len() {
                    let (e, p) = a(i);
                    let Expr::List(xy) = e else {
                        return type_error(&p, "expected a pair [x, y]");
                    };
                    if xy.len() != 2 {
                        return type_error(&p, format!("expected a pair [x, y], found {} items", xy.len()));
                    }
                    pairs.push((self.id(&xy[0], &format!("{p}/0"))?, self.id(&xy[1], &format!("{p}/1"))?));
                }
                let partial = match n.named("partial") {
                    Some((p, e)) => self.flag(e, &p)?,
                    None => false,
                };
                Ok(Value::Map(Box::new(SpaceMap::new(source, target, pairs, partial)?)))
            }
            "gen" => {
                n.arity(1, 1, &["lod"])?;
                let store = self.store(a(0).0, &a(0).1)?;
                let v = pick_version(&store, self.env.version.as_deref())?;
                let chain = LodChain::from_store(&store, &v)?;
                let lod = match n.named("lod") {
                    Some((p, e)) => self.number(e, &p)?,
                    None => 0.0,
                };
                match chain.gens().get(lod as usize) {
                    Some(g) if lod.fract() == 0.0 && lod >= 0.0 => Ok(Value::Map(Box::new(g.clone()))),
                    _ => n.type_error(format!("no generalisation out of level {lod}")),
                }
            }
            "image" => {
                n.arity(1, 1, &[])?;
                Ok(space_only(image_space(&self.map(a(0).0, &a(0).1)?)?))
            }
            "pullback" => {
                n.arity(2, 2, &[])?;
                let f = self.map(a(0).0, &a(0).1)?;
                let g = self.map(a(1).0, &a(1).1)?;
                Ok(space_only(pullback(&f, &g)?))
            }
            "check" => {
                n.arity(1, 1, &[])?;
                let r = check_map_within(&self.map(a(0).0, &a(0).1)?, &self.env.limits)?;
                Ok(Value::Report(Report {
                    rows: vec![("map".into(), r.to_string())],
                }))
            }
            "slice" => {
                n.arity(1, 2, &["t"])?;
                let (space, points) = self.space(a(0).0, &a(0).1)?;
                let t = match (n.args.get(1), n.named("t")) {
                    (Some(e), None) => self.number(e, &n.arg_path(1))?,
                    (None, Some((p, e))) => self.number(e, &p)?,
                    _ => return n.type_error("slice needs exactly one time t"),
                };
                let s = time_slice(&space, &points, t)?;
                let points = points.into_iter().filter(|p| s.contains(&p.pid)).collect();
                Ok(Value::Space { space: s, points })
            }
            "closure" | "star" => {
                n.arity(2, 2, &[])?;
                let space = self.space(a(0).0, &a(0).1)?.0;
                let set = self.set(a(1).0, &a(1).1)?;
                let out = if n.op == "closure" {
                    space.closure(&set)?
                } else {
                    space.star(&set)?
                };
                Ok(Value::Set(out))
            }
            "dim" => {
                n.arity(1, 1, &[])?;
                Ok(Value::Number(self.space(a(0).0, &a(0).1)?.0.krull_dimension()? as f64))
            }
            "merge" => {
                n.arity(2, 2, &["rule"])?;
                let x = self.space(a(0).0, &a(0).1)?.0;
                let y = self.space(a(1).0, &a(1).1)?.0;
                let mut names = self.env.rules.clone();
                for (p, e) in n.named_all("rule") {
                    names.push(self.text(e, &p)?);
                }
                let registry = RuleRegistry::default();
                let mut rules: Vec<&dyn ConsistencyRule> = Vec::new();
                for name in &names {
                    match registry.get(name) {
                        Some(r) => rules.push(r),
                        None => {
                            let known: Vec<&str> = registry.names().collect();
                            return n.type_error(format!("unknown rule {name}; known: {}", known.join(", ")));
                        }
                    }
                }
                let (space, report) = merge(&x, &y, &rules);
                Ok(Value::Merged { space, report })
            }
            "path" => {
                n.arity(3, 3, &["region"])?;
                let space = self.space(a(0).0, &a(0).1)?.0;
                let x = self.id(a(1).0, &a(1).1)?;
                let y = self.id(a(2).0, &a(2).1)?;
                let region = match n.named("region") {
                    Some((p, e)) => self.set(e, &p)?,
                    None => space.id_set(),
                };
                Ok(Value::Flag(direct_path(&space, &region, &x, &y)?))
            }
            "versions_with_path" => {
                n.arity(3, 3, &["region", "monotone"])?;
                let store = self.store(a(0).0, &a(0).1)?;
                let x = self.id(a(1).0, &a(1).1)?;
                let y = self.id(a(2).0, &a(2).1)?;
                let region = match n.named("region") {
                    Some((p, e)) => self.set(e, &p)?,
                    None => store.x.keys().cloned().collect(),
                };
                let monotone = match n.named("monotone") {
                    Some((p, e)) => self.flag(e, &p)?,
                    None => false,
                };
                let vs = versions_with_path(&store, &x, &y, &region, &PathOptions { monotone })?;
                Ok(Value::Set(vs.into_iter().map(ElementId::new).collect()))
            }
            "telescope" => {
                n.arity(1, 1, &["join"])?;
                let store = self.store(a(0).0, &a(0).1)?;
                let join = match n.named("join") {
                    None => TelescopeJoin::default(),
                    Some((p, e)) => {
                        parse_join(&self.text(e, &p)?).map_err(|m| CliError::Type { path: p, message: m })?
                    }
                };
                let v = pick_version(&store, self.env.version.as_deref())?;
                Ok(space_only(telescope(&store, &v, join)?))
            }
            "validate" => {
                n.arity(1, 1, &["surjective", "monotonic"])?;
                let store = self.store(a(0).0, &a(0).1)?;
                let mut opts = ValidateOptions {
                    limits: self.env.limits,
                    ..ValidateOptions::default()
                };
                if let Some((p, e)) = n.named("surjective") {
                    opts.surjective = self.flag(e, &p)?;
                }
                if let Some((p, e)) = n.named("monotonic") {
                    opts.monotonic = self.flag(e, &p)?;
                }
                let report = validate(&store, &opts);
                Ok(Value::Report(Report {
                    rows: report
                        .violations
                        .iter()
                        .map(|v| (v.rule().to_string(), v.to_string()))
                        .collect(),
                }))
            }
            other => n.type_error(format!("unknown operator {other}")),
        }
    }
}

pub fn parse_join(s: &str) -> Result<TelescopeJoin, String> {
    match s {
        "vertex-and-edge" => Ok(TelescopeJoin::VertexAndEdge),
        "vertex-only" => Ok(TelescopeJoin::VertexOnly),
        _ => Err(format!("unknown join {s}; use vertex-and-edge or vertex-only")),
    }
}

pub fn evaluate(env: &Env, e: &Expr) -> Result<Value, CliError> {
    Evaluator { env }.eval(e)
}
