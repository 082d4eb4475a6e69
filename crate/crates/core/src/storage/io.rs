//! CSV persistence, one file per table.
//!
//! Rows are written sorted by primary key, NULL is an empty field and floats
//! use the shortest text that parses back to the same value.

use std::fs;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, WriterBuilder};

use super::store::{VersionStore, XRow};
use super::validate::check_foreign_keys;
use crate::error::{Error, Result};
use crate::spacetime::PointRow;
use crate::topology::{BoundedByPair, ElementId, Scalar};

pub const X_HEADER: [&str; 5] = ["id", "lod", "gid", "glod", "version"];
pub const R_HEADER: [&str; 4] = ["ida", "idb", "lod", "version"];
pub const POINT_HEADER: [&str; 6] = ["pid", "lod", "x", "y", "z", "t"];
pub const DELX_HEADER: [&str; 3] = ["id", "lod", "version"];
pub const DELR_HEADER: [&str; 4] = ["ida", "idb", "lod", "version"];
pub const VX_HEADER: [&str; 1] = ["version"];
pub const VR_HEADER: [&str; 2] = ["fromv", "tov"];
pub const ATTS_HEADER: [&str; 4] = ["id", "lod", "name", "value"];

/// Reads a store and checks its foreign keys.
pub fn load(dir: impl AsRef<Path>) -> Result<VersionStore> {
    let store = load_unchecked(dir)?;
    if let Some(e) = check_foreign_keys(&store).into_iter().next() {
        return Err(e);
    }
    Ok(store)
}

/// Reads a store, checking headers, field syntax and primary keys only.
/// `Atts.csv` may be absent.
pub fn load_unchecked(dir: impl AsRef<Path>) -> Result<VersionStore> {
    let dir = dir.as_ref();
    let mut store = VersionStore::default();

    for (row, rec) in read_table(dir, "X", &X_HEADER)? {
        let f = Fields::new("X", row, &rec);
        let key = ElementId::at(f.text(0), f.lod(1)?);
        let gen_target = match (f.opt(2), f.opt(3)) {
            (None, None) => None,
            (Some(gid), Some(_)) => Some(ElementId::at(gid, f.lod(3)?)),
            _ => return Err(f.bad("gid and glod must both be set or both be empty")),
        };
        let xrow = XRow {
            gen_target,
            version: f.text(4),
        };
        if store.x.insert(key.clone(), xrow).is_some() {
            return Err(pk("X", key));
        }
    }
    for (row, rec) in read_table(dir, "R", &R_HEADER)? {
        let f = Fields::new("R", row, &rec);
        let pair = f.pair(0, 1, 2)?;
        if store.r.insert(pair.clone(), f.text(3)).is_some() {
            return Err(pk("R", pair));
        }
    }
    for (row, rec) in read_table(dir, "Point", &POINT_HEADER)? {
        let f = Fields::new("Point", row, &rec);
        let pid = ElementId::at(f.text(0), f.lod(1)?);
        let p = PointRow {
            pid: pid.clone(),
            x: f.real(2)?,
            y: f.real(3)?,
            z: f.real(4)?,
            t: f.real(5)?,
        };
        if store.points.insert(pid.clone(), p).is_some() {
            return Err(pk("Point", pid));
        }
    }
    for (row, rec) in read_table(dir, "DelX", &DELX_HEADER)? {
        let f = Fields::new("DelX", row, &rec);
        let key = (ElementId::at(f.text(0), f.lod(1)?), f.text(2));
        if !store.del_x.insert(key.clone()) {
            return Err(pk("DelX", format!("{} {}", key.0, key.1)));
        }
    }
    for (row, rec) in read_table(dir, "DelR", &DELR_HEADER)? {
        let f = Fields::new("DelR", row, &rec);
        let key = (f.pair(0, 1, 2)?, f.text(3));
        if !store.del_r.insert(key.clone()) {
            return Err(pk("DelR", format!("{} {}", key.0, key.1)));
        }
    }
    for (_, rec) in read_table(dir, "VX", &VX_HEADER)? {
        let v = rec[0].to_string();
        if !store.vx.insert(v.clone()) {
            return Err(pk("VX", v));
        }
    }
    for (_, rec) in read_table(dir, "VR", &VR_HEADER)? {
        let t = (rec[0].to_string(), rec[1].to_string());
        if !store.vr.insert(t.clone()) {
            return Err(pk("VR", format!("{} {}", t.0, t.1)));
        }
    }
    if dir.join("Atts.csv").exists() {
        for (row, rec) in read_table(dir, "Atts", &ATTS_HEADER)? {
            let f = Fields::new("Atts", row, &rec);
            let key = ElementId::at(f.text(0), f.lod(1)?);
            let name = f.text(2);
            let attrs = store.atts.entry(key.clone()).or_default();
            if attrs.insert(name.clone(), decode_scalar(&rec[3])).is_some() {
                return Err(pk("Atts", format!("{key} {name}")));
            }
        }
    }
    Ok(store)
}

fn pk(table: &'static str, row: impl ToString) -> Error {
    Error::PrimaryKey {
        table,
        row: row.to_string(),
    }
}

fn read_table(dir: &Path, table: &'static str, header: &[&'static str]) -> Result<Vec<(usize, StringRecord)>> {
    let path = dir.join(format!("{table}.csv"));
    let io = |e: &dyn std::fmt::Display| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut reader = ReaderBuilder::new()
        .has_headers(true)
        .from_path(&path)
        .map_err(|e| io(&e))?;
    let found: Vec<String> = reader
        .headers()
        .map_err(|e| io(&e))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header {
        return Err(Error::BadHeader {
            table,
            expected: header.to_vec(),
            found,
        });
    }
    reader
        .records()
        .enumerate()
        .map(|(i, rec)| {
            rec.map(|r| (i + 1, r)).map_err(|e| Error::BadRow {
                table,
                row: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

struct Fields<'a> {
    table: &'static str,
    row: usize,
    rec: &'a StringRecord,
}

impl<'a> Fields<'a> {
    fn new(table: &'static str, row: usize, rec: &'a StringRecord) -> Self {
        Self { table, row, rec }
    }

    fn bad(&self, message: impl Into<String>) -> Error {
        Error::BadRow {
            table: self.table,
            row: self.row,
            message: message.into(),
        }
    }

    fn text(&self, i: usize) -> String {
        self.rec[i].to_string()
    }

    fn opt(&self, i: usize) -> Option<String> {
        Some(&self.rec[i]).filter(|s| !s.is_empty()).map(str::to_string)
    }

    fn lod(&self, i: usize) -> Result<u32> {
        self.rec[i]
            .parse()
            .map_err(|_| self.bad(format!("bad level of detail {:?}", &self.rec[i])))
    }

    fn real(&self, i: usize) -> Result<f64> {
        self.rec[i]
            .parse()
            .map_err(|_| self.bad(format!("bad number {:?}", &self.rec[i])))
    }

    fn pair(&self, a: usize, b: usize, lod: usize) -> Result<BoundedByPair> {
        let lod = self.lod(lod)?;
        Ok(BoundedByPair {
            ida: ElementId::at(self.text(a), lod),
            idb: ElementId::at(self.text(b), lod),
        })
    }
}

/// Attribute values keep their type: integers and floats are written as
/// literals, strings that would read back as a number (or start with a quote)
/// get a leading `'`.
pub fn encode_scalar(v: &Scalar) -> String {
    match v {
        Scalar::Int(i) => i.to_string(),
        Scalar::Float(x) => format!("{x:?}"),
        Scalar::Str(s) => {
            if s.starts_with('\'') || s.parse::<i64>().is_ok() || s.parse::<f64>().is_ok() {
                format!("'{s}")
            } else {
                s.clone()
            }
        }
    }
}

pub fn decode_scalar(s: &str) -> Scalar {
    if let Some(rest) = s.strip_prefix('\'') {
        Scalar::Str(rest.to_string())
    } else if let Ok(i) = s.parse::<i64>() {
        Scalar::Int(i)
    } else if let Ok(x) = s.parse::<f64>() {
        Scalar::Float(x)
    } else {
        Scalar::Str(s.to_string())
    }
}

/// Writes every table, creating `dir` if needed.
pub fn save(store: &VersionStore, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let lod = |k: &ElementId| k.lod.to_string();

    write_table(
        dir,
        "X",
        &X_HEADER,
        store.x.iter().map(|(k, row)| {
            let (gid, glod) = match &row.gen_target {
                Some(g) => (g.id.clone(), lod(g)),
                None => (String::new(), String::new()),
            };
            vec![k.id.clone(), lod(k), gid, glod, row.version.clone()]
        }),
    )?;
    write_table(
        dir,
        "R",
        &R_HEADER,
        store
            .r
            .iter()
            .map(|(p, v)| vec![p.ida.id.clone(), p.idb.id.clone(), lod(&p.ida), v.clone()]),
    )?;
    write_table(
        dir,
        "Point",
        &POINT_HEADER,
        store.points.values().map(|p| {
            vec![
                p.pid.id.clone(),
                lod(&p.pid),
                p.x.to_string(),
                p.y.to_string(),
                p.z.to_string(),
                p.t.to_string(),
            ]
        }),
    )?;
    write_table(
        dir,
        "DelX",
        &DELX_HEADER,
        store.del_x.iter().map(|(k, v)| vec![k.id.clone(), lod(k), v.clone()]),
    )?;
    write_table(
        dir,
        "DelR",
        &DELR_HEADER,
        store
            .del_r
            .iter()
            .map(|(p, v)| vec![p.ida.id.clone(), p.idb.id.clone(), lod(&p.ida), v.clone()]),
    )?;
    write_table(dir, "VX", &VX_HEADER, store.vx.iter().map(|v| vec![v.clone()]))?;
    write_table(
        dir,
        "VR",
        &VR_HEADER,
        store.vr.iter().map(|(a, b)| vec![a.clone(), b.clone()]),
    )?;
    write_table(
        dir,
        "Atts",
        &ATTS_HEADER,
        store.atts.iter().flat_map(|(k, attrs)| {
            attrs
                .iter()
                .map(move |(name, value)| vec![k.id.clone(), lod(k), name.clone(), encode_scalar(value)])
        }),
    )
}

fn write_table(dir: &Path, table: &str, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let path = dir.join(format!("{table}.csv"));
    let io = |e: &dyn std::fmt::Display| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut w = WriterBuilder::new().from_path(&path).map_err(|e| io(&e))?;
    w.write_record(header).map_err(|e| io(&e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_keep_their_type() {
        for v in [
            Scalar::Int(-3),
            Scalar::Float(0.5),
            Scalar::Float(1.0),
            Scalar::Float(1e-300),
            Scalar::Float(f64::INFINITY),
            Scalar::from("hello"),
            Scalar::from("42"),
            Scalar::from("1.5"),
            Scalar::from("inf"),
            Scalar::from("'quoted"),
            Scalar::from(""),
        ] {
            assert_eq!(decode_scalar(&encode_scalar(&v)), v, "{v:?}");
        }
        assert_eq!(encode_scalar(&Scalar::from("42")), "'42");
        assert_eq!(encode_scalar(&Scalar::Float(2.0)), "2.0");
    }

    #[test]
    fn round_trip_of_demo_store() {
        let store = crate::demo::text_store();
        let dir = tempfile::tempdir().unwrap();
        save(&store, dir.path()).unwrap();
        assert_eq!(load(dir.path()).unwrap(), store);
    }

    #[test]
    fn bad_header_is_reported() {
        let store = crate::demo::text_store();
        let dir = tempfile::tempdir().unwrap();
        save(&store, dir.path()).unwrap();
        fs::write(dir.path().join("VX.csv"), "ver\nv0\n").unwrap();
        assert!(matches!(load(dir.path()), Err(Error::BadHeader { table: "VX", .. })));
    }

    #[test]
    fn missing_file_and_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load(dir.path()), Err(Error::Io { .. })));
        save(&VersionStore::default(), dir.path()).unwrap();
        fs::write(dir.path().join("X.csv"), "id,lod,gid,glod,version\na,x,,,v0\n").unwrap();
        assert!(matches!(
            load(dir.path()),
            Err(Error::BadRow { table: "X", row: 1, .. })
        ));
        fs::write(dir.path().join("X.csv"), "id,lod,gid,glod,version\na,0,b,,v0\n").unwrap();
        assert!(matches!(load(dir.path()), Err(Error::BadRow { .. })));
        fs::write(
            dir.path().join("X.csv"),
            "id,lod,gid,glod,version\na,0,,,v0\na,0,,,v0\n",
        )
        .unwrap();
        assert!(matches!(load(dir.path()), Err(Error::PrimaryKey { table: "X", .. })));
    }

    #[test]
    fn unknown_endpoint_is_a_foreign_key_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = crate::demo::text_store();
        store.r.insert(BoundedByPair::new("zz", "1"), "v0".into());
        save(&store, dir.path()).unwrap();
        match load(dir.path()) {
            Err(Error::ForeignKey { table: "R", key, .. }) => assert_eq!(key, "R.ida→X"),
            other => panic!("{other:?}"),
        }
    }
}
