//! Rendering of values as human summaries or CSV.

use std::collections::BTreeSet;
use std::path::Path;

use alexdb_core::storage::{save, VersionStore};
use alexdb_core::{ElementId, Space};

use crate::error::CliError;
use crate::eval::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Summary,
    Csv,
}

fn braces(items: impl IntoIterator<Item = impl ToString>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn number(x: f64) -> String {
    format!("{x}")
}

fn space_summary(space: &Space) -> String {
    let dim = match space.krull_dimension() {
        Ok(d) => d.to_string(),
        Err(_) => "undefined".into(),
    };
    format!(
        "space: {} elements, {} pairs, dimension {dim}\nelements: {}\npairs: {}",
        space.len(),
        space.relation().len(),
        braces(space.ids()),
        braces(space.relation()),
    )
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 input")
}

fn space_csv(space: &Space) -> String {
    let elements = csv_table(&["id"], space.ids().map(|x| vec![x.to_string()]));
    let pairs = csv_table(
        &["ida", "idb"],
        space
            .relation()
            .iter()
            .map(|p| vec![p.ida.to_string(), p.idb.to_string()]),
    );
    format!("{elements}\n{pairs}")
}

fn set_csv(set: &BTreeSet<ElementId>) -> String {
    csv_table(&["id"], set.iter().map(|x| vec![x.to_string()]))
}

pub fn render(value: &Value, format: Format) -> String {
    let out = match (value, format) {
        (Value::Store(store), Format::Summary) => {
            let heads = store
                .version_space()
                .map(|vs| braces(vs.heads()))
                .unwrap_or_else(|e| e.to_string());
            format!(
                "store: {} versions, heads {heads}, {} elements, {} pairs",
                store.vx.len(),
                store.x.len(),
                store.r.len()
            )
        }
        (Value::Store(store), Format::Csv) => csv_table(&["version"], store.vx.iter().map(|v| vec![v.clone()])),
        (Value::Space { space, .. }, Format::Summary) => space_summary(space),
        (Value::Space { space, .. }, Format::Csv) => space_csv(space),
        (Value::Merged { space, report }, Format::Summary) => format!("{}\n{}", space_summary(space), report),
        (Value::Merged { space, report }, Format::Csv) => {
            let rows = report
                .inherent
                .iter()
                .map(|c| vec!["inherent".to_string(), format!("{} {}", c.element, c.attribute)])
                .chain(
                    report
                        .consistency
                        .iter()
                        .map(|c| vec![c.rule.clone(), braces(&c.witness)]),
                );
            format!("{}\n{}", space_csv(space), csv_table(&["conflict", "witness"], rows))
        }
        (Value::Set(s), Format::Summary) => braces(s),
        (Value::Set(s), Format::Csv) => set_csv(s),
        (Value::Map(m), Format::Summary) => {
            let lines: Vec<String> = m.mapping().iter().map(|(x, y)| format!("{x} -> {y}")).collect();
            format!(
                "map: {} -> {} elements\n{}",
                m.source().len(),
                m.target().len(),
                lines.join("\n")
            )
        }
        (Value::Map(m), Format::Csv) => csv_table(
            &["id", "image"],
            m.mapping().iter().map(|(x, y)| vec![x.to_string(), y.to_string()]),
        ),
        (Value::Number(x), Format::Summary) => number(*x),
        (Value::Number(x), Format::Csv) => csv_table(&["value"], [vec![number(*x)]]),
        (Value::Flag(b), Format::Summary) => (if *b { "Yes" } else { "No" }).into(),
        (Value::Flag(b), Format::Csv) => csv_table(&["value"], [vec![(if *b { "Yes" } else { "No" }).into()]]),
        (Value::Report(r), Format::Summary) => {
            if r.is_clean() {
                "ok".into()
            } else {
                let lines: Vec<&str> = r.rows.iter().map(|(_, d)| d.as_str()).collect();
                lines.join("\n")
            }
        }
        (Value::Report(r), Format::Csv) => csv_table(
            &["rule", "detail"],
            r.rows.iter().map(|(k, d)| vec![k.clone(), d.clone()]),
        ),
        (Value::Text(t), Format::Summary) => t.clone(),
        (Value::Text(t), Format::Csv) => csv_table(&["value"], [vec![t.clone()]]),
    };
    out.trim_end_matches('\n').to_string()
}

/// Writes spaces and stores as store directories.
pub fn write_out(value: &Value, dir: &Path, version: &str) -> Result<(), CliError> {
    let store = match value {
        Value::Store(s) => (**s).clone(),
        Value::Space { space, points } => VersionStore::initial(version, space).with_points(points.iter().cloned()),
        Value::Merged { space, .. } => VersionStore::initial(version, space),
        other => {
            return Err(CliError::Usage(format!(
                "a {} cannot be written as a store",
                other.kind()
            )))
        }
    };
    save(&store, dir)?;
    Ok(())
}
