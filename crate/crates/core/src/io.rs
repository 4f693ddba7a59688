//! JSON documents for algebras, median spaces, wall spaces and reports.
//!
//! Every document is an object with `"version": "1"` and a `"kind"`. Rationals
//! are strings `"p"` or `"p/q"`. Emission is canonical: keys sorted, fixed
//! layout, trailing newline.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::algebra::MedianTable;
use crate::bitset::BitSet;
use crate::duality::{MeasuredWall, WallSpace};
use crate::error::{Error, Result};
use crate::metric::FiniteMedianSpace;
use crate::rational::Rational;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    /// A median table, not yet validated.
    Algebra(MedianTable),
    /// A distance matrix, not yet validated, with an optional median table.
    MedianSpace {
        labels: Vec<String>,
        dist: Vec<Vec<Rational>>,
        table: Option<MedianTable>,
    },
    WallSpace(WallSpace),
    Report(Value),
}

impl Document {
    pub fn from_space(space: &FiniteMedianSpace) -> Self {
        Document::MedianSpace {
            labels: space.labels().to_vec(),
            dist: space.dist_matrix(),
            table: None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Document::Algebra(_) => "algebra",
            Document::MedianSpace { .. } => "median_space",
            Document::WallSpace(_) => "wall_space",
            Document::Report(_) => "report",
        }
    }
}

fn schema(field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(key, "missing"))
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(field, "expected an array"))
}

fn string<'a>(v: &'a Value, field: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(field, "expected a string"))
}

fn rational(v: &Value, field: &str) -> Result<Rational> {
    string(v, field)?.parse().map_err(|e: crate::rational::ParseRationalError| schema(field, e.to_string()))
}

fn points(obj: &Map<String, Value>) -> Result<(Vec<String>, HashMap<String, usize>)> {
    let raw = array(get(obj, "points")?, "points")?;
    if raw.is_empty() {
        return Err(schema("points", "at least one point is required"));
    }
    let mut labels = Vec::with_capacity(raw.len());
    let mut index = HashMap::new();
    for (i, v) in raw.iter().enumerate() {
        let field = format!("points[{i}]");
        let name = string(v, &field)?.to_string();
        if index.insert(name.clone(), i).is_some() {
            return Err(schema(&field, format!("duplicate point {name:?}")));
        }
        labels.push(name);
    }
    Ok((labels, index))
}

fn point_ref(v: &Value, field: &str, index: &HashMap<String, usize>) -> Result<usize> {
    let name = string(v, field)?;
    index.get(name).copied().ok_or_else(|| schema(field, format!("unknown point {name:?}")))
}

fn allow_keys(obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(k, "unexpected field")),
        None => Ok(()),
    }
}

fn median(obj: &Map<String, Value>, labels: &[String], index: &HashMap<String, usize>) -> Result<MedianTable> {
    let n = labels.len();
    match string(get(obj, "median")?, "median")? {
        "table" => {
            let rows = array(get(obj, "table")?, "table")?;
            if rows.len() != n {
                return Err(schema("table", format!("expected {n} rows")));
            }
            let mut entries = Vec::with_capacity(n * n * n);
            for (x, row) in rows.iter().enumerate() {
                let row = array(row, &format!("table[{x}]"))?;
                if row.len() != n {
                    return Err(schema(&format!("table[{x}]"), format!("expected {n} rows")));
                }
                for (y, col) in row.iter().enumerate() {
                    let field = format!("table[{x}][{y}]");
                    let col = array(col, &field)?;
                    if col.len() != n {
                        return Err(schema(&field, format!("expected {n} entries")));
                    }
                    for (z, e) in col.iter().enumerate() {
                        let v = e
                            .as_u64()
                            .and_then(|v| u32::try_from(v).ok())
                            .ok_or_else(|| schema(&format!("table[{x}][{y}][{z}]"), "expected a point index"))?;
                        entries.push(v);
                    }
                }
            }
            MedianTable::new(labels.to_vec(), entries)
        }
        "edges" => {
            let raw = array(get(obj, "edges")?, "edges")?;
            let mut edges = Vec::with_capacity(raw.len());
            for (i, e) in raw.iter().enumerate() {
                let field = format!("edges[{i}]");
                let pair = array(e, &field)?;
                if pair.len() != 2 {
                    return Err(schema(&field, "expected two point names"));
                }
                edges.push((point_ref(&pair[0], &format!("{field}[0]"), index)?, point_ref(&pair[1], &format!("{field}[1]"), index)?));
            }
            MedianTable::from_graph(labels.to_vec(), &edges)
        }
        other => Err(schema("median", format!("expected \"table\" or \"edges\", got {other:?}"))),
    }
}

/// Parses a document. Syntax errors carry line and column, schema errors
/// the path of the offending field.
pub fn parse(text: &str) -> Result<Document> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = root.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    let version = string(get(obj, "version")?, "version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            found: version.to_string(),
            expected: FORMAT_VERSION.to_string(),
        });
    }
    match string(get(obj, "kind")?, "kind")? {
        "algebra" => {
            allow_keys(obj, &["version", "kind", "points", "median", "table", "edges"])?;
            let (labels, index) = points(obj)?;
            Ok(Document::Algebra(median(obj, &labels, &index)?))
        }
        "median_space" => {
            allow_keys(obj, &["version", "kind", "points", "dist", "median", "table", "edges"])?;
            let (labels, index) = points(obj)?;
            let n = labels.len();
            let rows = array(get(obj, "dist")?, "dist")?;
            if rows.len() != n {
                return Err(schema("dist", format!("expected {n} rows")));
            }
            let mut dist = Vec::with_capacity(n);
            for (x, row) in rows.iter().enumerate() {
                let row = array(row, &format!("dist[{x}]"))?;
                if row.len() != n {
                    return Err(schema(&format!("dist[{x}]"), format!("expected {n} entries")));
                }
                dist.push(row.iter().enumerate().map(|(y, v)| rational(v, &format!("dist[{x}][{y}]"))).collect::<Result<Vec<_>>>()?);
            }
            let table = if obj.contains_key("median") { Some(median(obj, &labels, &index)?) } else { None };
            Ok(Document::MedianSpace { labels, dist, table })
        }
        "wall_space" => {
            allow_keys(obj, &["version", "kind", "points", "walls"])?;
            let (labels, index) = points(obj)?;
            let raw = array(get(obj, "walls")?, "walls")?;
            let mut walls = Vec::with_capacity(raw.len());
            for (i, w) in raw.iter().enumerate() {
                let field = format!("walls[{i}]");
                let wobj = w.as_object().ok_or_else(|| schema(&field, "expected an object"))?;
                let side_field = format!("{field}.side");
                let side = array(wobj.get("side").ok_or_else(|| schema(&side_field, "missing"))?, &side_field)?
                    .iter()
                    .enumerate()
                    .map(|(j, v)| point_ref(v, &format!("{side_field}[{j}]"), &index))
                    .collect::<Result<Vec<_>>>()?;
                let weight_field = format!("{field}.weight");
                let weight = rational(wobj.get("weight").ok_or_else(|| schema(&weight_field, "missing"))?, &weight_field)?;
                walls.push(MeasuredWall {
                    side: BitSet::from_indices(labels.len(), side),
                    weight,
                });
            }
            let space = WallSpace::new(labels, walls).map_err(|e| schema("walls", e.to_string()))?;
            Ok(Document::WallSpace(space))
        }
        "report" => {
            allow_keys(obj, &["version", "kind", "report"])?;
            Ok(Document::Report(get(obj, "report")?.clone()))
        }
        other => Err(schema("kind", format!("unknown kind {other:?}"))),
    }
}

fn table_value(table: &MedianTable) -> Value {
    let n = table.len();
    Value::Array(
        (0..n)
            .map(|x| Value::Array((0..n).map(|y| Value::Array((0..n).map(|z| Value::from(table.raw(x, y, z))).collect())).collect()))
            .collect(),
    )
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    Value::Array(items.into_iter().map(|s| Value::String(s.to_string())).collect())
}

/// The document as a JSON value.
pub fn to_value(doc: &Document) -> Value {
    let mut obj = BTreeMap::new();
    obj.insert("version", Value::from(FORMAT_VERSION));
    obj.insert("kind", Value::from(doc.kind()));
    match doc {
        Document::Algebra(table) => {
            obj.insert("points", strings(table.labels()));
            obj.insert("median", Value::from("table"));
            obj.insert("table", table_value(table));
        }
        Document::MedianSpace { labels, dist, table } => {
            obj.insert("points", strings(labels));
            obj.insert("dist", Value::Array(dist.iter().map(strings).collect()));
            if let Some(t) = table {
                obj.insert("median", Value::from("table"));
                obj.insert("table", table_value(t));
            }
        }
        Document::WallSpace(w) => {
            obj.insert("points", strings(w.labels()));
            let walls = w
                .walls()
                .iter()
                .map(|wall| {
                    let mut m = Map::new();
                    m.insert("side".into(), strings(wall.side.iter().map(|x| &w.labels()[x])));
                    m.insert("weight".into(), Value::String(wall.weight.to_string()));
                    Value::Object(m)
                })
                .collect();
            obj.insert("walls", Value::Array(walls));
        }
        Document::Report(v) => {
            obj.insert("report", v.clone());
        }
    }
    Value::Object(obj.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// Canonical text of a document.
pub fn emit(doc: &Document) -> String {
    emit_value(&to_value(doc))
}

/// Canonical layout of a JSON value: objects one key per line with sorted
/// keys, arrays of scalars on one line.
pub fn emit_value(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&item.to_string());
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&" ".repeat(indent + 2));
                write_value(out, item, indent + 2);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                let _ = write!(out, "{}{}: ", " ".repeat(indent + 2), Value::String((*k).clone()));
                write_value(out, &map[*k], indent + 2);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIPOD: &str = r#"{"version": "1", "kind": "wall_space", "points": ["a", "b", "c"],
        "walls": [{"side": ["a"], "weight": "1"}, {"side": ["b"], "weight": "1"}, {"side": ["c"], "weight": "1"}]}"#;

    #[test]
    fn tripod_parses() {
        let Document::WallSpace(w) = parse(TRIPOD).unwrap() else { panic!("wrong kind") };
        assert_eq!(w.len(), 3);
        assert_eq!(w.walls().len(), 3);
    }

    #[test]
    fn round_trips() {
        let doc = parse(TRIPOD).unwrap();
        let text = emit(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
        assert_eq!(emit(&parse(&text).unwrap()), text);
        let alg = r#"{"version":"1","kind":"algebra","points":["a","b"],"median":"edges","edges":[["a","b"]]}"#;
        let doc = parse(alg).unwrap();
        assert_eq!(parse(&emit(&doc)).unwrap(), doc);
        let space = r#"{"version":"1","kind":"median_space","points":["a","b"],"dist":[["0","1/2"],["1/2","0"]]}"#;
        let doc = parse(space).unwrap();
        assert_eq!(parse(&emit(&doc)).unwrap(), doc);
    }

    #[test]
    fn canonical_layout() {
        let doc = parse(r#"{"kind":"report","version":"1","report":{"b":[1,2],"a":{}}}"#).unwrap();
        assert_eq!(
            emit(&doc),
            "{\n  \"kind\": \"report\",\n  \"report\": {\n    \"a\": {},\n    \"b\": [1, 2]\n  },\n  \"version\": \"1\"\n}\n"
        );
    }

    #[test]
    fn errors() {
        let truncated = &TRIPOD[..40];
        assert!(matches!(parse(truncated), Err(Error::Syntax { line: 1, .. })));
        let v2 = TRIPOD.replace("\"1\", \"kind\"", "\"2\", \"kind\"");
        assert!(matches!(parse(&v2), Err(Error::Version { .. })));
        let bad_point = TRIPOD.replace("[\"b\"]", "[\"z\"]");
        match parse(&bad_point) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "walls[1].side[0]"),
            other => panic!("{other:?}"),
        }
        let bad_weight = TRIPOD.replacen("\"1\"}", "\"1/0\"}", 1);
        assert!(matches!(parse(&bad_weight), Err(Error::Schema { field, .. }) if field == "walls[0].weight"));
        let no_points = r#"{"version":"1","kind":"algebra","median":"table","table":[]}"#;
        assert!(matches!(parse(no_points), Err(Error::Schema { field, .. }) if field == "points"));
        let extra = r#"{"version":"1","kind":"report","report":1,"x":2}"#;
        assert!(matches!(parse(extra), Err(Error::Schema { field, .. }) if field == "x"));
    }

    #[test]
    fn out_of_range_table_entries_parse() {
        let t = r#"{"version":"1","kind":"algebra","points":["a"],"median":"table","table":[[[7]]]}"#;
        let Document::Algebra(table) = parse(t).unwrap() else { panic!() };
        assert!(!crate::algebra::validate(&table).is_ok());
    }
}
