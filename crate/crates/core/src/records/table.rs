//! Row-oriented readers for tabular sources: CSV, TSV, JSON arrays of
//! objects and JSON lines.

use std::path::Path;

use indexmap::IndexMap;
use serde_json::Value as Json;

use super::raw::Raw;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Tsv,
    JsonArray,
    JsonLines,
}

impl TableFormat {
    pub fn from_format(format: &str) -> Option<TableFormat> {
        let base = format.split(';').next().unwrap_or_default().trim().to_ascii_lowercase();
        Some(match base.as_str() {
            "text/csv" => TableFormat::Csv,
            "text/tab-separated-values" => TableFormat::Tsv,
            "application/json" => TableFormat::JsonArray,
            "application/jsonlines" | "application/x-ndjson" | "application/x-jsonlines" => TableFormat::JsonLines,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Raw>>,
}

const MISSING: Raw = Raw::Missing;

impl Table {
    pub fn read(path: &Path, format: TableFormat) -> Result<Table, String> {
        let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
        Table::parse(&bytes, format)
    }

    pub fn parse(bytes: &[u8], format: TableFormat) -> Result<Table, String> {
        let bytes = bytes.strip_prefix(b"\xef\xbb\xbf").unwrap_or(bytes);
        match format {
            TableFormat::Csv => delimited(bytes, b','),
            TableFormat::Tsv => delimited(bytes, b'\t'),
            TableFormat::JsonArray => {
                let doc: Json = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
                match doc {
                    Json::Array(items) => objects(items),
                    _ => Err("expected a JSON array of objects".into()),
                }
            }
            TableFormat::JsonLines => {
                let text = std::str::from_utf8(bytes).map_err(|e| e.to_string())?;
                let items = text
                    .lines()
                    .enumerate()
                    .filter(|(_, l)| !l.trim().is_empty())
                    .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
                    .collect::<Result<Vec<Json>, _>>()?;
                objects(items)
            }
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cell(&self, row: usize, col: usize) -> &Raw {
        self.rows[row].get(col).unwrap_or(&MISSING)
    }
}

fn delimited(bytes: &[u8], delimiter: u8) -> Result<Table, String> {
    let mut r = csv::ReaderBuilder::new().delimiter(delimiter).has_headers(true).from_reader(bytes);
    let columns: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        rows.push(rec.iter().map(|c| Raw::Text(c.to_string())).collect());
    }
    Ok(Table { columns, rows })
}

fn objects(items: Vec<Json>) -> Result<Table, String> {
    let mut index: IndexMap<String, ()> = IndexMap::new();
    let mut maps = Vec::with_capacity(items.len());
    for (i, item) in items.into_iter().enumerate() {
        match item {
            Json::Object(m) => {
                for k in m.keys() {
                    index.entry(k.clone()).or_default();
                }
                maps.push(m);
            }
            _ => return Err(format!("row {i} is not a JSON object")),
        }
    }
    let columns: Vec<String> = index.into_keys().collect();
    let rows = maps
        .into_iter()
        .map(|mut m| columns.iter().map(|c| m.remove(c).map(Raw::Json).unwrap_or(Raw::Missing)).collect())
        .collect();
    Ok(Table { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_cells_are_text() {
        let t = Table::parse(b"\xef\xbb\xbfhash,latitude,longitude\nabc123,48.85,2.35\n\"q,x\",,1\n", TableFormat::Csv)
            .unwrap();
        assert_eq!(t.columns(), ["hash", "latitude", "longitude"]);
        assert_eq!(t.len(), 2);
        assert_eq!(t.cell(0, t.column("latitude").unwrap()), &Raw::Text("48.85".into()));
        assert_eq!(t.cell(1, 0), &Raw::Text("q,x".into()));
        assert_eq!(t.cell(1, 1), &Raw::Text(String::new()));
    }

    #[test]
    fn ragged_csv_is_rejected() {
        assert!(Table::parse(b"a,b\n1\n", TableFormat::Csv).is_err());
    }

    #[test]
    fn json_rows_union_their_keys() {
        let t = Table::parse(br#"[{"a":1},{"b":"x","a":2}]"#, TableFormat::JsonArray).unwrap();
        assert_eq!(t.columns(), ["a", "b"]);
        assert_eq!(t.cell(0, 1), &Raw::Missing);
        assert_eq!(t.cell(1, 1), &Raw::Json(json!("x")));
        let t = Table::parse(b"{\"a\":1}\n\n{\"a\":2}\n", TableFormat::JsonLines).unwrap();
        assert_eq!(t.len(), 2);
        assert!(Table::parse(b"{\"a\":1}", TableFormat::JsonArray).is_err());
    }
}
