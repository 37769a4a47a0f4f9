//! Bootstraps resources and RecordSets from an uploaded file.
//!
//! A table becomes one FileObject and one RecordSet with a column-sourced
//! field per column, typed by sniffing every value. An archive becomes one
//! FileObject and one FileSet per file extension.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value as Json};

use crate::records::{Raw, Table, TableFormat};
use crate::resources::{sha256_file, Archive, ArchiveError, ArchiveKind};

#[derive(Debug, thiserror::Error)]
pub enum InferError {
    #[error("cannot infer a description for `{0}`: expected a CSV, TSV or JSON-lines table, or a tar/zip archive")]
    Unsupported(String),
    #[error("cannot read table `{file}`: {reason}")]
    Table { file: String, reason: String },
    #[error(transparent)]
    Archive(#[from] ArchiveError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What an upload looks like, judged by its file name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UploadKind {
    Table(TableFormat),
    Archive(ArchiveKind),
}

impl UploadKind {
    pub fn of(filename: &str) -> Option<UploadKind> {
        let lower = filename.to_ascii_lowercase();
        let ext = |s: &str| lower.ends_with(s);
        Some(if ext(".csv") {
            UploadKind::Table(TableFormat::Csv)
        } else if ext(".tsv") {
            UploadKind::Table(TableFormat::Tsv)
        } else if ext(".jsonl") || ext(".ndjson") {
            UploadKind::Table(TableFormat::JsonLines)
        } else if ext(".tar.gz") || ext(".tgz") {
            UploadKind::Archive(ArchiveKind::TarGz)
        } else if ext(".tar") {
            UploadKind::Archive(ArchiveKind::Tar)
        } else if ext(".zip") {
            UploadKind::Archive(ArchiveKind::Zip)
        } else {
            return None;
        })
    }

    pub fn encoding_format(self) -> &'static str {
        match self {
            UploadKind::Table(TableFormat::Csv) => "text/csv",
            UploadKind::Table(TableFormat::Tsv) => "text/tab-separated-values",
            UploadKind::Table(TableFormat::JsonArray) => "application/json",
            UploadKind::Table(TableFormat::JsonLines) => "application/jsonlines",
            UploadKind::Archive(ArchiveKind::Tar) => "application/x-tar",
            UploadKind::Archive(ArchiveKind::TarGz) => "application/x-gzip",
            UploadKind::Archive(ArchiveKind::Zip) | UploadKind::Archive(ArchiveKind::Directory) => "application/zip",
        }
    }
}

/// Guesses a dataType from every non-empty value of a column.
pub fn sniff<'a>(values: impl IntoIterator<Item = &'a str>) -> &'static str {
    let values: Vec<&str> = values.into_iter().map(str::trim).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return "sc:Text";
    }
    let all = |f: fn(&str) -> bool| values.iter().all(|v| f(v));
    if all(|v| v.parse::<i64>().is_ok()) {
        "sc:Integer"
    } else if all(|v| v.parse::<f64>().is_ok_and(f64::is_finite)) {
        "sc:Float"
    } else if all(|v| chrono::NaiveDate::parse_from_str(v, "%Y-%m-%d").is_ok()) {
        "sc:Date"
    } else if all(|v| matches!(v.to_ascii_lowercase().as_str(), "true" | "false")) {
        "sc:Boolean"
    } else {
        "sc:Text"
    }
}

fn mime_for_extension(ext: &str) -> &'static str {
    match ext {
        "jpg" | "jpeg" => "image/jpeg",
        "png" => "image/png",
        "gif" => "image/gif",
        "json" => "application/json",
        "jsonl" => "application/jsonlines",
        "csv" => "text/csv",
        "tsv" => "text/tab-separated-values",
        "txt" => "text/plain",
        "wav" => "audio/wav",
        "mp3" => "audio/mpeg",
        "parquet" => "application/x-parquet",
        _ => "application/octet-stream",
    }
}

fn stem(filename: &str) -> &str {
    let base = filename.rsplit(['/', '\\']).next().unwrap_or(filename);
    base.split('.').next().filter(|s| !s.is_empty()).unwrap_or(base)
}

fn file_object(filename: &str, kind: UploadKind, sha256: &str) -> Json {
    json!({
        "@type": "cr:FileObject",
        "@id": filename,
        "name": filename,
        "contentUrl": filename,
        "encodingFormat": kind.encoding_format(),
        "sha256": sha256,
    })
}

fn cell_text(raw: &Raw) -> Option<String> {
    match raw {
        Raw::Text(s) => Some(s.clone()),
        Raw::Json(Json::String(s)) => Some(s.clone()),
        Raw::Json(Json::Null) | Raw::Missing => None,
        Raw::Json(j) => Some(j.to_string()),
        _ => None,
    }
}

/// Infers `{"distribution": [...], "recordSet": [...]}` for the file at
/// `path`, uploaded as `filename`.
pub fn infer(filename: &str, path: &Path) -> Result<Json, InferError> {
    let kind = UploadKind::of(filename).ok_or_else(|| InferError::Unsupported(filename.to_string()))?;
    let sha = sha256_file(path)?;
    let fo = file_object(filename, kind, &sha);
    match kind {
        UploadKind::Table(format) => {
            let table =
                Table::read(path, format).map_err(|reason| InferError::Table { file: filename.to_string(), reason })?;
            let rs = stem(filename);
            let fields: Vec<Json> = table
                .columns()
                .iter()
                .enumerate()
                .map(|(c, name)| {
                    let texts: Vec<String> = (0..table.len()).filter_map(|r| cell_text(table.cell(r, c))).collect();
                    json!({
                        "@type": "cr:Field",
                        "@id": format!("{rs}/{name}"),
                        "name": name,
                        "dataType": sniff(texts.iter().map(String::as_str)),
                        "source": {"fileObject": {"@id": filename}, "extract": {"column": name}},
                    })
                })
                .collect();
            Ok(json!({
                "distribution": [fo],
                "recordSet": [{"@type": "cr:RecordSet", "@id": rs, "name": rs, "field": fields}],
            }))
        }
        UploadKind::Archive(_) => {
            let archive = Archive::open(path, Some(kind.encoding_format()))?;
            // extension -> whether every match sits at the archive root
            let mut by_ext: BTreeMap<String, bool> = BTreeMap::new();
            for member in archive.members()? {
                let name = member.rsplit('/').next().unwrap_or(&member);
                let Some((_, ext)) = name.rsplit_once('.') else { continue };
                if ext.is_empty() || name.starts_with('.') {
                    continue;
                }
                let at_root = !member.contains('/');
                let entry = by_ext.entry(ext.to_ascii_lowercase()).or_insert(true);
                *entry &= at_root;
            }
            let mut distribution = vec![fo];
            for (ext, at_root) in by_ext {
                distribution.push(json!({
                    "@type": "cr:FileSet",
                    "@id": format!("{ext}-files"),
                    "name": format!("{ext}-files"),
                    "containedIn": {"@id": filename},
                    "includes": if at_root { format!("*.{ext}") } else { format!("**/*.{ext}") },
                    "encodingFormat": mime_for_extension(&ext),
                }));
            }
            Ok(json!({"distribution": distribution, "recordSet": []}))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sniffing_table() {
        assert_eq!(sniff(["1", "2", ""]), "sc:Integer");
        assert_eq!(sniff(["1", "2.5"]), "sc:Float");
        assert_eq!(sniff(["2024-01-02", "2023-12-31"]), "sc:Date");
        assert_eq!(sniff(["true", "False"]), "sc:Boolean");
        assert_eq!(sniff(["1", "x"]), "sc:Text");
        assert_eq!(sniff(["", " "]), "sc:Text");
        assert_eq!(sniff(["NaN"]), "sc:Text");
    }

    #[test]
    fn upload_kinds() {
        assert_eq!(UploadKind::of("a.CSV"), Some(UploadKind::Table(TableFormat::Csv)));
        assert_eq!(UploadKind::of("a.tar.gz"), Some(UploadKind::Archive(ArchiveKind::TarGz)));
        assert_eq!(UploadKind::of("a.bin"), None);
        assert_eq!(stem("dir/data.v1.csv"), "data");
    }
}
