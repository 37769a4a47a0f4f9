//! Random small Croissant documents for round-trip properties: FileObjects
//! `fo0..`, an optional FileSet inside the first one, and record sets whose
//! fields read columns or file names.

use proptest::prelude::*;
use serde_json::{json, Value};

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,6}"
}

fn text() -> impl Strategy<Value = String> {
    prop_oneof!["[ -~]{0,12}", "[a-zé漢 ]{1,6}"]
}

const TYPES: [&str; 8] =
    ["sc:Text", "sc:Integer", "sc:Float", "sc:Date", "sc:ImageObject", "cr:BoundingBox", "cr:Split", "sc:Boolean"];

#[derive(Debug, Clone)]
struct FieldSpec {
    name: String,
    ty: Option<usize>,
    column: Option<String>,
    regex: bool,
    sub: Vec<(String, Option<usize>)>,
}

fn field_spec() -> impl Strategy<Value = FieldSpec> {
    (
        ident(),
        proptest::option::of(0..TYPES.len()),
        proptest::option::of(ident()),
        any::<bool>(),
        proptest::collection::vec((ident(), proptest::option::of(0..TYPES.len())), 0..3),
    )
        .prop_map(|(name, ty, column, regex, sub)| FieldSpec { name, ty, column, regex, sub })
}

pub fn document() -> impl Strategy<Value = Value> {
    (
        text(),
        proptest::option::of(text()),
        proptest::collection::vec((any::<bool>(), proptest::option::of("[0-9a-f]{64}")), 1..4),
        any::<bool>(),
        proptest::collection::vec(proptest::collection::vec(field_spec(), 0..4), 0..3),
        proptest::collection::vec("[a-z]{2,5}", 0..3),
    )
        .prop_map(|(name, description, fos, with_fs, rss, licenses)| {
            let mut distribution: Vec<Value> = fos
                .iter()
                .enumerate()
                .map(|(i, (tar, sha))| {
                    let mut fo = json!({
                        "@type": "cr:FileObject",
                        "@id": format!("fo{i}"),
                        "contentUrl": format!("https://example.org/fo{i}"),
                        "encodingFormat": if *tar { "application/x-tar" } else { "text/csv" },
                    });
                    if let Some(sha) = sha {
                        fo["sha256"] = json!(sha);
                    }
                    fo
                })
                .collect();
            if with_fs {
                distribution.push(json!({
                    "@type": "cr:FileSet", "@id": "files", "containedIn": {"@id": "fo0"},
                    "includes": ["*.jpg", "**/*.png"], "encodingFormat": "image/jpeg",
                }));
            }
            let record_sets: Vec<Value> = rss
                .iter()
                .enumerate()
                .map(|(r, fields)| {
                    let rs = format!("rs{r}");
                    let mut seen = std::collections::BTreeSet::new();
                    let fields: Vec<Value> = fields
                        .iter()
                        .filter(|f| seen.insert(f.name.clone()))
                        .map(|f| {
                            let id = format!("{rs}/{}", f.name);
                            let mut field = json!({"@type": "cr:Field", "@id": id});
                            if let Some(t) = f.ty {
                                field["dataType"] = json!(TYPES[t]);
                            }
                            let mut sub_seen = std::collections::BTreeSet::new();
                            let subs: Vec<Value> = f
                                .sub
                                .iter()
                                .filter(|(n, _)| sub_seen.insert(n.clone()))
                                .map(|(n, t)| {
                                    let mut s = json!({
                                        "@type": "cr:Field", "@id": format!("{id}/{n}"),
                                        "source": {"fileObject": {"@id": "fo0"}, "extract": {"column": n}},
                                    });
                                    if let Some(t) = t {
                                        s["dataType"] = json!(TYPES[*t]);
                                    }
                                    s
                                })
                                .collect();
                            if !subs.is_empty() {
                                field["subField"] = Value::Array(subs);
                            } else if f.column.is_none() && with_fs {
                                let mut source =
                                    json!({"fileSet": {"@id": "files"}, "extract": {"fileProperty": "filename"}});
                                if f.regex {
                                    source["transform"] = json!({"regex": "^(.*)\\.jpg$"});
                                }
                                field["source"] = source;
                            } else {
                                let c = f.column.as_deref().unwrap_or(&f.name);
                                field["source"] = json!({"fileObject": {"@id": "fo0"}, "extract": {"column": c}});
                            }
                            field
                        })
                        .collect();
                    json!({"@type": "cr:RecordSet", "@id": rs, "field": fields})
                })
                .collect();
            let mut doc = json!({
                "@type": "sc:Dataset",
                "name": name,
                "conformsTo": "http://mlcommons.org/croissant/1.0",
                "distribution": distribution,
                "recordSet": record_sets,
            });
            if let Some(d) = description {
                doc["description"] = json!(d);
            }
            match licenses.len() {
                0 => {}
                1 => doc["license"] = json!(licenses[0]),
                _ => doc["license"] = json!(licenses),
            }
            doc
        })
}
