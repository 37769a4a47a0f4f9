mod common;

use std::io::Write;

use common::{fixtures, golden_lines, jsonl, model, resolver};
use croissant_forge::model::SourceKind;
use croissant_forge::records::{self, ReadOptions, RecordsError, SplitSlice};
use croissant_forge::resources::ResourceError;
use croissant_forge::validate::load_and_validate;
use proptest::prelude::*;

fn all(name: &str, record_set: &str) -> Vec<String> {
    jsonl(&model(name), record_set, &ReadOptions::default()).unwrap()
}

fn sliced(expr: &str) -> Vec<String> {
    let options = ReadOptions { split: Some(SplitSlice::parse(expr).unwrap()), ..Default::default() };
    jsonl(&model("split10.json"), "examples", &options).unwrap()
}

#[test]
fn pass_join_matches_oracle() {
    assert_eq!(all("pass.json", "images"), golden_lines("pass.records.jsonl"));
}

#[test]
fn minipass_join_matches_oracle_in_order() {
    let got = all("minipass.json", "images");
    assert_eq!(got.len(), 5);
    assert_eq!(got, golden_lines("minipass.records.jsonl"));
}

#[test]
fn dropping_a_csv_row_drops_one_record() {
    let full = all("minipass.json", "images");
    let dropped = all("minipass-drop.json", "images");
    assert_eq!(dropped, golden_lines("minipass-drop.records.jsonl"));
    assert_eq!(full.len() - dropped.len(), 1);
    assert!(dropped.iter().all(|r| !r.contains("\"images/hash\":\"bb\"")));
}

#[test]
fn unmatched_rows_give_no_records() {
    assert!(all("minipass-nomatch.json", "images").is_empty());
    assert!(golden_lines("minipass-nomatch.records.jsonl").is_empty());
}

#[test]
fn limit_takes_a_prefix() {
    let options = ReadOptions { limit: Some(2), ..Default::default() };
    let got = jsonl(&model("minipass.json"), "images", &options).unwrap();
    assert_eq!(got, golden_lines("minipass.limit2.jsonl"));
}

#[test]
fn plan_drives_from_the_file_set() {
    let m = model("pass.json");
    let cache = tempfile::tempdir().unwrap();
    let plan = records::plan(&m, "images", &resolver(&cache)).unwrap();
    assert_eq!(plan.root_source(), Some(&(SourceKind::FileSet, "image-files".to_string())));
    assert_eq!(plan.joins.len(), 1);
    assert_eq!(plan.joins[0].target, (SourceKind::FileObject, "metadata".to_string()));
    assert_eq!(plan.joins[0].on, "metadata.hash");
    assert!(!plan.joins[0].filter_only);
    assert_eq!(plan.field_ids().collect::<Vec<_>>(), ["images/image_content", "images/hash", "images/coordinates"]);
}

#[test]
fn coco_bounding_boxes_match_oracle() {
    let got = all("coco.json", "images_with_bounding_box");
    assert_eq!(got, golden_lines("coco.records.jsonl"));
    assert_eq!(got.len(), 10);
    for line in &got {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["images_with_bounding_box/image_id"].is_i64());
        assert_eq!(v["images_with_bounding_box/bbox"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn record_set_can_be_named_by_name() {
    assert_eq!(all("coco.json", "images_with_bounding_box").len(), 10);
}

#[test]
fn percent_slice_of_ten() {
    assert_eq!(sliced("default[:80%]").len(), 8);
    assert_eq!(sliced("default[:80%]"), golden_lines("split10.records.jsonl")[..8]);
    assert_eq!(sliced("examples[2:5]"), golden_lines("split10.records.jsonl")[2..5]);
}

#[test]
fn head_and_tail_partition_the_set() {
    let full = golden_lines("split10.records.jsonl");
    assert_eq!(sliced("default"), full);
    for p in [0, 25, 50, 80, 100] {
        let mut joined = sliced(&format!("default[:{p}%]"));
        joined.extend(sliced(&format!("default[{p}%:]")));
        assert_eq!(joined, full, "p={p}");
    }
}

#[test]
fn split_names_filter_on_the_split_field() {
    let train = sliced("train");
    assert_eq!(train.len(), 7);
    assert!(train.iter().all(|r| r.contains("\"examples/split\":\"train\"")));
    assert_eq!(sliced("train[:50%]").len(), 3);
    assert_eq!(sliced("test").len(), 2);
}

#[test]
fn split_filter_needs_a_split_field() {
    let options = ReadOptions { split: Some(SplitSlice::parse("train").unwrap()), ..Default::default() };
    let err = jsonl(&model("minipass.json"), "images", &options).unwrap_err();
    assert!(matches!(err, RecordsError::NoSplitField(_)), "{err}");
}

#[test]
fn flipped_digest_fails_before_any_record() {
    let err = jsonl(&model("minipass-badsha.json"), "images", &ReadOptions::default()).unwrap_err();
    assert!(
        matches!(err, RecordsError::Resource(ResourceError::ChecksumMismatch { ref resource, .. }) if resource == "metadata"),
        "{err}"
    );
}

#[test]
fn unknown_record_set() {
    let err = jsonl(&model("pass.json"), "nosuch", &ReadOptions::default()).unwrap_err();
    assert!(matches!(err, RecordsError::RecordSetUnknown(_)));
}

#[test]
fn invalid_documents_are_not_planned() {
    let (m, report) = load_and_validate(&common::fixture_bytes("faults/bad-key.json")).unwrap();
    assert!(!report.passed);
    let cache = tempfile::tempdir().unwrap();
    let err = records::plan(&m, "images", &resolver(&cache)).unwrap_err();
    assert!(matches!(err, RecordsError::InvalidDocument(_)));
}

fn table_doc(dir: &std::path::Path, csv: &str, fields: &str, format: &str) -> croissant_forge::model::DatasetModel {
    std::fs::write(dir.join("t.csv"), csv).unwrap();
    let doc = format!(
        r#"{{"@type":"sc:Dataset","name":"t","description":"d","conformsTo":"http://mlcommons.org/croissant/1.0",
        "distribution":[{{"@id":"t.csv","@type":"cr:FileObject","contentUrl":"t.csv","encodingFormat":"{format}"}}],
        "recordSet":[{{"@id":"rs","@type":"cr:RecordSet","field":[{fields}]}}]}}"#
    );
    load_and_validate(doc.as_bytes()).unwrap().0
}

fn column_field(id: &str, ty: &str, column: &str) -> String {
    format!(
        r#"{{"@id":"rs/{id}","@type":"cr:Field","dataType":"{ty}","source":{{"fileObject":{{"@id":"t.csv"}},"extract":{{"column":"{column}"}}}}}}"#
    )
}

fn read_dir(
    m: &croissant_forge::model::DatasetModel,
    dir: &std::path::Path,
    strict: bool,
) -> Result<(Vec<String>, records::RecordStats), RecordsError> {
    let cache = tempfile::tempdir().unwrap();
    let resolver = croissant_forge::resources::Resolver::new(croissant_forge::resources::Cache::new(cache.path()))
        .with_base_dir(dir);
    let plan = records::plan(m, "rs", &resolver)?;
    let mut it = records::read_records(&plan, &ReadOptions { strict, ..Default::default() })?;
    let mut out = Vec::new();
    for r in it.by_ref() {
        out.push(serde_json::to_string(&r?.to_json()).unwrap());
    }
    Ok((out, it.stats().clone()))
}

#[test]
fn lenient_coercion_nulls_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let m = table_doc(dir.path(), "n\n1\nx\n3\n", &column_field("n", "sc:Integer", "n"), "text/csv");
    let (rows, stats) = read_dir(&m, dir.path(), false).unwrap();
    assert_eq!(rows, [r#"{"rs/n":1}"#, r#"{"rs/n":null}"#, r#"{"rs/n":3}"#]);
    assert_eq!(stats.coercion_failures, 1);
    let err = read_dir(&m, dir.path(), true).unwrap_err();
    assert!(matches!(err, RecordsError::CoercionFailed { ordinal: 1, .. }), "{err}");
}

#[test]
fn missing_column_is_a_plan_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = table_doc(dir.path(), "a\n1\n", &column_field("b", "sc:Text", "b"), "text/csv");
    let err = read_dir(&m, dir.path(), false).unwrap_err();
    assert!(matches!(err, RecordsError::ColumnMissing { ref column, .. } if column == "b"), "{err}");
}

#[test]
fn unsupported_encoding_is_a_plan_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = table_doc(dir.path(), "a\n1\n", &column_field("a", "sc:Text", "a"), "application/x-parquet");
    let err = read_dir(&m, dir.path(), false).unwrap_err();
    assert!(matches!(err, RecordsError::UnsupportedEncodingFormat { .. }), "{err}");
}

#[test]
fn duplicate_keys_are_counted() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t.csv"), "k\na\nb\na\n").unwrap();
    let doc = format!(
        r#"{{"@type":"sc:Dataset","name":"t","description":"d","conformsTo":"http://mlcommons.org/croissant/1.0",
        "distribution":[{{"@id":"t.csv","@type":"cr:FileObject","contentUrl":"t.csv","encodingFormat":"text/csv"}}],
        "recordSet":[{{"@id":"rs","@type":"cr:RecordSet","key":"rs/k","field":[{}]}}]}}"#,
        column_field("k", "sc:Text", "k")
    );
    let m = load_and_validate(doc.as_bytes()).unwrap().0;
    let (rows, stats) = read_dir(&m, dir.path(), false).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(stats.duplicate_keys, 1);
}

#[test]
fn inline_data_records() {
    let doc = r#"{"@type":"sc:Dataset","name":"t","description":"d","conformsTo":"http://mlcommons.org/croissant/1.0",
        "recordSet":[{"@id":"labels","@type":"cr:RecordSet",
          "field":[{"@id":"labels/id","@type":"cr:Field","dataType":"sc:Integer"},
                   {"@id":"labels/name","@type":"cr:Field","dataType":"sc:Text"}],
          "data":[{"labels/id":0,"labels/name":"cat"},{"labels/id":1,"labels/name":"dog"}]}]}"#;
    let m = load_and_validate(doc.as_bytes()).unwrap().0;
    let got = jsonl(&m, "labels", &ReadOptions::default()).unwrap();
    assert_eq!(got, [r#"{"labels/id":0,"labels/name":"cat"}"#, r#"{"labels/id":1,"labels/name":"dog"}"#]);
}

#[test]
fn fixture_directory_exists() {
    assert!(fixtures().join("pass.json").is_file());
}

/// Builds a tar of `images` plus a CSV of `rows` in `dir`, returning the
/// document text.
fn join_fixture(dir: &std::path::Path, images: &[String], rows: &[(String, i32)]) -> String {
    let tar_file = std::fs::File::create(dir.join("images.tar")).unwrap();
    let mut builder = tar::Builder::new(tar_file);
    for name in images {
        let data = format!("img-{name}");
        let mut header = tar::Header::new_ustar();
        header.set_size(data.len() as u64);
        header.set_mode(0o644);
        header.set_cksum();
        builder.append_data(&mut header, format!("{name}.jpg"), data.as_bytes()).unwrap();
    }
    builder.into_inner().unwrap().flush().unwrap();
    let mut csv = String::from("hash,score\n");
    for (h, s) in rows {
        csv.push_str(&format!("{h},{s}\n"));
    }
    std::fs::write(dir.join("rows.csv"), csv).unwrap();
    r#"{"@type":"sc:Dataset","name":"j","description":"d","conformsTo":"http://mlcommons.org/croissant/1.0",
      "distribution":[
        {"@id":"rows","@type":"cr:FileObject","contentUrl":"rows.csv","encodingFormat":"text/csv"},
        {"@id":"tar","@type":"cr:FileObject","contentUrl":"images.tar","encodingFormat":"application/x-tar"},
        {"@id":"files","@type":"cr:FileSet","containedIn":{"@id":"tar"},"includes":"*.jpg","encodingFormat":"image/jpeg"}],
      "recordSet":[{"@id":"rs","@type":"cr:RecordSet","field":[
        {"@id":"rs/name","@type":"cr:Field","dataType":"sc:Text",
         "source":{"fileSet":{"@id":"files"},"extract":{"fileProperty":"filename"}}},
        {"@id":"rs/hash","@type":"cr:Field","dataType":"sc:Text",
         "source":{"fileSet":{"@id":"files"},"extract":{"fileProperty":"filename"},"transform":{"regex":"^(.*)\\.jpg$"}},
         "references":{"fileObject":{"@id":"rows"},"column":"hash"}},
        {"@id":"rs/score","@type":"cr:Field","dataType":"sc:Integer",
         "source":{"fileObject":{"@id":"rows"},"extract":{"column":"score"}}}]}]}"#
        .to_string()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The engine agrees with a nested-loop join over the raw inputs,
    /// including duplicate hashes (fan-out) and unmatched rows.
    #[test]
    fn join_equals_nested_loop_oracle(
        images in proptest::collection::btree_set("[a-e]{1,2}", 0..8),
        rows in proptest::collection::vec(("[a-e]{1,2}", -50i32..50), 0..10),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let images: Vec<String> = images.into_iter().collect();
        let doc = join_fixture(dir.path(), &images, &rows);
        let m = load_and_validate(doc.as_bytes()).unwrap().0;
        let (got, _) = read_dir(&m, dir.path(), true).unwrap();

        let mut sorted = images.clone();
        sorted.sort_by_key(|n| format!("{n}.jpg"));
        let mut expected = Vec::new();
        for name in &sorted {
            for (h, s) in &rows {
                if h == name {
                    expected.push(format!(r#"{{"rs/name":"{name}.jpg","rs/hash":"{name}","rs/score":{s}}}"#));
                }
            }
        }
        prop_assert_eq!(got, expected);
    }
}
