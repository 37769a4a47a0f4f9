use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Runs the binary with a private cache directory.
fn run(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let cache = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_croissant-forge"))
        .args(args)
        .current_dir(fixtures())
        .env("CROISSANT_FORGE_CACHE", cache.path())
        .env_remove("CROISSANT_FORGE_CONFIG")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    if let Some(bytes) = stdin {
        input.write_all(bytes).unwrap();
    }
    drop(input);
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_pass_reports_one_warning() {
    let o = run(&["validate", "pass.json"], None);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().last(), Some("passed (1 warning)"));
}

#[test]
fn validate_json_on_bad_ref_exits_one() {
    let o = run(&["validate", "faults/bad-ref.json", "--json"], None);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["issues"][0]["code"], "REF_UNRESOLVED");
    let golden = std::fs::read(fixtures().join("golden/faults/bad-ref.report.json")).unwrap();
    assert_eq!(o.stdout.trim_ascii_end(), golden.trim_ascii_end());
}

#[test]
fn validate_missing_file_exits_three() {
    assert_eq!(code(&run(&["validate", "nosuch.json"], None)), 3);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&run(&["validate", "--bogus", "pass.json"], None)), 2);
}

#[test]
fn inspect_pass_inventory() {
    let o = run(&["inspect", "pass.json"], None);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("resources: 2 FileObjects, 1 FileSet"), "{text}");
    assert!(text.contains("record sets: 1 RecordSet"), "{text}");
    assert!(text.contains("images  3 fields, 2 subFields"), "{text}");
    assert!(text.contains("license:     cc-by-4.0"), "{text}");
}

#[test]
fn inspect_minimal_dataset_has_no_resources() {
    let doc =
        br#"{"@type":"sc:Dataset","name":"m","description":"d","conformsTo":"http://mlcommons.org/croissant/1.0"}"#;
    let o = run(&["inspect", "-"], Some(doc));
    assert!(stdout(&o).contains("resources: 0 FileObjects, 0 FileSets"), "{}", stdout(&o));
    assert!(stdout(&o).contains("record sets: 0 RecordSets"));
}

#[test]
fn inspect_json_revalidates_for_every_valid_fixture() {
    let mut docs = vec![
        "pass.json".to_string(),
        "minipass.json".into(),
        "coco.json".into(),
        "split10.json".into(),
        "faults/clean.json".into(),
    ];
    for entry in std::fs::read_dir(fixtures().join("corpus")).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name.starts_with("valid") {
            docs.push(format!("corpus/{name}"));
        }
    }
    for doc in docs {
        let canonical = run(&["inspect", "--json", &doc], None);
        assert_eq!(code(&canonical), 0, "{doc}");
        let again = run(&["inspect", "--json", "-"], Some(&canonical.stdout));
        assert_eq!(again.stdout, canonical.stdout, "{doc}: canonical form is a fixed point");
        let v = run(&["validate", "-"], Some(&canonical.stdout));
        assert_eq!(code(&v), 0, "{doc}: {}", stdout(&v));
    }
}

#[test]
fn records_limit_matches_golden() {
    let o = run(&["records", "minipass.json", "--record-set", "images", "--limit", "2"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let golden = std::fs::read_to_string(fixtures().join("golden/minipass.limit2.jsonl")).unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn records_full_output_matches_join_oracle() {
    for (doc, golden) in
        [("minipass.json", "minipass.records.jsonl"), ("minipass-drop.json", "minipass-drop.records.jsonl")]
    {
        let o = run(&["records", doc], None);
        assert_eq!(code(&o), 0);
        let want = std::fs::read_to_string(fixtures().join("golden").join(golden)).unwrap();
        assert_eq!(stdout(&o), want, "{doc}");
    }
}

#[test]
fn slice_eighty_percent_gives_eight_lines() {
    let o = run(&["records", "split10.json", "--slice", "default[:80%]"], None);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 8);
}

#[test]
fn split_filter_and_summary_json() {
    let o = run(&["records", "split10.json", "--split", "train", "--output", "summary", "--json"], None);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["records"], 7);
    assert_eq!(v["stats"]["filteredOut"], 3);
}

#[test]
fn unknown_record_set_exits_two() {
    let o = run(&["records", "minipass.json", "--record-set", "nosuch"], None);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_slice_exits_two() {
    assert_eq!(code(&run(&["records", "split10.json", "--slice", "default[80%:10%]"], None)), 2);
}

#[test]
fn checksum_mismatch_exits_three_without_output() {
    let o = run(&["records", "minipass-badsha.json"], None);
    assert_eq!(code(&o), 3);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum mismatch"));
}

#[test]
fn records_on_invalid_document_exits_one() {
    assert_eq!(code(&run(&["records", "faults/bad-ref.json"], None)), 1);
}

#[test]
fn coco_records() {
    let o = run(&["records", "coco.json", "--record-set", "images_with_bounding_box"], None);
    assert_eq!(code(&o), 0);
    let want = std::fs::read_to_string(fixtures().join("golden/coco.records.jsonl")).unwrap();
    assert_eq!(stdout(&o), want);
}

#[test]
fn health_directory_json_and_table() {
    let o = run(&["health", "corpus", "--json", "--workers", "4"], None);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["invalidRate"], 0.25);
    assert_eq!(v["total"], 20);

    let t = run(&["health", "corpus3"], None);
    let golden = std::fs::read_to_string(fixtures().join("golden/corpus3.table.txt")).unwrap();
    assert_eq!(stdout(&t), golden);
}

#[test]
fn health_missing_directory_exits_three() {
    assert_eq!(code(&run(&["health", "no-such-dir"], None)), 3);
}

#[test]
fn health_unknown_adapter_exits_two() {
    assert_eq!(code(&run(&["health", "http://127.0.0.1:9/x", "--adapter", "nope"], None)), 2);
}
