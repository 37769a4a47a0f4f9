#![allow(dead_code)]

use std::path::PathBuf;

use croissant_forge::model::DatasetModel;
use croissant_forge::records::{self, ReadOptions, RecordsError};
use croissant_forge::resources::{Cache, Resolver};
use croissant_forge::validate::load_and_validate;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_bytes(name: &str) -> Vec<u8> {
    std::fs::read(fixtures().join(name)).unwrap()
}

pub fn model(name: &str) -> DatasetModel {
    let (model, report) = load_and_validate(&fixture_bytes(name)).expect("fixture loads");
    assert!(report.passed, "{name}: {}", report.summary());
    model
}

pub fn resolver(cache: &tempfile::TempDir) -> Resolver {
    Resolver::new(Cache::new(cache.path())).with_base_dir(fixtures())
}

/// Records of `record_set` as compact JSON lines.
pub fn jsonl(model: &DatasetModel, record_set: &str, options: &ReadOptions) -> Result<Vec<String>, RecordsError> {
    let cache = tempfile::tempdir().unwrap();
    let plan = records::plan(model, record_set, &resolver(&cache))?;
    records::read_records(&plan, options)?.map(|r| r.map(|r| serde_json::to_string(&r.to_json()).unwrap())).collect()
}

pub fn golden_lines(name: &str) -> Vec<String> {
    String::from_utf8(fixture_bytes(&format!("golden/{name}"))).unwrap().lines().map(str::to_string).collect()
}
