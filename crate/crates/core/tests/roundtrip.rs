mod common;
mod gen;

use std::path::PathBuf;

use common::fixtures;
use croissant_forge::graph::{load_document, load_value, to_canonical_json};
use croissant_forge::model::{from_graph, to_graph, to_json};
use proptest::prelude::*;

/// Every JSON-LD document under the fixture tree.
fn fixture_documents() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = walkdir::WalkDir::new(fixtures())
        .sort_by_file_name()
        .into_iter()
        .map(|e| e.unwrap().into_path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .filter(|p| !p.components().any(|c| c.as_os_str() == "data" || c.as_os_str() == "golden"))
        .filter(|p| p.file_name().unwrap() != "expected.json")
        .collect();
    out.sort();
    out
}

#[test]
fn canonical_form_round_trips_for_every_fixture() {
    let docs = fixture_documents();
    assert!(docs.len() >= 40, "{}", docs.len());
    for path in docs {
        let g = load_document(&std::fs::read(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let bytes = to_canonical_json(&g);
        let again = load_document(&bytes).unwrap();
        assert_eq!(again, g, "{}", path.display());
        assert_eq!(to_canonical_json(&again), bytes, "{}", path.display());
    }
}

#[test]
fn model_round_trips_for_every_fixture() {
    for path in fixture_documents() {
        let g = load_document(&std::fs::read(&path).unwrap()).unwrap();
        let Ok(m) = from_graph(&g) else { continue };
        let back = from_graph(&to_graph(&m).unwrap()).unwrap();
        assert_eq!(back, m, "{}", path.display());
    }
}

#[test]
fn every_typed_node_lands_in_one_collection() {
    for path in fixture_documents() {
        let g = load_document(&std::fs::read(&path).unwrap()).unwrap();
        let Ok(m) = from_graph(&g) else { continue };
        let count = |t: &str| g.nodes().filter(|n| n.has_type(t)).count();
        let name = path.display();
        assert_eq!(count("cr:FileObject"), m.file_objects().count(), "{name}");
        assert_eq!(count("cr:FileSet"), m.file_sets().count(), "{name}");
        assert_eq!(count("cr:RecordSet"), m.record_sets.len(), "{name}");
        assert_eq!(count("cr:Field"), m.field_count(), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_documents_round_trip(doc in gen::document()) {
        let g = load_value(&doc).unwrap();
        let canonical = to_canonical_json(&g);
        let again = load_document(&canonical).unwrap();
        prop_assert_eq!(&again, &g);
        prop_assert_eq!(to_canonical_json(&again), canonical);

        let m = from_graph(&g).unwrap();
        let rebuilt = from_graph(&load_value(&to_json(&m)).unwrap()).unwrap();
        prop_assert_eq!(rebuilt, m);
    }
}
