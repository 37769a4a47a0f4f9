mod common;

use common::{fixture_bytes, fixtures};
use croissant_forge::validate::{load_and_validate, report_to_json, validate, IssueCode, Severity, ValidationReport};
use serde_json::Value;

const FAULTS: [&str; 12] = [
    "missing-name",
    "missing-description",
    "bad-ref",
    "bad-key",
    "bad-sha",
    "bad-glob",
    "bad-regex",
    "bad-jsonpath",
    "missing-conforms-and-description",
    "ref-and-key",
    "sha-and-glob",
    "three-faults",
];

const CLEAN: [&str; 5] = ["pass.json", "minipass.json", "coco.json", "split10.json", "faults/clean.json"];

fn report(name: &str) -> ValidationReport {
    match load_and_validate(&fixture_bytes(name)) {
        Ok((_, r)) | Err(r) => r,
    }
}

fn triples(r: &ValidationReport) -> Vec<(String, String, String)> {
    r.issues
        .iter()
        .map(|i| {
            let sev = serde_json::to_value(i.severity).unwrap().as_str().unwrap().to_string();
            (i.code.as_str().to_string(), sev, i.path.clone())
        })
        .collect()
}

#[test]
fn fault_matrix_reports_exactly_the_seeded_issues() {
    let expected: Value = serde_json::from_slice(&fixture_bytes("faults/expected.json")).unwrap();
    assert_eq!(expected.as_object().unwrap().len(), FAULTS.len());
    for name in FAULTS {
        let r = report(&format!("faults/{name}.json"));
        let want: Vec<(String, String, String)> = expected[name]
            .as_array()
            .unwrap()
            .iter()
            .map(|i| {
                (
                    i["code"].as_str().unwrap().into(),
                    i["severity"].as_str().unwrap().into(),
                    i["path"].as_str().unwrap().into(),
                )
            })
            .collect();
        assert_eq!(triples(&r), want, "{name}");
        assert!(!r.passed, "{name}");
    }
}

#[test]
fn fault_reports_match_goldens_byte_for_byte() {
    let dir = fixtures().join("golden/faults");
    let bless = std::env::var_os("CROISSANT_FORGE_BLESS").is_some();
    for name in FAULTS {
        let bytes = report_to_json(&report(&format!("faults/{name}.json")));
        let path = dir.join(format!("{name}.report.json"));
        if bless {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &bytes).unwrap();
        }
        let golden = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(String::from_utf8(bytes).unwrap(), String::from_utf8(golden).unwrap(), "{name}");
    }
}

#[test]
fn clean_fixtures_have_no_errors() {
    for name in CLEAN {
        let r = report(name);
        assert!(r.passed, "{name}: {:?}", r.issues);
        assert_eq!(r.counts.error, 0);
    }
    for name in ["minipass.json", "coco.json", "split10.json", "faults/clean.json"] {
        assert!(report(name).issues.is_empty(), "{name}: {:?}", report(name).issues);
    }
}

#[test]
fn pass_document_has_one_warning_for_date_published() {
    let r = report("pass.json");
    assert_eq!(r.summary(), "passed (1 warning)");
    assert_eq!(r.issues.len(), 1);
    assert_eq!(r.issues[0].code, IssueCode::RecommendedMissing);
    assert_eq!(r.issues[0].severity, Severity::Warning);
    assert_eq!(r.issues[0].path, "dataset.datePublished");
}

#[test]
fn three_fault_fixture_is_ordered_by_entity_property_code() {
    let r = report("faults/three-faults.json");
    let paths: Vec<&str> = r.issues.iter().map(|i| i.path.as_str()).collect();
    assert_eq!(paths, ["dataset.name", "images/hash.transform", "metadata.sha256"]);
}

#[test]
fn validation_is_idempotent() {
    for name in FAULTS {
        let (model, first) = match load_and_validate(&fixture_bytes(&format!("faults/{name}.json"))) {
            Ok(ok) => ok,
            Err(_) => continue,
        };
        assert_eq!(validate(&model), first);
        assert_eq!(report_to_json(&validate(&model)), report_to_json(&first));
    }
}

#[test]
fn removing_a_property_keeps_other_required_issues() {
    let doc: Value = serde_json::from_slice(&fixture_bytes("faults/missing-name.json")).unwrap();
    let base = report("faults/missing-name.json");
    let required = |r: &ValidationReport| -> Vec<String> {
        r.issues.iter().filter(|i| i.code == IssueCode::RequiredMissing).map(|i| i.path.clone()).collect()
    };
    for key in doc.as_object().unwrap().keys().filter(|k| !k.starts_with('@')) {
        let mut smaller = doc.clone();
        smaller.as_object_mut().unwrap().remove(key);
        let r = match load_and_validate(smaller.to_string().as_bytes()) {
            Ok((_, r)) | Err(r) => r,
        };
        for path in required(&base) {
            assert!(required(&r).contains(&path), "removing {key} lost {path}");
        }
    }
}

#[test]
fn empty_report_json() {
    let empty = ValidationReport::new(Vec::new());
    assert_eq!(
        String::from_utf8(report_to_json(&empty)).unwrap(),
        r#"{"passed":true,"counts":{"error":0,"warning":0,"info":0},"issues":[]}"#
    );
}

#[test]
fn passed_iff_no_errors() {
    for name in FAULTS.iter().map(|f| format!("faults/{f}.json")).chain(CLEAN.iter().map(|s| s.to_string())) {
        let r = report(&name);
        assert_eq!(r.passed, r.counts.error == 0, "{name}");
        for issue in &r.issues {
            assert_eq!(issue.severity, issue.code.severity());
        }
    }
}
