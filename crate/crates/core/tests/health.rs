mod common;

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::time::Instant;

use common::{fixture_bytes, fixtures};
use croissant_forge::health::{
    report_to_json, report_to_table, scan_directory, scan_listing, DocStatus, HfLikeAdapter, JsonArrayAdapter,
    ScanOptions,
};
use serde_json::Value;

fn scan(dir: &str, workers: usize) -> croissant_forge::health::HealthReport {
    let options = ScanOptions { workers, ..Default::default() };
    scan_directory(&fixtures().join(dir), &options).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

#[test]
fn corpus_of_twenty_has_a_quarter_invalid() {
    let start = Instant::now();
    let r = scan("corpus", 8);
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!((r.total, r.downloaded, r.invalid, r.valid, r.parse_failed, r.fetch_failed), (20, 20, 5, 15, 0, 0));
    assert_eq!(r.invalid_rate, Some(0.25));
    let json: Value = serde_json::from_slice(&report_to_json(&r)).unwrap();
    assert_eq!(json["invalidRate"], 0.25);
    assert_eq!(json["schema"], 1);
}

#[test]
fn corpus_matches_statistics_oracle() {
    let expected: Value = serde_json::from_slice(&fixture_bytes("golden/corpus.expected.json")).unwrap();
    let r = scan("corpus", 8);
    let json: Value = serde_json::from_slice(&report_to_json(&r)).unwrap();
    for metric in ["fileObjects", "fileSets", "recordSets", "fields"] {
        for stat in ["mean", "stddev"] {
            let want = expected["aggregates"][metric][stat].as_f64().unwrap();
            let got = json["aggregates"][metric][stat].as_f64().unwrap();
            assert!(close(got, want), "{metric}.{stat}: {got} vs {want}");
        }
    }
    let want_docs = expected["perDoc"].as_array().unwrap();
    let got_docs = json["perDoc"].as_array().unwrap();
    assert_eq!(got_docs.len(), want_docs.len());
    for (got, want) in got_docs.iter().zip(want_docs) {
        assert_eq!(got["id"], want["id"]);
        assert_eq!(got["status"], want["status"], "{}", want["id"]);
        if want["status"] == "valid" {
            for metric in ["fileObjects", "fileSets", "recordSets", "fields"] {
                assert_eq!(got[metric], want[metric], "{} {metric}", want["id"]);
            }
        }
    }
}

#[test]
fn parallel_and_sequential_scans_agree() {
    let parallel = scan("corpus", 8);
    assert_eq!(parallel, scan("corpus", 1));
    assert_eq!(report_to_json(&parallel), report_to_json(&scan("corpus", 3)));
    assert_eq!(parallel, scan("corpus", 8));
}

#[test]
fn three_documents_hand_computed() {
    let expected: Value = serde_json::from_slice(&fixture_bytes("golden/corpus3.expected.json")).unwrap();
    let r = scan("corpus3", 2);
    let fields = r.aggregates.fields.unwrap();
    assert!(close(fields.mean, 4.0));
    assert!(close(fields.stddev, expected["fields"]["stddev"].as_f64().unwrap()));
    assert!(close(fields.stddev, 1.632_993_161_855_452));
}

#[test]
fn table_matches_golden() {
    let table = report_to_table(&scan("corpus3", 2));
    let path = fixtures().join("golden/corpus3.table.txt");
    if std::env::var_os("CROISSANT_FORGE_BLESS").is_some() {
        std::fs::write(&path, &table).unwrap();
    }
    assert_eq!(table, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let r = scan_directory(dir.path(), &ScanOptions::default()).unwrap();
    assert_eq!(r.total, 0);
    assert_eq!(r.invalid_rate, None);
    let json: Value = serde_json::from_slice(&report_to_json(&r)).unwrap();
    assert_eq!(json["invalidRate"], Value::Null);
    assert_eq!(json["aggregates"]["fields"], Value::Null);
}

#[test]
fn limit_caps_documents() {
    let options = ScanOptions { limit: Some(4), ..Default::default() };
    assert_eq!(scan_directory(&fixtures().join("corpus"), &options).unwrap().total, 4);
}

/// Serves canned responses by path; unknown paths get 404.
fn serve(routes: Vec<(&'static str, String)>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            if reader.read_line(&mut line).is_err() {
                continue;
            }
            let path = line.split_whitespace().nth(1).unwrap_or("/").to_string();
            loop {
                let mut h = String::new();
                if reader.read_line(&mut h).is_err() || h == "\r\n" || h.is_empty() {
                    break;
                }
            }
            let (status, body) = match routes.iter().find(|(p, _)| *p == path) {
                Some((_, b)) => ("200 OK", b.clone()),
                None => ("404 Not Found", "missing".to_string()),
            };
            let _ = write!(
                stream,
                "HTTP/1.1 {status}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    format!("http://{addr}")
}

#[test]
fn hf_like_listing() {
    let valid = String::from_utf8(fixture_bytes("corpus/valid-00.json")).unwrap();
    let invalid = String::from_utf8(fixture_bytes("corpus/invalid-bad-ref.json")).unwrap();
    let base = serve(vec![
        ("/api/datasets?limit=3", r#"[{"id":"org/a"},{"id":"org/b"},{"id":"org/c"}]"#.to_string()),
        ("/api/datasets/org/a/croissant", valid),
        ("/api/datasets/org/b/croissant", invalid),
    ]);
    let options = ScanOptions { limit: Some(3), ..Default::default() };
    let r = scan_listing(&base, &HfLikeAdapter, &options).unwrap();
    let statuses: Vec<(&str, DocStatus)> = r.per_doc.iter().map(|d| (d.id.as_str(), d.status)).collect();
    assert_eq!(
        statuses,
        [("org/a", DocStatus::Valid), ("org/b", DocStatus::Invalid), ("org/c", DocStatus::FetchFailed)]
    );
    assert_eq!((r.total, r.downloaded, r.fetch_failed), (3, 2, 1));
    assert_eq!(r.invalid_rate, Some(0.5));
}

#[test]
fn json_array_listing() {
    let valid = String::from_utf8(fixture_bytes("corpus/valid-01.json")).unwrap();
    let base = serve(vec![("/docs/1.json", valid), ("/docs/2.json", "{oops".to_string())]);
    let listing = format!(r#"["{base}/docs/1.json", {{"url": "{base}/docs/2.json"}}]"#);
    let base2 = serve(vec![("/listing.json", listing)]);
    let r = scan_listing(&format!("{base2}/listing.json"), &JsonArrayAdapter, &ScanOptions::default()).unwrap();
    assert_eq!((r.valid, r.parse_failed), (1, 1));
    assert_eq!(r.invalid_rate, Some(0.0));
}

#[test]
fn failed_listing_is_an_error() {
    let base = serve(vec![]);
    assert!(scan_listing(&base, &HfLikeAdapter, &ScanOptions::default()).is_err());
}
