mod common;

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;

use common::{fixture_bytes, fixtures, model};
use croissant_forge::model::{DatasetModel, FileObject};
use croissant_forge::resources::{Archive, Cache, Config, Resolver, ResourceError};
use croissant_forge::validate::load_and_validate;
use serde_json::Value;

fn expected() -> Value {
    serde_json::from_slice(&fixture_bytes("data/archives/expected.json")).unwrap()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

fn doc(distribution: &str) -> DatasetModel {
    let text = format!(
        r#"{{"@type":"sc:Dataset","name":"r","description":"d","conformsTo":"http://mlcommons.org/croissant/1.0","distribution":[{distribution}]}}"#
    );
    let (m, report) = load_and_validate(text.as_bytes()).unwrap();
    assert!(report.passed, "{:?}", report.issues);
    m
}

fn resolver(cache: &tempfile::TempDir) -> Resolver {
    Resolver::new(Cache::new(cache.path())).with_base_dir(fixtures().join("data/archives"))
}

#[test]
fn archive_members_in_archive_order() {
    let e = expected();
    let tar = Archive::open(&fixtures().join("data/archives/notes.tar"), Some("application/x-tar")).unwrap();
    assert_eq!(tar.members().unwrap(), strings(&e["notes.tar"]["members"]));
    let zip = Archive::open(&fixtures().join("data/archives/nested.zip"), Some("application/zip")).unwrap();
    assert_eq!(zip.members().unwrap(), strings(&e["nested.zip"]["members"]));
}

#[test]
fn file_set_over_tar_matches_jpgs_only() {
    let m = doc(
        r#"{"@id":"notes","@type":"cr:FileObject","contentUrl":"notes.tar","encodingFormat":"application/x-tar"},
           {"@id":"jpgs","@type":"cr:FileSet","containedIn":{"@id":"notes"},"includes":"*.jpg","encodingFormat":"image/jpeg"}"#,
    );
    let cache = tempfile::tempdir().unwrap();
    let entries = resolver(&cache).file_set_entries(&m, "jpgs").unwrap();
    let names: Vec<String> = entries.iter().map(|e| e.fullpath.clone()).collect();
    assert_eq!(names, strings(&expected()["notes.tar"]["includes *.jpg"]));
    assert_eq!(entries[0].read().unwrap(), b"\xff\xd8\xff\xe0aaaaaaaa\xff\xd9");
}

#[test]
fn recursive_glob_over_nested_zip_is_sorted() {
    let m = doc(
        r#"{"@id":"nested","@type":"cr:FileObject","contentUrl":"nested.zip","encodingFormat":"application/zip"},
           {"@id":"json","@type":"cr:FileSet","containedIn":{"@id":"nested"},"includes":"**/*.json","encodingFormat":"application/json"}"#,
    );
    let cache = tempfile::tempdir().unwrap();
    let entries = resolver(&cache).file_set_entries(&m, "json").unwrap();
    let names: Vec<String> = entries.iter().map(|e| e.fullpath.clone()).collect();
    assert_eq!(names, strings(&expected()["nested.zip"]["includes **/*.json"]));
    assert_eq!(names.len(), 3);
}

#[test]
fn excludes_remove_matches() {
    let m = doc(
        r#"{"@id":"nested","@type":"cr:FileObject","contentUrl":"nested.zip","encodingFormat":"application/zip"},
           {"@id":"json","@type":"cr:FileSet","containedIn":{"@id":"nested"},"includes":"**/*.json","excludes":"a/*","encodingFormat":"application/json"}"#,
    );
    let cache = tempfile::tempdir().unwrap();
    let entries = resolver(&cache).file_set_entries(&m, "json").unwrap();
    assert_eq!(entries.iter().map(|e| e.fullpath.as_str()).collect::<Vec<_>>(), ["b/two.json"]);
}

#[test]
fn file_url_with_matching_digest_is_verified() {
    let sha = expected()["pass/metadata.csv"]["sha256"].as_str().unwrap().to_string();
    let path = fixtures().join("data/pass/metadata.csv").canonicalize().unwrap();
    let url = url::Url::from_file_path(&path).unwrap().to_string();
    let cache = tempfile::tempdir().unwrap();
    let r = Resolver::new(Cache::new(cache.path()));
    let fo = FileObject { id: "m".into(), content_url: Some(url), sha256: Some(sha.clone()), ..Default::default() };
    let local = r.fetch_file_object(&fo).unwrap();
    assert!(local.verified);
    assert_eq!(local.sha256.as_deref(), Some(sha.as_str()));

    let flipped = format!("{}{}", if sha.starts_with('0') { '1' } else { '0' }, &sha[1..]);
    let bad = FileObject { sha256: Some(flipped), ..fo };
    assert!(matches!(r.fetch_file_object(&bad), Err(ResourceError::ChecksumMismatch { .. })));
}

#[test]
fn zip_member_is_extracted_and_hashed() {
    let m = model("coco.json");
    let cache = tempfile::tempdir().unwrap();
    let r = Resolver::new(Cache::new(cache.path())).with_base_dir(fixtures());
    let local = r.fetch(&m, "annotations").unwrap();
    assert!(local.local_path.starts_with(cache.path()));
    let want = expected()["coco member"]["sha256"].as_str().unwrap().to_string();
    assert_eq!(local.sha256.as_deref(), Some(want.as_str()));
    let doc: Value = serde_json::from_slice(&std::fs::read(&local.local_path).unwrap()).unwrap();
    assert_eq!(doc["annotations"].as_array().unwrap().len(), 10);
    assert_eq!(r.fetch(&m, "annotations").unwrap(), local);
}

#[test]
fn missing_member_is_reported() {
    let m = doc(
        r#"{"@id":"nested","@type":"cr:FileObject","contentUrl":"nested.zip","encodingFormat":"application/zip"},
           {"@id":"gone","@type":"cr:FileObject","containedIn":{"@id":"nested"},"contentUrl":"c/none.json","encodingFormat":"application/json"}"#,
    );
    let cache = tempfile::tempdir().unwrap();
    let err = resolver(&cache).fetch(&m, "gone").unwrap_err();
    assert!(matches!(err, ResourceError::ArchiveMemberMissing { .. }), "{err}");
}

#[test]
fn missing_local_file_is_a_fetch_error() {
    let m = doc(r#"{"@id":"x","@type":"cr:FileObject","contentUrl":"nosuch.csv","encodingFormat":"text/csv"}"#);
    let cache = tempfile::tempdir().unwrap();
    assert!(resolver(&cache).fetch(&m, "x").is_err());
}

#[test]
fn parallel_fetch_matches_sequential() {
    let m = model("coco.json");
    let ids = vec!["annotations_trainval2014.zip".to_string(), "annotations".to_string()];
    let c1 = tempfile::tempdir().unwrap();
    let c2 = tempfile::tempdir().unwrap();
    let par = Resolver::new(Cache::new(c1.path()))
        .with_base_dir(fixtures())
        .with_parallelism(4)
        .fetch_many(&m, &ids)
        .unwrap();
    let seq = Resolver::new(Cache::new(c2.path()))
        .with_base_dir(fixtures())
        .with_parallelism(1)
        .fetch_many(&m, &ids)
        .unwrap();
    assert_eq!(par.keys().collect::<Vec<_>>(), seq.keys().collect::<Vec<_>>());
    for (k, v) in &par {
        assert_eq!(v.sha256, seq[k].sha256);
    }
}

/// Serves `body` at `/file.csv` only to requests bearing `token`.
fn serve_with_token(token: &'static str, body: &'static [u8]) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut authorized = false;
            let mut first = true;
            loop {
                let mut h = String::new();
                if reader.read_line(&mut h).is_err() || h == "\r\n" || h.is_empty() {
                    break;
                }
                if !first && h.to_ascii_lowercase().starts_with("authorization:") {
                    authorized = h.trim_end().ends_with(&format!("Bearer {token}"));
                }
                first = false;
            }
            let (status, payload): (&str, &[u8]) =
                if authorized { ("200 OK", body) } else { ("401 Unauthorized", b"no") };
            let _ =
                write!(stream, "HTTP/1.1 {status}\r\ncontent-length: {}\r\nconnection: close\r\n\r\n", payload.len());
            let _ = stream.write_all(payload);
        }
    });
    format!("http://{addr}")
}

#[test]
fn http_fetch_uses_host_token_and_cache() {
    let base = serve_with_token("s3cret", b"hello");
    let sha = expected()["hello.txt"]["sha256"].as_str().unwrap().to_string();
    let fo = FileObject {
        id: "h".into(),
        content_url: Some(format!("{base}/file.csv")),
        sha256: Some(sha.clone()),
        ..Default::default()
    };
    let cache = tempfile::tempdir().unwrap();

    let anonymous = Resolver::new(Cache::new(cache.path()));
    let err = anonymous.fetch_file_object(&fo).unwrap_err();
    assert!(matches!(err, ResourceError::FetchFailed { .. }), "{err}");
    assert!(err.to_string().contains("401"), "{err}");

    let config = Config::parse("[hosts.\"127.0.0.1\"]\ntoken = \"s3cret\"\n", std::path::Path::new("t.toml")).unwrap();
    let r = Resolver::new(Cache::new(cache.path())).with_config(config);
    let local = r.fetch_file_object(&fo).unwrap();
    assert!(local.verified);
    assert_eq!(std::fs::read(&local.local_path).unwrap(), b"hello");
    // A second fetch is served from the cache even without credentials.
    assert_eq!(anonymous.fetch_file_object(&fo).unwrap(), local);
}
