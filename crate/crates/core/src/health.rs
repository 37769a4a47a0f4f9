//! Corpus health: validate many documents and summarize how many parse,
//! how many pass, and how large the valid ones are.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value as Json;

use crate::graph;
use crate::model::{self, DatasetModel};
use crate::resources::Config;
use crate::validate;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_WORKERS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum DocStatus {
    Valid,
    Invalid,
    ParseFailed,
    FetchFailed,
}

impl DocStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DocStatus::Valid => "valid",
            DocStatus::Invalid => "invalid",
            DocStatus::ParseFailed => "parseFailed",
            DocStatus::FetchFailed => "fetchFailed",
        }
    }
}

/// Entity counts of one document, taken from its model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Counts {
    pub file_objects: usize,
    pub file_sets: usize,
    pub record_sets: usize,
    /// Fields and sub-fields.
    pub fields: usize,
}

impl Counts {
    pub fn of(m: &DatasetModel) -> Counts {
        Counts {
            file_objects: m.file_objects().count(),
            file_sets: m.file_sets().count(),
            record_sets: m.record_sets.len(),
            fields: m.field_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DocHealth {
    pub id: String,
    pub status: DocStatus,
    /// Absent when the document could not be turned into a model.
    #[serde(flatten)]
    pub counts: Option<Counts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub stddev: f64,
}

impl Stat {
    /// Mean and population standard deviation; `None` for no samples.
    pub fn of(xs: &[f64]) -> Option<Stat> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Some(Stat { mean, stddev: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Aggregates {
    pub file_objects: Option<Stat>,
    pub file_sets: Option<Stat>,
    pub record_sets: Option<Stat>,
    pub fields: Option<Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HealthReport {
    pub schema: u32,
    pub total: usize,
    pub downloaded: usize,
    pub fetch_failed: usize,
    pub parse_failed: usize,
    pub invalid: usize,
    pub valid: usize,
    /// `invalid / downloaded`; null when nothing was downloaded.
    pub invalid_rate: Option<f64>,
    /// Over valid documents only.
    pub aggregates: Aggregates,
    /// Sorted by id.
    pub per_doc: Vec<DocHealth>,
}

impl HealthReport {
    pub fn from_docs(mut docs: Vec<DocHealth>) -> HealthReport {
        docs.sort_by(|a, b| a.id.cmp(&b.id));
        let count = |s: DocStatus| docs.iter().filter(|d| d.status == s).count();
        let (valid, invalid) = (count(DocStatus::Valid), count(DocStatus::Invalid));
        let (parse_failed, fetch_failed) = (count(DocStatus::ParseFailed), count(DocStatus::FetchFailed));
        let total = docs.len();
        let downloaded = total - fetch_failed;
        assert_eq!(downloaded, parse_failed + invalid + valid, "document counts are conserved");
        let valid_counts: Vec<Counts> =
            docs.iter().filter(|d| d.status == DocStatus::Valid).filter_map(|d| d.counts).collect();
        let stat = |f: fn(&Counts) -> usize| Stat::of(&valid_counts.iter().map(|c| f(c) as f64).collect::<Vec<_>>());
        HealthReport {
            schema: SCHEMA_VERSION,
            total,
            downloaded,
            fetch_failed,
            parse_failed,
            invalid,
            valid,
            invalid_rate: (downloaded > 0).then(|| invalid as f64 / downloaded as f64),
            aggregates: Aggregates {
                file_objects: stat(|c| c.file_objects),
                file_sets: stat(|c| c.file_sets),
                record_sets: stat(|c| c.record_sets),
                fields: stat(|c| c.fields),
            },
            per_doc: docs,
        }
    }
}

pub fn report_to_json(report: &HealthReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("health reports serialize");
    out.push(b'\n');
    out
}

fn fmt_stat(s: Option<Stat>) -> (String, String) {
    match s {
        Some(s) => (format!("{:.3}", s.mean), format!("{:.3}", s.stddev)),
        None => ("-".into(), "-".into()),
    }
}

/// Aligned plain-text rendering.
pub fn report_to_table(report: &HealthReport) -> String {
    let mut out = String::new();
    let rate = report.invalid_rate.map_or("-".to_string(), |r| format!("{:.2}%", r * 100.0));
    for (label, value) in [
        ("documents", report.total.to_string()),
        ("downloaded", report.downloaded.to_string()),
        ("fetch failed", report.fetch_failed.to_string()),
        ("parse failed", report.parse_failed.to_string()),
        ("invalid", report.invalid.to_string()),
        ("valid", report.valid.to_string()),
        ("invalid rate", rate),
    ] {
        let _ = writeln!(out, "{label:<14}{value:>8}");
    }
    out.push('\n');
    let _ = writeln!(out, "{:<14}{:>10}{:>10}", "per valid doc", "mean", "stddev");
    let a = &report.aggregates;
    for (label, s) in [
        ("fileObjects", a.file_objects),
        ("fileSets", a.file_sets),
        ("recordSets", a.record_sets),
        ("fields", a.fields),
    ] {
        let (m, d) = fmt_stat(s);
        let _ = writeln!(out, "{label:<14}{m:>10}{d:>10}");
    }
    if report.per_doc.is_empty() {
        return out;
    }
    out.push('\n');
    let width = report.per_doc.iter().map(|d| d.id.chars().count()).max().unwrap_or(0).max(8);
    let _ = writeln!(out, "{:<width$}  {:<12}{:>5}{:>5}{:>5}{:>7}", "document", "status", "FO", "FS", "RS", "fields");
    for d in &report.per_doc {
        let cell = |f: fn(&Counts) -> usize| d.counts.map_or("-".to_string(), |c| f(&c).to_string());
        let _ = writeln!(
            out,
            "{:<width$}  {:<12}{:>5}{:>5}{:>5}{:>7}",
            d.id,
            d.status.as_str(),
            cell(|c| c.file_objects),
            cell(|c| c.file_sets),
            cell(|c| c.record_sets),
            cell(|c| c.fields),
        );
    }
    out
}

/// Classifies one document's bytes.
pub fn assess(id: &str, bytes: &[u8]) -> DocHealth {
    let doc =
        |status, counts, error_count, detail| DocHealth { id: id.to_string(), status, counts, error_count, detail };
    let g = match graph::load_document(bytes) {
        Ok(g) => g,
        Err(e) => return doc(DocStatus::ParseFailed, None, None, Some(e.to_string())),
    };
    let m = match model::from_graph(&g) {
        Ok(m) => m,
        Err(e) => return doc(DocStatus::Invalid, None, Some(e.0.len()), Some(e.to_string())),
    };
    let report = validate::validate(&m);
    let counts = Some(Counts::of(&m));
    if report.passed {
        doc(DocStatus::Valid, counts, None, None)
    } else {
        doc(DocStatus::Invalid, counts, Some(report.counts.error), Some(report.summary()))
    }
}

/// Turns a repository listing into document URLs.
pub trait ListingAdapter: Send + Sync {
    fn name(&self) -> &'static str;
    /// URL of the listing for `source`.
    fn listing_url(&self, source: &str, limit: Option<usize>) -> String;
    /// `(id, document url)` pairs from the listing body.
    fn documents(&self, source: &str, listing: &Json) -> Result<Vec<(String, String)>, String>;
}

/// A URL returning a JSON array of document URLs (or objects with `url`).
pub struct JsonArrayAdapter;

impl ListingAdapter for JsonArrayAdapter {
    fn name(&self) -> &'static str {
        "json-array"
    }

    fn listing_url(&self, source: &str, _limit: Option<usize>) -> String {
        source.to_string()
    }

    fn documents(&self, _source: &str, listing: &Json) -> Result<Vec<(String, String)>, String> {
        let items = listing.as_array().ok_or("expected a JSON array of document URLs")?;
        items
            .iter()
            .map(|item| {
                let url = item.as_str().or_else(|| item.get("url").and_then(Json::as_str));
                url.map(|u| (u.to_string(), u.to_string())).ok_or_else(|| format!("not a document URL: {item}"))
            })
            .collect()
    }
}

/// A hub whose `/api/datasets` lists dataset ids and serves each document
/// at `/api/datasets/<id>/croissant`.
pub struct HfLikeAdapter;

impl ListingAdapter for HfLikeAdapter {
    fn name(&self) -> &'static str {
        "hf-like"
    }

    fn listing_url(&self, source: &str, limit: Option<usize>) -> String {
        let base = source.trim_end_matches('/');
        match limit {
            Some(n) => format!("{base}/api/datasets?limit={n}"),
            None => format!("{base}/api/datasets"),
        }
    }

    fn documents(&self, source: &str, listing: &Json) -> Result<Vec<(String, String)>, String> {
        let base = source.trim_end_matches('/');
        let items = listing.as_array().ok_or("expected a JSON array of datasets")?;
        items
            .iter()
            .map(|item| {
                let id = item.as_str().or_else(|| item.get("id").and_then(Json::as_str));
                id.map(|id| (id.to_string(), format!("{base}/api/datasets/{id}/croissant")))
                    .ok_or_else(|| format!("not a dataset entry: {item}"))
            })
            .collect()
    }
}

pub fn adapter(name: &str) -> Option<Box<dyn ListingAdapter>> {
    match name {
        "json-array" => Some(Box::new(JsonArrayAdapter)),
        "hf-like" => Some(Box::new(HfLikeAdapter)),
        _ => None,
    }
}

pub const ADAPTERS: [&str; 2] = ["json-array", "hf-like"];

#[derive(Debug, thiserror::Error)]
pub enum HealthError {
    #[error("cannot read corpus directory {}: {source}", path.display())]
    Corpus { path: PathBuf, source: walkdir::Error },
    #[error("listing {url} failed: {reason}")]
    Listing { url: String, reason: String },
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub workers: usize,
    pub limit: Option<usize>,
    pub config: Config,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { workers: DEFAULT_WORKERS, limit: None, config: Config::default() }
    }
}

enum Doc {
    Local { id: String, path: PathBuf },
    Remote { id: String, url: String },
}

fn run(docs: Vec<Doc>, options: &ScanOptions, agent: &ureq::Agent) -> HealthReport {
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(docs.len()));
    std::thread::scope(|s| {
        for _ in 0..options.workers.clamp(1, docs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(d) = docs.get(i) else { break };
                let health = match d {
                    Doc::Local { id, path } => match std::fs::read(path) {
                        Ok(bytes) => assess(id, &bytes),
                        Err(e) => fetch_failed(id, e.to_string()),
                    },
                    Doc::Remote { id, url } => match get(agent, &options.config, url) {
                        Ok(bytes) => assess(id, &bytes),
                        Err(e) => fetch_failed(id, e),
                    },
                };
                results.lock().unwrap().push(health);
            });
        }
    });
    HealthReport::from_docs(results.into_inner().unwrap())
}

fn fetch_failed(id: &str, detail: String) -> DocHealth {
    DocHealth {
        id: id.to_string(),
        status: DocStatus::FetchFailed,
        counts: None,
        error_count: None,
        detail: Some(detail),
    }
}

/// Scans every `*.json` / `*.jsonld` file under `dir`; ids are paths
/// relative to `dir`.
pub fn scan_directory(dir: &Path, options: &ScanOptions) -> Result<HealthReport, HealthError> {
    let mut docs = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|source| HealthError::Corpus { path: dir.to_path_buf(), source })?;
        let path = entry.path();
        let is_doc = path.extension().is_some_and(|e| e == "json" || e == "jsonld");
        if entry.file_type().is_file() && is_doc {
            let rel = path.strip_prefix(dir).unwrap_or(path);
            let id = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            docs.push(Doc::Local { id, path: path.to_path_buf() });
        }
    }
    if let Some(n) = options.limit {
        docs.truncate(n);
    }
    Ok(run(docs, options, &agent()))
}

/// Scans the documents of a remote listing.
pub fn scan_listing(
    source: &str,
    adapter: &dyn ListingAdapter,
    options: &ScanOptions,
) -> Result<HealthReport, HealthError> {
    let agent = agent();
    let url = adapter.listing_url(source, options.limit);
    let listing_err = |reason: String| HealthError::Listing { url: url.clone(), reason };
    let body = get(&agent, &options.config, &url).map_err(listing_err)?;
    let listing: Json = serde_json::from_slice(&body).map_err(|e| listing_err(e.to_string()))?;
    let mut docs: Vec<Doc> = adapter
        .documents(source, &listing)
        .map_err(listing_err)?
        .into_iter()
        .map(|(id, url)| Doc::Remote { id, url })
        .collect();
    if let Some(n) = options.limit {
        docs.truncate(n);
    }
    Ok(run(docs, options, &agent))
}

fn agent() -> ureq::Agent {
    let config = ureq::Agent::config_builder()
        .max_redirects(5)
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(60)))
        .build();
    ureq::Agent::new_with_config(config)
}

fn get(agent: &ureq::Agent, config: &Config, url: &str) -> Result<Vec<u8>, String> {
    let mut req = agent.get(url);
    if let Some(token) = url::Url::parse(url).ok().and_then(|u| u.host_str().and_then(|h| config.token_for(h))) {
        req = req.header("Authorization", format!("Bearer {token}"));
    }
    let mut resp = req.call().map_err(|e| e.to_string())?;
    let status = resp.status();
    if !status.is_success() {
        return Err(format!("HTTP {}", status.as_u16()));
    }
    resp.body_mut().with_config().limit(64 * 1024 * 1024).read_to_vec().map_err(|e| e.to_string())
}
