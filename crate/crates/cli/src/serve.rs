//! Loopback HTTP API for the editor. Handlers share no state beyond their
//! configuration; uploads land in a scratch directory per request.

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, FromRequest, Multipart, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use croissant_forge::infer::{self, InferError};
use croissant_forge::records::{self, ReadOptions, RecordsError};
use croissant_forge::resources::{Cache, Config, Resolver};
use croissant_forge::validate;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::ServeArgs;
use crate::exit::SUCCESS;

pub const DEFAULT_PREVIEW_LIMIT: usize = 10;
pub const MAX_PREVIEW_LIMIT: usize = 1000;

#[derive(Debug, Clone)]
pub struct ServeConfig {
    /// Where relative contentUrls of previewed documents resolve.
    pub base_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub config: Config,
    pub max_upload: usize,
    /// Built editor served under `/`.
    pub assets: Option<PathBuf>,
}

impl ServeConfig {
    pub fn new(base_dir: impl Into<PathBuf>, cache_dir: impl Into<PathBuf>) -> ServeConfig {
        ServeConfig {
            base_dir: base_dir.into(),
            cache_dir: cache_dir.into(),
            config: Config::default(),
            max_upload: 100 * 1024 * 1024,
            assets: None,
        }
    }
}

struct ApiError(StatusCode, Value);

impl ApiError {
    fn new(status: StatusCode, message: impl std::fmt::Display) -> ApiError {
        ApiError(status, json!({ "error": message.to_string() }))
    }

    fn bad_request(message: impl std::fmt::Display) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

type Shared = Arc<ServeConfig>;

pub fn router(config: ServeConfig) -> Router {
    let limit = config.max_upload;
    let assets = config.assets.clone();
    let api = Router::new()
        .route("/api/schema", get(schema))
        .route("/api/validate", post(validate_doc))
        .route("/api/infer", post(infer_upload))
        .route("/api/records/preview", post(preview))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(Arc::new(config));
    match assets {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api.route("/", get(no_editor)),
    }
}

async fn no_editor() -> Html<&'static str> {
    Html(
        "<!doctype html><title>croissant-forge</title><p>The API is up under <code>/api</code>. \
          Start with <code>--assets DIR</code> to serve the editor.</p>",
    )
}

async fn schema() -> Json<Value> {
    Json(validate::schema())
}

fn parse_json(body: &[u8]) -> Result<Value, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("body is not JSON: {e}")))
}

async fn validate_doc(body: Bytes) -> Result<Json<validate::ValidationReport>, ApiError> {
    parse_json(&body)?;
    let report = match validate::load_and_validate(&body) {
        Ok((_, r)) | Err(r) => r,
    };
    Ok(Json(report))
}

#[derive(Debug, Deserialize)]
struct InferQuery {
    filename: Option<String>,
}

/// Base name of an uploaded file, refusing anything that could escape the
/// scratch directory.
fn upload_name(raw: &str) -> Result<String, ApiError> {
    let name = raw.rsplit(['/', '\\']).next().unwrap_or("").trim();
    if name.is_empty() || name == "." || name == ".." {
        return Err(ApiError::bad_request("the upload needs a file name"));
    }
    Ok(name.to_string())
}

fn scratch_err(e: std::io::Error) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("upload scratch: {e}"))
}

/// Accepts `multipart/form-data` (first part with a file name) or a raw
/// body named by `?filename=` or an `X-Filename` header.
async fn infer_upload(
    State(s): State<Shared>,
    Query(q): Query<InferQuery>,
    req: Request,
) -> Result<Json<Value>, ApiError> {
    let scratch = tempfile::tempdir().map_err(scratch_err)?;
    let is_multipart = req
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.to_ascii_lowercase().starts_with("multipart/form-data"));
    let (name, path) = if is_multipart {
        let mut form = Multipart::from_request(req, &s).await.map_err(|e| ApiError::new(e.status(), e.body_text()))?;
        loop {
            let field = form.next_field().await.map_err(|e| ApiError::new(e.status(), e.body_text()))?;
            let Some(mut field) = field else {
                return Err(ApiError::bad_request("the form has no file part"));
            };
            let Some(raw) = field.file_name().map(str::to_string) else { continue };
            let name = upload_name(&raw)?;
            let path = scratch.path().join(&name);
            let mut file = std::fs::File::create(&path).map_err(scratch_err)?;
            while let Some(chunk) = field.chunk().await.map_err(|e| ApiError::new(e.status(), e.body_text()))? {
                file.write_all(&chunk).map_err(scratch_err)?;
            }
            break (name, path);
        }
    } else {
        let header_name = req.headers().get("x-filename").and_then(|v| v.to_str().ok()).map(str::to_string);
        let name = upload_name(&q.filename.or(header_name).unwrap_or_default())?;
        let body = Bytes::from_request(req, &s).await.map_err(|e| ApiError::new(e.status(), e.body_text()))?;
        let path = scratch.path().join(&name);
        std::fs::write(&path, &body).map_err(scratch_err)?;
        (name, path)
    };
    let inferred = tokio::task::spawn_blocking(move || infer::infer(&name, &path))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))?;
    drop(scratch);
    match inferred {
        Ok(v) => Ok(Json(v)),
        Err(e @ InferError::Unsupported(_)) => Err(ApiError::new(StatusCode::UNSUPPORTED_MEDIA_TYPE, e)),
        Err(e @ InferError::Io(_)) => Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e)),
        Err(e) => Err(ApiError::bad_request(e)),
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct PreviewRequest {
    document: Value,
    record_set_id: Option<String>,
    limit: Option<usize>,
}

fn records_status(e: &RecordsError) -> StatusCode {
    match e {
        RecordsError::InvalidDocument(_) => StatusCode::UNPROCESSABLE_ENTITY,
        RecordsError::RecordSetUnknown(_) => StatusCode::NOT_FOUND,
        RecordsError::Resource(_) | RecordsError::Io { .. } => StatusCode::BAD_GATEWAY,
        _ => StatusCode::BAD_REQUEST,
    }
}

fn run_preview(s: &ServeConfig, req: PreviewRequest) -> Result<Value, ApiError> {
    let bytes = serde_json::to_vec(&req.document).expect("JSON value serializes");
    let unprocessable = |r: validate::ValidationReport| {
        ApiError(StatusCode::UNPROCESSABLE_ENTITY, serde_json::to_value(r).expect("report serializes"))
    };
    let (model, report) = validate::load_and_validate(&bytes).map_err(unprocessable)?;
    if !report.passed {
        return Err(unprocessable(report));
    }
    let record_set = match (req.record_set_id, model.record_sets.as_slice()) {
        (Some(id), _) => id,
        (None, [only]) => only.id.clone(),
        (None, _) => return Err(ApiError::bad_request("recordSetId is required")),
    };
    let resolver = Resolver::new(Cache::new(&s.cache_dir)).with_base_dir(&s.base_dir).with_config(s.config.clone());
    let fail = |e: RecordsError| ApiError::new(records_status(&e), e);
    let plan = records::plan(&model, &record_set, &resolver).map_err(fail)?;
    let limit = req.limit.unwrap_or(DEFAULT_PREVIEW_LIMIT).min(MAX_PREVIEW_LIMIT);
    let options = ReadOptions { limit: Some(limit), ..Default::default() };
    let mut stream = records::read_records(&plan, &options).map_err(fail)?;
    let rows: Vec<Value> = stream.by_ref().map(|r| r.map(|r| r.to_json())).collect::<Result<_, _>>().map_err(fail)?;
    Ok(json!({
        "recordSetId": plan.record_set_id,
        "records": rows,
        "warnings": stream.stats().warnings(),
    }))
}

async fn preview(State(s): State<Shared>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let req: PreviewRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("malformed request: {e}")))?;
    tokio::task::spawn_blocking(move || run_preview(&s, req))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))?
        .map(Json)
}

fn open_browser(url: &str) {
    let opener = if cfg!(target_os = "macos") { "open" } else { "xdg-open" };
    if let Err(e) = std::process::Command::new(opener).arg(url).spawn() {
        eprintln!("warning: could not open a browser: {e}");
    }
}

pub fn run(a: ServeArgs) -> Result<u8> {
    let base_dir = match a.base_dir {
        Some(d) => d,
        None => std::env::current_dir().context("current directory")?,
    };
    let mut config = ServeConfig::new(base_dir, Cache::from_env().root());
    config.config = Config::discover().context("loading configuration")?;
    config.max_upload = a.max_upload_mb.saturating_mul(1024 * 1024);
    config.assets = a.assets;
    if let Some(dir) = &config.assets {
        anyhow::ensure!(dir.is_dir(), crate::exit::Usage(format!("{} is not a directory", dir.display())));
    }
    let runtime = tokio::runtime::Runtime::new().context("starting the async runtime")?;
    runtime.block_on(async move {
        let addr = SocketAddr::new(a.bind, a.port);
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        let url = format!("http://{}", listener.local_addr()?);
        eprintln!("serving on {url}");
        if a.open {
            open_browser(&url);
        }
        axum::serve(listener, router(config)).await.context("serving")?;
        Ok(SUCCESS)
    })
}
