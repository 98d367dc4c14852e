//! JSON-over-HTTP facade over a corpus store.
//!
//! Readers take a cheap snapshot (`Arc` clone) of the current state; writers
//! are serialized, build the next state off to the side and swap it in, so a
//! query never sees a half-ingested document.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use layoutsearch_core::graph::{HypothesisId, HypothesisRecord, SourceMeta};
use layoutsearch_core::index::CorpusStore;
use layoutsearch_core::ingest::{annotation_meta, ingest_annotation, ingest_image, sniff_input, PageInput, PipelineParams};
use layoutsearch_core::query::{parse_query, run_query};
use layoutsearch_core::geometry::PageDims;
use layoutsearch_core::Error;

use crate::config::ServiceConfig;

/// Uploaded page image kept for `/documents/{id}/image`.
#[derive(Debug, Clone)]
pub struct StoredImage {
    pub bytes: Bytes,
    pub content_type: &'static str,
}

/// Everything a request can observe; replaced wholesale on every write.
#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    pub store: CorpusStore,
    pub images: HashMap<String, StoredImage>,
}

pub struct AppState {
    current: RwLock<Arc<Snapshot>>,
    writer: tokio::sync::Mutex<()>,
    pipeline: PipelineParams,
    top_k: usize,
    /// Corpus file rewritten after each accepted document.
    persist_to: Option<PathBuf>,
}

impl AppState {
    pub fn new(store: CorpusStore, cfg: &ServiceConfig, persist_to: Option<PathBuf>) -> Arc<Self> {
        Arc::new(Self {
            current: RwLock::new(Arc::new(Snapshot {
                store,
                images: HashMap::new(),
            })),
            writer: tokio::sync::Mutex::new(()),
            pipeline: PipelineParams::default(),
            top_k: cfg.top_k,
            persist_to,
        })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("state lock poisoned").clone()
    }

    fn publish(&self, next: Snapshot) {
        *self.current.write().expect("state lock poisoned") = Arc::new(next);
    }
}

/// Largest accepted request body; an uncompressed 300 dpi page is ~9 MB.
pub const MAX_UPLOAD: usize = 64 << 20;

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/healthz", get(healthz))
        .route("/documents", post(post_document))
        .route("/documents/{id}/hypotheses/{h}", get(get_hypothesis))
        .route("/documents/{id}/image", get(get_image))
        .route("/query", post(post_query))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub reason: String,
}

struct ApiError {
    status: StatusCode,
    code: &'static str,
    reason: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, reason: impl Into<String>) -> Self {
        Self {
            status,
            code,
            reason: reason.into(),
        }
    }

    fn not_found(code: &'static str, reason: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, reason)
    }

    fn internal(reason: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", reason)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                code: self.code.to_string(),
                reason: self.reason,
            },
        };
        (self.status, Json(body)).into_response()
    }
}

/// Maps ingestion failures onto 400/409.
fn ingest_error(e: Error) -> ApiError {
    match e {
        Error::DuplicateDocument(id) => {
            ApiError::new(StatusCode::CONFLICT, "duplicate_document", format!("document `{id}` already indexed"))
        }
        Error::Decode(m) => ApiError::new(StatusCode::BAD_REQUEST, "undecodable_input", m),
        Error::Json(e) => ApiError::new(StatusCode::BAD_REQUEST, "undecodable_input", e.to_string()),
        e @ Error::Io(_) => ApiError::internal(e.to_string()),
        e => ApiError::new(StatusCode::BAD_REQUEST, "invalid_document", e.to_string()),
    }
}

async fn healthz() -> &'static str {
    "ok"
}

#[derive(Debug, Deserialize)]
pub struct DocumentParams {
    pub doc_id: Option<String>,
    #[serde(default)]
    pub replace: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub doc_id: String,
}

fn image_type(bytes: &[u8]) -> &'static str {
    if bytes.starts_with(b"\x89PNG") {
        "image/png"
    } else {
        "image/x-portable-graymap"
    }
}

async fn post_document(
    State(state): State<Arc<AppState>>,
    Query(params): Query<DocumentParams>,
    body: Bytes,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let pipeline = state.pipeline.clone();
    let raw = body.clone();
    // segmentation is CPU-bound; keep it off the async workers
    let (doc_id, graphs, meta, image) = tokio::task::spawn_blocking(move || -> Result<_, ApiError> {
        match sniff_input(&raw).map_err(ingest_error)? {
            PageInput::Annotation(mut ann) => {
                if let Some(id) = params.doc_id {
                    ann.doc_id = id;
                }
                let graphs = ingest_annotation(&ann, &pipeline.graph).map_err(ingest_error)?;
                Ok((ann.doc_id, graphs, annotation_meta(), None))
            }
            PageInput::Image(img) => {
                let id = params.doc_id.filter(|s| !s.is_empty()).ok_or_else(|| {
                    ApiError::new(StatusCode::BAD_REQUEST, "missing_doc_id", "image uploads need a doc_id parameter")
                })?;
                let (graphs, meta) = ingest_image(&id, &img, &pipeline).map_err(ingest_error)?;
                let stored = StoredImage {
                    content_type: image_type(&raw),
                    bytes: raw,
                };
                Ok((id, graphs, meta, Some(stored)))
            }
        }
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;

    let _guard = state.writer.lock().await;
    let mut next = (*state.snapshot()).clone();
    next.store.insert(graphs, Some(meta), params.replace).map_err(ingest_error)?;
    match image {
        Some(img) => next.images.insert(doc_id.clone(), img),
        None => next.images.remove(&doc_id),
    };
    if let Some(path) = &state.persist_to {
        next.store.save(path).map_err(|e| ApiError::internal(e.to_string()))?;
    }
    state.publish(next);
    Ok((StatusCode::CREATED, Json(Created { doc_id })))
}

#[derive(Debug, Deserialize)]
pub struct QueryParams {
    pub top: Option<usize>,
    #[serde(default)]
    pub no_hash: bool,
}

async fn post_query(
    State(state): State<Arc<AppState>>,
    Query(params): Query<QueryParams>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body)
        .map_err(|_| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "malformed", "query is not UTF-8"))?;
    let parsed = parse_query(text)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string()))?;
    let top = params.top.unwrap_or(state.top_k).max(1);
    let snap = state.snapshot();
    let response = tokio::task::spawn_blocking(move || run_query(&snap.store, &parsed, !params.no_hash, Some(top)))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
    let bytes = serde_json::to_vec(&response).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

/// One hypothesis graph of a stored document.
#[derive(Debug, Serialize, Deserialize)]
pub struct HypothesisJson {
    pub doc_id: String,
    pub page: PageDims,
    pub ach_doc: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceMeta>,
    /// Earlier hypothesis with an identical graph, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duplicate_of: Option<HypothesisId>,
    pub hypothesis: HypothesisRecord,
}

async fn get_hypothesis(
    State(state): State<Arc<AppState>>,
    Path((id, h)): Path<(String, String)>,
) -> Result<Json<HypothesisJson>, ApiError> {
    let snap = state.snapshot();
    let doc = snap
        .store
        .get(&id)
        .ok_or_else(|| ApiError::not_found("unknown_document", format!("unknown document `{id}`")))?;
    let hid: HypothesisId = h
        .parse()
        .map_err(|_| ApiError::not_found("unknown_hypothesis", format!("unknown hypothesis `{h}`")))?;
    let g = doc.graph(hid);
    Ok(Json(HypothesisJson {
        doc_id: id,
        page: g.page,
        ach_doc: g.ach_doc,
        source: doc.source.clone(),
        duplicate_of: doc.duplicate_of(hid),
        hypothesis: HypothesisRecord::from_graph(g),
    }))
}

async fn get_image(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = state.snapshot();
    if !snap.store.contains(&id) {
        return Err(ApiError::not_found("unknown_document", format!("unknown document `{id}`")));
    }
    let img = snap
        .images
        .get(&id)
        .ok_or_else(|| ApiError::not_found("no_raster_source", "no raster source"))?;
    Ok(([(header::CONTENT_TYPE, img.content_type)], img.bytes.clone()).into_response())
}
