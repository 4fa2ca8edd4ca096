//! HTTP API over a directory of `.anp.json` models.
//!
//! | Method | Path | |
//! |---|---|---|
//! | `POST` | `/api/models` | create from a model document |
//! | `GET` | `/api/models` | summaries |
//! | `GET` | `/api/models/{id}` | canonical document, revision in `x-anp-revision` |
//! | `PUT` | `/api/models/{id}/judgments/{slot}/{pair}` | store one judgment |
//! | `POST` | `/api/models/{id}/solve` | full solve, result persisted |
//! | `POST` | `/api/models/{id}/whatif` | perturbed solve, nothing persisted |
//! | `GET` | `/api/models/{id}/result` | last persisted result |
//! | `GET` | `/api/health` | liveness |

mod error;
pub mod store;

use std::path::PathBuf;
use std::sync::Arc;

use anp_core::model::{digest, load, ModelDocument, ENGINE_VERSION};
use anp_core::priority::screen_consistency;
use anp_core::{
    principal_eigenvector, solve, whatif, ConsistencyPolicy, ConsistencyVerdict, Judgment,
    Override, PairKey, ResultDocument, SlotKey, SolveOptions,
};
use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

pub use error::ApiError;
use store::{is_valid_id, ModelStore, StoredModel};

pub const REVISION_HEADER: &str = "x-anp-revision";

/// Server-wide overrides applied on top of each model's own options.
#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub policy: Option<ConsistencyPolicy>,
    pub strict: Option<bool>,
    /// Static files served for every path outside `/api`.
    pub ui_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct AppState {
    pub store: ModelStore,
    pub config: ServiceConfig,
}

impl AppState {
    pub fn new(store: ModelStore, config: ServiceConfig) -> Arc<Self> {
        Arc::new(Self { store, config })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/models", post(create_model).get(list_models))
        .route("/api/models/{id}", get(get_model))
        .route(
            "/api/models/{id}/judgments/{slot}/{pair}",
            put(put_judgment),
        )
        .route("/api/models/{id}/solve", post(solve_model))
        .route("/api/models/{id}/whatif", post(whatif_model))
        .route("/api/models/{id}/result", get(get_result));
    let api = match &state.config.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    api.with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

type ApiResult<T> = Result<T, ApiError>;

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "engine": ENGINE_VERSION }))
}

fn json_bytes(status: StatusCode, body: Vec<u8>) -> Response {
    (
        status,
        [(
            header::CONTENT_TYPE,
            HeaderValue::from_static("application/json"),
        )],
        body,
    )
        .into_response()
}

fn snapshot(state: &AppState, id: &str) -> ApiResult<StoredModel> {
    if !is_valid_id(id) {
        return Err(ApiError::not_found(format!("no model {id:?}")));
    }
    state
        .store
        .snapshot(id)
        .ok_or_else(|| ApiError::not_found(format!("no model {id:?}")))
}

#[derive(Debug, Serialize)]
struct Created {
    id: String,
    revision: u64,
    digest: String,
}

async fn create_model(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let doc = load(&body)?;
    let report = doc.validate();
    if !report.is_clean() {
        return Err(ApiError::invalid(&report));
    }
    let id = uuid::Uuid::new_v4().simple().to_string();
    let stored = state.store.insert(&id, doc)?;
    let body = Created {
        revision: stored.revision,
        digest: digest(&stored.doc),
        id: id.clone(),
    };
    let location = HeaderValue::from_str(&format!("/api/models/{id}")).expect("ascii id");
    Ok((
        StatusCode::CREATED,
        [(header::LOCATION, location)],
        Json(body),
    )
        .into_response())
}

async fn list_models(State(state): State<Arc<AppState>>) -> Json<Vec<store::ModelSummary>> {
    Json(state.store.list())
}

async fn get_model(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let m = snapshot(&state, &id)?;
    let mut resp = json_bytes(StatusCode::OK, anp_core::save(&m.doc));
    let headers = resp.headers_mut();
    headers.insert(REVISION_HEADER, HeaderValue::from(m.revision));
    headers.insert(
        header::ETAG,
        HeaderValue::from_str(&format!("\"{}\"", m.revision)).expect("digits"),
    );
    Ok(resp)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JudgmentBody {
    value: serde_json::Value,
    /// Revision the client last saw. Omitted means last write wins.
    #[serde(default)]
    revision: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotPriority {
    pub weights: Vec<f64>,
    pub lambda_max: f64,
    pub ci: f64,
    pub cr: f64,
}

/// Fill state of one slot after an edit, plus its priorities and verdict
/// once every pair is rated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencySnapshot {
    pub model: String,
    pub revision: u64,
    pub slot: SlotKey,
    pub elements: Vec<String>,
    pub filled: usize,
    pub total: usize,
    pub complete: bool,
    pub policy: ConsistencyPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<SlotPriority>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ConsistencyVerdict>,
}

fn parse_value(v: &serde_json::Value) -> ApiResult<Judgment> {
    let text = match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => {
            return Err(ApiError::unprocessable(format!(
                "judgment must be a string like \"3\" or \"1/5\", got {other}"
            )))
        }
    };
    text.parse()
        .map_err(|e| ApiError::unprocessable(format!("{e}")))
}

async fn put_judgment(
    State(state): State<Arc<AppState>>,
    Path((id, slot, pair)): Path<(String, String, String)>,
    body: Bytes,
) -> ApiResult<Json<ConsistencySnapshot>> {
    let current = snapshot(&state, &id)?;
    let body: JudgmentBody = serde_json::from_slice(&body)
        .map_err(|e| ApiError::bad_request(format!("request body: {e}"), "$"))?;
    let slot: SlotKey = slot
        .parse()
        .map_err(|_| ApiError::not_found(format!("no slot {slot:?}")))?;
    let pair: PairKey = pair
        .parse()
        .map_err(|_| ApiError::not_found(format!("no pair {pair:?}")))?;
    if current.doc.topology_network().edge(&slot).is_none() {
        return Err(ApiError::not_found(format!("no slot {slot} in model {id}")));
    }
    let value = parse_value(&body.value)?;

    let outcome = state
        .store
        .update(&id, |m| {
            if let Some(expected) = body.revision {
                if expected != m.revision {
                    return Err(ApiError::conflict(expected, m.revision));
                }
            }
            m.doc
                .set_judgment(&slot, &pair, value)
                .map_err(ApiError::from)
        })
        .ok_or_else(|| ApiError::not_found(format!("no model {id:?}")))??;
    let ((), stored) = outcome?;
    Ok(Json(consistency_snapshot(&state, &id, &stored, &slot)?))
}

fn consistency_snapshot(
    state: &AppState,
    id: &str,
    m: &StoredModel,
    slot: &SlotKey,
) -> ApiResult<ConsistencySnapshot> {
    let opts = effective_options(state, &m.doc, &SolveRequest::default())?;
    let fill = m.doc.slot_state(slot).expect("slot checked before edit");
    let net = m.doc.to_network();
    let matrix = net.edge(slot).and_then(|e| e.matrix.as_ref());
    let mut snap = ConsistencySnapshot {
        model: id.to_string(),
        revision: m.revision,
        slot: slot.clone(),
        elements: fill.elements,
        filled: fill.filled,
        total: fill.total,
        complete: fill.filled == fill.total,
        policy: opts.consistency.policy,
        priority: None,
        verdict: None,
    };
    if let Some(matrix) = matrix {
        let pv = principal_eigenvector(matrix, &opts.rci)
            .map_err(|e| ApiError::unprocessable(e.to_string()))?;
        snap.verdict = Some(screen_consistency(
            &pv,
            matrix.order(),
            opts.consistency.policy,
        ));
        snap.priority = Some(SlotPriority {
            weights: pv.weights,
            lambda_max: pv.lambda_max,
            ci: pv.ci,
            cr: pv.cr,
        });
    }
    Ok(snap)
}

/// Optional per-request overrides for a solve.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveRequest {
    pub policy: Option<ConsistencyPolicy>,
    pub strict: Option<bool>,
    pub tolerance: Option<f64>,
    pub max_power: Option<u64>,
}

fn effective_options(
    state: &AppState,
    doc: &ModelDocument,
    req: &SolveRequest,
) -> ApiResult<SolveOptions> {
    let mut opts = doc.solve_options(
        req.policy.or(state.config.policy),
        req.strict.or(state.config.strict),
    )?;
    if let Some(t) = req.tolerance {
        opts.convergence.tolerance = t;
    }
    if let Some(p) = req.max_power {
        opts.convergence.max_power = p;
    }
    Ok(opts)
}

fn parse_optional<T: serde::de::DeserializeOwned + Default>(body: &[u8]) -> ApiResult<T> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("request body: {e}"), "$"))
}

async fn solve_model(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let req: SolveRequest = parse_optional(&body)?;
    let m = snapshot(&state, &id)?;
    let opts = effective_options(&state, &m.doc, &req)?;
    let solution = solve(&m.doc.to_network(), &opts)?;
    let result = ResultDocument::new(&m.doc, &solution, &opts);
    state.store.save_result(&id, &result)?;
    let mut resp = json_bytes(StatusCode::OK, result.to_json());
    resp.headers_mut()
        .insert(REVISION_HEADER, HeaderValue::from(m.revision));
    Ok(resp)
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct WhatIfRequest {
    overrides: Vec<Override>,
}

async fn whatif_model(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<anp_core::WhatIf>> {
    let req: WhatIfRequest = parse_optional(&body)?;
    let m = snapshot(&state, &id)?;
    let opts = effective_options(&state, &m.doc, &SolveRequest::default())?;
    Ok(Json(whatif(&m.doc.to_network(), &req.overrides, &opts)?))
}

async fn get_result(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    snapshot(&state, &id)?;
    match state.store.load_result(&id)? {
        Some(bytes) => Ok(json_bytes(StatusCode::OK, bytes)),
        None => Err(ApiError::not_found(format!(
            "model {id} has not been solved"
        ))),
    }
}
