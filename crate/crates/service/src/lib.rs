//! HTTP/JSON debugging sessions.
//!
//! `POST /sessions` runs one check and keeps the result in memory;
//! the trace and watch endpoints then read from that session. Sessions are
//! immutable once created, live only as long as the process, and the
//! oldest unused one is dropped when the store is full.

mod store;

use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dynscope_core::lang::error::Diagnostic;
use dynscope_core::lang::typed::TypedModel;
use dynscope_core::{
    check, check_unroll_sufficiency, evaluate_watch, AnalysisError, Bounds, CheckOptions, Counterexample, ModelError,
    TranslateError, Verdict, WatchError,
};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, SystemTime};
use store::Lru;
use tower_http::cors::{AllowOrigin, CorsLayer};

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub max_sessions: usize,
    /// Analyses running longer than this are abandoned with 504.
    pub timeout: Duration,
    /// Origin allowed to call the API from a browser.
    pub allow_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            max_sessions: 32,
            timeout: Duration::from_secs(60),
            allow_origin: None,
        }
    }
}

pub struct Session {
    pub id: String,
    pub source: String,
    pub assertion: String,
    pub bounds: Bounds,
    pub model: TypedModel,
    pub result: Outcome,
    pub created: SystemTime,
}

pub enum Outcome {
    Valid { warning: Option<String> },
    Counterexample { cx: Box<Counterexample>, trace: String },
}

struct AppState {
    cfg: ServiceConfig,
    sessions: Mutex<Lru<Session>>,
}

type Shared = Arc<AppState>;

#[derive(Debug, Serialize)]
struct ErrorItem {
    span: [usize; 2],
    message: String,
}

/// Error body: a summary plus positioned items when there are any.
#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<ErrorItem>,
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: error.into(),
                errors: Vec::new(),
            },
        }
    }

    fn with_spans(status: StatusCode, error: impl Into<String>, diags: Vec<Diagnostic>) -> Self {
        let errors = diags
            .into_iter()
            .map(|d| ErrorItem {
                span: [d.span.start, d.span.end],
                message: d.message,
            })
            .collect();
        ApiError {
            status,
            body: ErrorBody {
                error: error.into(),
                errors,
            },
        }
    }

    fn not_found() -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "no such session")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        let status = match &e {
            AnalysisError::Translate(TranslateError::Recursion(_)) => StatusCode::BAD_REQUEST,
            AnalysisError::Translate(_) => StatusCode::UNPROCESSABLE_ENTITY,
            AnalysisError::Interrupted => StatusCode::GATEWAY_TIMEOUT,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

fn default_scope() -> i64 {
    3
}

fn default_bitwidth() -> i64 {
    4
}

#[derive(Debug, Deserialize)]
struct CreateBody {
    model: String,
    assertion: String,
    #[serde(default = "default_scope")]
    scope: i64,
    #[serde(default = "default_scope")]
    unroll: i64,
    #[serde(default = "default_bitwidth")]
    bitwidth: i64,
}

#[derive(Serialize)]
struct CreateResponse {
    id: String,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

#[derive(Debug, Deserialize)]
struct EvalBody {
    step: i64,
    expr: String,
}

pub fn router(cfg: ServiceConfig) -> Router {
    let cors = cfg
        .allow_origin
        .as_deref()
        .and_then(|o| HeaderValue::from_str(o).ok())
        .map(|origin| {
            CorsLayer::new()
                .allow_origin(AllowOrigin::exact(origin))
                .allow_methods([Method::GET, Method::POST, Method::DELETE])
                .allow_headers([header::CONTENT_TYPE])
        });
    let state = Arc::new(AppState {
        sessions: Mutex::new(Lru::new(cfg.max_sessions)),
        cfg,
    });
    let app = Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", axum::routing::delete(delete_session))
        .route("/sessions/{id}/trace", get(get_trace))
        .route("/sessions/{id}/eval", post(eval_expression))
        .with_state(state);
    match cors {
        Some(layer) => app.layer(layer),
        None => app,
    }
}

/// Serves until interrupted with Ctrl-C.
pub async fn serve(addr: SocketAddr, cfg: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(cfg))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

fn bounds_of(b: &CreateBody) -> Result<Bounds, ApiError> {
    let bad = |m: &str| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, m);
    let scope = usize::try_from(b.scope).map_err(|_| bad("scope must be at least 1"))?;
    let unroll = usize::try_from(b.unroll).map_err(|_| bad("unroll must be at least 1"))?;
    let bitwidth = u32::try_from(b.bitwidth).map_err(|_| bad("bitwidth must be between 1 and 16"))?;
    let bounds = Bounds::new(scope, unroll, bitwidth);
    bounds.validate().map_err(|e| bad(&e.to_string()))?;
    Ok(bounds)
}

fn analyze(body: CreateBody, bounds: Bounds, interrupt: Arc<AtomicBool>) -> Result<Session, ApiError> {
    let model = dynscope_core::load(&body.model).map_err(|e| {
        let summary = match &e {
            ModelError::Syntax(_) => "syntax error".to_string(),
            ModelError::Resolve(_) => e.to_string(),
        };
        ApiError::with_spans(StatusCode::BAD_REQUEST, summary, e.diagnostics())
    })?;
    let opts = CheckOptions {
        interrupt: Some(interrupt),
        ..CheckOptions::default()
    };
    let report = check(&model, &body.assertion, &bounds, &opts)?;
    let result = match report.verdict {
        Verdict::Counterexample(cx) => {
            let trace = cx.trace.to_json();
            Outcome::Counterexample { cx, trace }
        }
        Verdict::Valid => {
            let warning = check_unroll_sufficiency(&model, &body.assertion, &bounds, &opts)?.then(|| {
                format!(
                    "unroll bound {} may cut loops short; longer executions were not checked",
                    bounds.unroll
                )
            });
            Outcome::Valid { warning }
        }
    };
    Ok(Session {
        id: uuid::Uuid::new_v4().to_string(),
        source: body.model,
        assertion: body.assertion,
        bounds,
        model,
        result,
        created: SystemTime::now(),
    })
}

async fn create_session(State(st): State<Shared>, Json(body): Json<CreateBody>) -> Result<Response, ApiError> {
    let bounds = bounds_of(&body)?;
    let flag = Arc::new(AtomicBool::new(false));
    let job = {
        let flag = flag.clone();
        tokio::task::spawn_blocking(move || analyze(body, bounds, flag))
    };
    let session = match tokio::time::timeout(st.cfg.timeout, job).await {
        Ok(Ok(r)) => r?,
        Ok(Err(e)) => {
            return Err(ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                format!("analysis failed: {e}"),
            ))
        }
        Err(_) => {
            flag.store(true, Ordering::Relaxed);
            return Err(ApiError::new(
                StatusCode::GATEWAY_TIMEOUT,
                format!("analysis exceeded {:?}", st.cfg.timeout),
            ));
        }
    };
    let resp = match &session.result {
        Outcome::Valid { warning } => CreateResponse {
            id: session.id.clone(),
            verdict: "valid",
            trace: None,
            warning: warning.clone(),
        },
        Outcome::Counterexample { trace, .. } => CreateResponse {
            id: session.id.clone(),
            verdict: "counterexample",
            trace: Some(RawValue::from_string(trace.clone()).expect("trace is JSON")),
            warning: None,
        },
    };
    st.sessions
        .lock()
        .expect("session store")
        .insert(session.id.clone(), session);
    Ok(Json(resp).into_response())
}

fn session(st: &Shared, id: &str) -> Result<Arc<Session>, ApiError> {
    st.sessions
        .lock()
        .expect("session store")
        .get(id)
        .ok_or_else(ApiError::not_found)
}

fn counterexample(s: &Session) -> Result<(&Counterexample, &str), ApiError> {
    match &s.result {
        Outcome::Counterexample { cx, trace } => Ok((cx, trace)),
        Outcome::Valid { .. } => Err(ApiError::new(
            StatusCode::CONFLICT,
            "the assertion holds; there is no trace",
        )),
    }
}

async fn get_trace(State(st): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = session(&st, &id)?;
    let (_, trace) = counterexample(&s)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], trace.to_string()).into_response())
}

async fn eval_expression(
    State(st): State<Shared>,
    Path(id): Path<String>,
    Json(body): Json<EvalBody>,
) -> Result<Response, ApiError> {
    let s = session(&st, &id)?;
    let (cx, _) = counterexample(&s)?;
    let step = usize::try_from(body.step)
        .ok()
        .filter(|&i| i < cx.states.len())
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "step out of range"))?;
    let result = evaluate_watch(&s.model, cx, step, &body.expr).map_err(|e| {
        let span = match &e {
            WatchError::Syntax(x) => Some(x.span),
            WatchError::Resolve(x) => Some(x.span),
            _ => None,
        };
        let diags = span
            .map(|span| {
                vec![Diagnostic {
                    span,
                    message: e.to_string(),
                }]
            })
            .unwrap_or_default();
        ApiError::with_spans(StatusCode::BAD_REQUEST, e.to_string(), diags)
    })?;
    Ok(Json(result).into_response())
}

async fn delete_session(State(st): State<Shared>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    if st.sessions.lock().expect("session store").remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::not_found())
    }
}
