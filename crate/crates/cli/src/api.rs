//! HTTP API over the experiment runner.
//!
//! * `POST /api/v1/run` takes an experiment document (optionally with
//!   `client_tag` and `sweep`) and returns summaries, pmfs, delay curves and
//!   chart series.
//! * `GET /api/v1/health` reports liveness and version.
//! * `GET /api/v1/examples/{model}` returns a shipped example document.

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use wardsim::engine::{SimTime, Simulation};
use wardsim::experiment::{ConfigError, FieldError};
use wardsim::{Experiment, ExperimentError, ModelId, SweepAxis};

use crate::report::{execute, RunReport};

pub const MAX_BODY_BYTES: usize = 1024 * 1024;
pub const DEFAULT_MAX_REPLICATION_YEARS: f64 = 2000.0;

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub bind: SocketAddr,
    pub cors_origins: Vec<String>,
    pub max_replication_years: f64,
}

#[derive(Debug, Clone)]
pub struct AppState {
    pub max_replication_years: f64,
}

impl Default for AppState {
    fn default() -> Self {
        AppState {
            max_replication_years: DEFAULT_MAX_REPLICATION_YEARS,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResponse {
    #[serde(flatten)]
    pub report: RunReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub client_tag: Option<String>,
    pub duration_ms: f64,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    fields: Vec<FieldError>,
}

fn error(status: StatusCode, message: impl Into<String>, fields: Vec<FieldError>) -> Response {
    (
        status,
        Json(ErrorBody {
            error: message.into(),
            fields,
        }),
    )
        .into_response()
}

fn invalid(e: ConfigError) -> Response {
    error(
        StatusCode::UNPROCESSABLE_ENTITY,
        "invalid experiment",
        e.errors().to_vec(),
    )
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/run", post(run))
        .route("/api/v1/health", get(health))
        .route("/api/v1/examples/{model}", get(example))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(Arc::new(state))
}

fn cors(origins: &[String]) -> anyhow::Result<Option<CorsLayer>> {
    if origins.is_empty() {
        return Ok(None);
    }
    let allow = if origins.iter().any(|o| o == "*") {
        AllowOrigin::from(Any)
    } else {
        let list = origins
            .iter()
            .map(|o| HeaderValue::from_str(o).map_err(|_| anyhow::anyhow!("bad origin {o:?}")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        AllowOrigin::list(list)
    };
    Ok(Some(
        CorsLayer::new()
            .allow_origin(allow)
            .allow_methods([Method::GET, Method::POST])
            .allow_headers(Any),
    ))
}

/// Builds the service with optional CORS.
pub fn app(config: &ServeConfig) -> anyhow::Result<Router> {
    let router = router(AppState {
        max_replication_years: config.max_replication_years,
    });
    Ok(match cors(&config.cors_origins)? {
        Some(layer) => router.layer(layer),
        None => router,
    })
}

/// Serves until interrupted.
pub fn serve(config: ServeConfig) -> anyhow::Result<()> {
    let app = app(&config)?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(config.bind).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

/// Replication-years a request asks for, used to bound request cost.
fn replication_years(exp: &Experiment) -> f64 {
    let s = exp.settings();
    let per_year = match exp.model_id() {
        ModelId::Ccu => wardsim::models::ccu::HOURS_PER_YEAR,
        ModelId::Stroke => wardsim::models::stroke::DAYS_PER_YEAR,
    };
    s.run_length / per_year * f64::from(s.replications)
}

/// Splits a request body into the experiment, client tag and sweep.
pub fn parse_request(body: &[u8]) -> Result<(Experiment, Option<String>, Option<SweepAxis>), ConfigError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Err(ConfigError::single("", "request body is empty"));
    }
    let value: Value = serde_json::from_slice(body)
        .map_err(|e| ConfigError::single("", format!("invalid JSON: {e}")))?;
    let Value::Object(mut map) = value else {
        return Err(ConfigError::single("", "expected a JSON object"));
    };
    let tag = match map.remove("client_tag") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s),
        Some(_) => return Err(ConfigError::single("client_tag", "must be a string")),
    };
    let sweep = match map.remove("sweep") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            serde_json::from_value::<SweepAxis>(v)
                .map_err(|e| ConfigError::single("sweep", e.to_string()))?,
        ),
    };
    let exp = Experiment::parse_value(Value::Object(map))?;
    exp.validate()?;
    Ok((exp, tag, sweep))
}

async fn run(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let (exp, client_tag, sweep) = match parse_request(&body) {
        Ok(parts) => parts,
        Err(e) => return invalid(e),
    };
    let scenarios = sweep.as_ref().map_or(1, |s| s.values.len().max(1)) as f64;
    let cost = replication_years(&exp) * scenarios;
    if cost > state.max_replication_years {
        return invalid(ConfigError::single(
            "replications",
            format!(
                "run length x replications x scenarios is {cost:.1} replication-years, above the server limit of {}",
                state.max_replication_years
            ),
        ));
    }
    let outcome = tokio::task::spawn_blocking(move || execute(&exp, sweep.as_ref())).await;
    match outcome {
        Ok(Ok(exec)) => Json(RunResponse {
            report: exec.report,
            client_tag,
            duration_ms: exec.elapsed_ms,
        })
        .into_response(),
        Ok(Err(ExperimentError::Config(e))) => invalid(e),
        Ok(Err(e)) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string(), vec![]),
        Err(_) => error(StatusCode::INTERNAL_SERVER_ERROR, "simulation failed", vec![]),
    }
}

/// Fires a single event to confirm the kernel works.
fn kernel_alive() -> bool {
    let mut sim = Simulation::new();
    let Ok(at) = SimTime::new(1.0) else {
        return false;
    };
    if sim.schedule(at, ()).is_err() {
        return false;
    }
    let mut fired = 0;
    sim.run_until(at, &mut |_: &mut Simulation<()>, ()| fired += 1);
    fired == 1
}

async fn health() -> Response {
    let started = Instant::now();
    if kernel_alive() {
        Json(json!({
            "status": "ok",
            "version": wardsim::VERSION,
            "check_ms": started.elapsed().as_secs_f64() * 1000.0,
        }))
        .into_response()
    } else {
        error(StatusCode::SERVICE_UNAVAILABLE, "simulation kernel unavailable", vec![])
    }
}

async fn example(Path(model): Path<String>) -> Response {
    match model.parse::<ModelId>() {
        Ok(m) => {
            let doc: Value =
                serde_json::from_str(Experiment::example_json(m)).expect("shipped example is JSON");
            Json(doc).into_response()
        }
        Err(e) => error(StatusCode::NOT_FOUND, e, vec![]),
    }
}
