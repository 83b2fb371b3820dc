//! HTTP/JSON facade over the solver: solve with seat locks, builtin
//! classrooms, instance generation and a health probe.
//!
//! All student ids, rows and positions on the wire are one-based.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::{Any, CorsLayer};

use seatplan_core::builtin::{classroom_file, Classroom};
use seatplan_core::gen::{generate_one, GenConfig, GenError};
use seatplan_core::io::AssignmentFile;
use seatplan_core::{eval, solve_locked, Instance, InstanceFile, Locks, Seat, SolveParams, ViolationCounts};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const PORT_ENV: &str = "SEATPLAN_PORT";
pub const DEFAULT_PORT: u16 = 8080;
/// Largest class accepted by the generate endpoint.
pub const MAX_GENERATED_STUDENTS: usize = 500;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Hard wall-clock limit for one solve.
    pub solve_cap: Duration,
    /// Allowed CORS origin; any origin when `None`.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            solve_cap: Duration::from_secs(30),
            cors_origin: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AppState {
    ready: Arc<AtomicBool>,
    config: Arc<ServiceConfig>,
}

impl AppState {
    /// A state that reports 503 on `/healthz` until [`AppState::mark_ready`].
    pub fn starting(config: ServiceConfig) -> Self {
        Self {
            ready: Arc::new(AtomicBool::new(false)),
            config: Arc::new(config),
        }
    }

    pub fn ready(config: ServiceConfig) -> Self {
        let s = Self::starting(config);
        s.mark_ready();
        s
    }

    pub fn mark_ready(&self) {
        self.ready.store(true, Ordering::SeqCst);
    }
}

/// Error payload: `{"error": "...", "details": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        Self {
            status: status.as_u16(),
            error: error.into(),
            details: Vec::new(),
        }
    }

    fn bad_request(error: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, error)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

/// Optional overrides of the solver defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsOverride {
    pub theta: Option<f64>,
    pub it_max: Option<usize>,
    pub eta_max: Option<usize>,
    pub psi: Option<f64>,
    pub gamma_frac: Option<f64>,
    pub candidate_min: Option<usize>,
    pub candidate_max: Option<usize>,
    pub seed: Option<u64>,
    /// Capped by the service limit.
    pub time_limit_ms: Option<u64>,
}

impl ParamsOverride {
    fn apply(&self, cap: Duration) -> SolveParams {
        let d = SolveParams::default();
        let limit = self.time_limit_ms.map(Duration::from_millis).map_or(cap, |t| t.min(cap));
        SolveParams {
            theta: self.theta.unwrap_or(d.theta),
            it_max: self.it_max.unwrap_or(d.it_max),
            eta_max: self.eta_max.unwrap_or(d.eta_max),
            psi: self.psi.unwrap_or(d.psi),
            gamma_frac: self.gamma_frac.unwrap_or(d.gamma_frac),
            candidate_min: self.candidate_min.unwrap_or(d.candidate_min),
            candidate_max: self.candidate_max.unwrap_or(d.candidate_max),
            seed: self.seed.unwrap_or(d.seed),
            time_limit: Some(limit),
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRequest {
    pub instance: InstanceFile,
    #[serde(default)]
    pub params: ParamsOverride,
    /// Student id → `[row, pos]`.
    #[serde(default)]
    pub locks: BTreeMap<usize, [usize; 2]>,
}

/// A conflict pair in consecutive rows, for the chart overlay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeView {
    pub a: usize,
    pub b: usize,
    pub seat_a: [usize; 2],
    pub seat_b: [usize; 2],
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResponse {
    pub assignment: AssignmentFile,
    pub f: i64,
    pub f_p: i64,
    pub feasible: bool,
    pub violations: ViolationCounts,
    pub active_edges: Vec<EdgeView>,
    pub seed: u64,
    pub iterations: usize,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuiltinEntry {
    pub name: String,
    pub instance: InstanceFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub version: String,
}

fn one_based(s: Seat) -> [usize; 2] {
    [s.row + 1, s.pos + 1]
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request: {e}")))
}

fn build_locks(inst: &Instance, locks: &BTreeMap<usize, [usize; 2]>) -> Result<Locks, ApiError> {
    let mut pins = Vec::with_capacity(locks.len());
    for (&id, &[row, pos]) in locks {
        if id == 0 || id > inst.num_students() {
            return Err(ApiError::bad_request(format!("lock: unknown student {id}")));
        }
        if row == 0 || pos == 0 {
            return Err(ApiError::bad_request(format!("lock: seat ({row}, {pos}) is outside the layout")));
        }
        pins.push((id - 1, Seat::new(row - 1, pos - 1)));
    }
    Locks::new(inst, &pins).map_err(|e| ApiError::bad_request(format!("lock: {e}")))
}

/// Builds the response from an assignment, evaluating everything afresh.
pub fn describe(inst: &Instance, r: &seatplan_core::SolveResult) -> SolveResponse {
    let a = &r.assignment;
    let active_edges = eval::active_edges(inst, a)
        .into_iter()
        .map(|e| EdgeView {
            a: e.i + 1,
            b: e.j + 1,
            seat_a: one_based(a.seat_of(e.i)),
            seat_b: one_based(a.seat_of(e.j)),
            distance: e.distance,
        })
        .collect();
    let score = eval::score(inst, a);
    SolveResponse {
        assignment: AssignmentFile::from_assignment(inst, a),
        f: score.f,
        f_p: score.penalized(inst.phi()),
        feasible: score.violations() == 0,
        violations: score.counts(),
        active_edges,
        seed: r.seed,
        iterations: r.iterations,
        elapsed_ms: r.elapsed.as_millis() as u64,
    }
}

async fn solve_handler(State(state): State<AppState>, body: Bytes) -> Result<Json<SolveResponse>, ApiError> {
    let req: SolveRequest = parse_body(&body)?;
    let inst = Instance::from_file(&req.instance).map_err(|report| ApiError {
        status: StatusCode::UNPROCESSABLE_ENTITY.as_u16(),
        error: "invalid instance".into(),
        details: report.issues.iter().map(|i| i.to_string()).collect(),
    })?;
    let locks = build_locks(&inst, &req.locks)?;
    let params = req.params.apply(state.config.solve_cap);
    params
        .validate()
        .map_err(|e| ApiError::bad_request(format!("params: {e}")))?;
    let out = tokio::task::spawn_blocking(move || {
        let r = solve_locked(&inst, &params, &locks);
        describe(&inst, &r)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("solver failed: {e}")))?;
    Ok(Json(out))
}

async fn builtin_handler() -> Json<Vec<BuiltinEntry>> {
    Json(
        Classroom::ALL
            .iter()
            .map(|&c| BuiltinEntry {
                name: c.name().to_string(),
                instance: classroom_file(c),
            })
            .collect(),
    )
}

async fn generate_handler(body: Bytes) -> Result<Json<InstanceFile>, ApiError> {
    let cfg: GenConfig = parse_body(&body)?;
    if cfg.n > MAX_GENERATED_STUDENTS {
        return Err(ApiError::bad_request(format!(
            "n = {} exceeds the limit of {MAX_GENERATED_STUDENTS}",
            cfg.n
        )));
    }
    let file = tokio::task::spawn_blocking(move || generate_one(&cfg, 0))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("generator failed: {e}")))?;
    match file {
        Ok(f) => Ok(Json(f)),
        Err(e @ GenError::Config(_)) => Err(ApiError::bad_request(e.to_string())),
        Err(e) => Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string())),
    }
}

async fn health_handler(State(state): State<AppState>) -> (StatusCode, Json<Health>) {
    let ready = state.ready.load(Ordering::SeqCst);
    let (code, status) = if ready {
        (StatusCode::OK, "ok")
    } else {
        (StatusCode::SERVICE_UNAVAILABLE, "starting")
    };
    (
        code,
        Json(Health {
            status: status.into(),
            version: VERSION.into(),
        }),
    )
}

fn cors(config: &ServiceConfig) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    match config.cors_origin.as_deref().and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(origin) => layer.allow_origin(origin),
        None => layer.allow_origin(Any),
    }
}

pub fn router(state: AppState) -> Router {
    let cors = cors(&state.config);
    Router::new()
        .route("/api/solve", post(solve_handler))
        .route("/api/instances/builtin", get(builtin_handler))
        .route("/api/instances/generate", post(generate_handler))
        .route("/healthz", get(health_handler))
        .layer(cors)
        .with_state(state)
}

/// Port from [`PORT_ENV`], else [`DEFAULT_PORT`].
pub fn port_from_env() -> u16 {
    std::env::var(PORT_ENV)
        .ok()
        .and_then(|p| p.trim().parse().ok())
        .unwrap_or(DEFAULT_PORT)
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::starting(config);
    let app = router(state.clone());
    state.mark_ready();
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
