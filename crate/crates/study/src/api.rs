//! HTTP routes.

use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use wnss_harness::MosRow;

use crate::config::StudyConfig;
use crate::error::StudyError;
use crate::state::{NextPair, Progress, Study};
use crate::store::Phase;

#[derive(Clone)]
pub struct AppState {
    config: Arc<StudyConfig>,
    study: Arc<Mutex<Study>>,
}

impl AppState {
    pub fn new(study: Study) -> Self {
        Self {
            config: Arc::new(study.config().clone()),
            study: Arc::new(Mutex::new(study)),
        }
    }

    fn lock(&self) -> MutexGuard<'_, Study> {
        self.study.lock().unwrap_or_else(|p| p.into_inner())
    }
}

pub struct ApiError(StudyError);

impl From<StudyError> for ApiError {
    fn from(e: StudyError) -> Self {
        Self(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            StudyError::UnknownSession(_) | StudyError::UnknownPair(_) => StatusCode::NOT_FOUND,
            StudyError::RatingOutOfRange(_) => StatusCode::UNPROCESSABLE_ENTITY,
            StudyError::AlreadyRated(_) | StudyError::OutOfOrder { .. } | StudyError::PhaseConflict(_) => {
                StatusCode::CONFLICT
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.0.to_string() }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub subject_id: String,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct CreatedSession {
    pub session_id: String,
    pub phase: Phase,
    pub total_pairs: usize,
    pub training_pairs: usize,
}

#[derive(Debug, Deserialize)]
pub struct SubmitRating {
    pub pair_id: String,
    pub rating: i64,
}

#[derive(Debug, Serialize)]
pub struct NextResponse {
    pub phase: Phase,
    pub pair_id: Option<String>,
    pub gt_png_url: Option<String>,
    pub pred_png_url: Option<String>,
    pub category: Option<String>,
    pub progress: Progress,
    /// No pair left in the current phase.
    pub done: bool,
}

impl From<NextPair> for NextResponse {
    fn from(n: NextPair) -> Self {
        let url = |kind: &str| n.pair_id.as_ref().map(|id| format!("/maps/{id}/{kind}.png"));
        Self {
            gt_png_url: url("gt"),
            pred_png_url: url("pred"),
            done: n.pair_id.is_none(),
            phase: n.phase,
            pair_id: n.pair_id,
            category: n.category,
            progress: n.progress,
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_status))
        .route("/sessions/{id}/next", get(next_pair))
        .route("/sessions/{id}/ratings", post(submit_rating))
        .route("/sessions/{id}/advance-phase", post(advance_phase))
        .route("/mos", get(mos))
        .route("/maps/{pair_id}/{file}", get(map_png))
        .with_state(state)
}

async fn create_session(State(s): State<AppState>, Json(body): Json<CreateSession>) -> ApiResult<impl IntoResponse> {
    let status = s.lock().create_session(&body.subject_id, body.seed)?;
    Ok((
        StatusCode::CREATED,
        Json(CreatedSession {
            session_id: status.session_id,
            phase: status.phase,
            total_pairs: status.progress.total,
            training_pairs: status.training_progress.total,
        }),
    ))
}

async fn session_status(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.lock().status(&id)?))
}

async fn next_pair(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<NextResponse>> {
    Ok(Json(s.lock().next(&id)?.into()))
}

async fn submit_rating(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<SubmitRating>,
) -> ApiResult<Json<NextResponse>> {
    Ok(Json(s.lock().rate(&id, &body.pair_id, body.rating)?.into()))
}

async fn advance_phase(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.lock().advance_phase(&id)?))
}

async fn mos(State(s): State<AppState>) -> ApiResult<Json<Vec<MosRow>>> {
    let table = s.lock().mos()?;
    Ok(Json(table.rows().cloned().collect()))
}

async fn map_png(State(s): State<AppState>, Path((pair_id, file)): Path<(String, String)>) -> ApiResult<Response> {
    let pair = s
        .config
        .find(&pair_id)
        .ok_or_else(|| StudyError::UnknownPair(pair_id.clone()))?;
    let map = match file.as_str() {
        "gt.png" => &pair.gt,
        "pred.png" => &pair.pred,
        _ => return Ok((StatusCode::NOT_FOUND, Json(json!({ "error": "no such map" }))).into_response()),
    };
    let png = wnss_core::colormap::render_png(map).map_err(StudyError::from)?;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

/// Serves the study on an already bound listener until the task is dropped.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}
