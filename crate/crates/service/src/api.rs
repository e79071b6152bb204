//! HTTP routes over the session store.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, patch, post, put};
use axum::{Json, Router};
use rsvp_core::analytics::{apply_filters, clear_selection, select_run};
use rsvp_core::dashboard::{
    highlighted_runs, preview_spec, DashboardDoc, Emission, Mode, Rect, StylePatch, ViewContent,
    VisSpec, DEFAULT_PRESELECT,
};
use rsvp_core::data_model::{load_csv, Dimension, IngestOptions, RunTable, Sampling, Sidecar};
use rsvp_core::design_space::{applicable_options, Applicable, EncodingState, VisOption};
use rsvp_core::layout::{layout_smd, SmdLayout};
use rsvp_core::visrec::{recommend, RecommendationSet, Task};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::ApiError;
use crate::session::{lock, Session, SessionStore};

type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/session", post(create_session))
        .route("/session/{id}", get(get_summary).delete(delete_session))
        .route("/session/{id}/overview", get(get_overview))
        .route("/session/{id}/encoding", put(put_encoding))
        .route("/session/{id}/tasks", put(put_tasks))
        .route("/session/{id}/explain", get(get_explain))
        .route("/session/{id}/dashboard", get(get_dashboard))
        .route("/session/{id}/dashboard/views", post(add_view))
        .route(
            "/session/{id}/dashboard/views/{vid}",
            patch(patch_view).delete(delete_view),
        )
        .route("/session/{id}/filters", put(put_filters))
        .route("/session/{id}/mode", put(put_mode))
        .route("/session/{id}/dashboard/export", get(export_dashboard))
        .with_state(store)
}

fn body<T: DeserializeOwned>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::invalid_request(e.body_text()))
}

fn with_session<T>(
    store: &SessionStore,
    id: &str,
    f: impl FnOnce(&mut Session) -> Result<T, ApiError>,
) -> ApiResult<T> {
    let session = store.get(id)?;
    let mut guard = lock(&session);
    f(&mut guard).map(Json)
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionSummary {
    #[serde(flatten)]
    pub dimension: Dimension,
    pub effective_sampling: Sampling,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableSummary {
    pub run_count: usize,
    pub default_sampling: Sampling,
    pub dimensions: Vec<DimensionSummary>,
}

pub fn table_summary(table: &RunTable) -> TableSummary {
    TableSummary {
        run_count: table.run_count(),
        default_sampling: table.default_sampling(),
        dimensions: table
            .dimensions()
            .iter()
            .map(|d| DimensionSummary {
                dimension: d.clone(),
                effective_sampling: table.effective_sampling(d),
            })
            .collect(),
    }
}

/// Parses a CSV and applies an optional sidecar.
pub fn ingest(
    csv: &str,
    sidecar: Option<&str>,
    options: &IngestOptions,
) -> Result<RunTable, ApiError> {
    let table = load_csv(csv, options)?;
    match sidecar {
        Some(text) => Ok(table.apply_sidecar(&Sidecar::from_json(text)?)?),
        None => Ok(table),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    csv: String,
    #[serde(default)]
    sidecar: Option<serde_json::Value>,
    /// Table name used as `data_ref` in emitted specs.
    #[serde(default = "default_name")]
    name: String,
}

fn default_name() -> String {
    "table".to_string()
}

#[derive(Debug, Serialize)]
struct Created {
    session_id: String,
    #[serde(flatten)]
    summary: TableSummary,
}

async fn create_session(
    State(store): State<Arc<SessionStore>>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let req = body(payload)?;
    let sidecar = req.sidecar.map(|v| match v {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    });
    let table = ingest(&req.csv, sidecar.as_deref(), &store.config.ingest)?;
    let summary = table_summary(&table);
    let session_id = store.create(&req.name, table);
    Ok((
        StatusCode::CREATED,
        Json(Created {
            session_id,
            summary,
        }),
    ))
}

async fn get_summary(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
) -> ApiResult<TableSummary> {
    with_session(&store, &id, |s| Ok(table_summary(&s.table)))
}

async fn delete_session(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    store.remove(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Clone, Serialize)]
pub struct OverviewLayout {
    pub option: VisOption,
    pub layout: SmdLayout,
    /// One spec per small multiple, row-major like `layout.cells`.
    pub specs: Vec<Vec<VisSpec>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverviewChart {
    pub option: VisOption,
    pub spec: VisSpec,
}

/// The overview area for the current encoding; unfiltered apart from the preselected highlights.
#[derive(Debug, Clone, Serialize)]
pub struct Overview {
    pub encoding: EncodingState,
    pub applicable: Vec<Applicable>,
    pub layouts: Vec<OverviewLayout>,
    /// Options without a small-multiple grid: one histogram per spatial dimension and the object charts.
    pub charts: Vec<OverviewChart>,
    pub preselected: Vec<usize>,
    pub recommendations: RecommendationSet,
}

pub fn overview(
    table: &RunTable,
    enc: &EncodingState,
    tasks: &[Task],
    data_ref: &str,
) -> Result<Overview, ApiError> {
    enc.validate(table)?;
    let applicable = applicable_options(enc, table);
    let mut layouts = Vec::new();
    let mut charts = Vec::new();
    for a in &applicable {
        let option = a.option;
        if option == VisOption::Hist {
            for d in enc.s1.iter().chain(&enc.s2) {
                let content = ViewContent::chart(option, &[d.as_str()]);
                charts.push(OverviewChart {
                    option,
                    spec: preview_spec(&content, data_ref),
                });
            }
        } else if let Some(dtype) = option.object_dtype() {
            let object = enc
                .object_of(table, dtype)
                .expect("applicable object option has an object");
            charts.push(OverviewChart {
                option,
                spec: preview_spec(&ViewContent::object(option, object), data_ref),
            });
        } else {
            let layout = layout_smd(option, enc)?;
            let specs = layout
                .cells
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|cell| {
                            preview_spec(&ViewContent::Cell { cell: cell.clone() }, data_ref)
                        })
                        .collect()
                })
                .collect();
            layouts.push(OverviewLayout {
                option,
                layout,
                specs,
            });
        }
    }
    let everything = apply_filters(table, &Default::default())?;
    Ok(Overview {
        encoding: enc.clone(),
        applicable,
        layouts,
        charts,
        preselected: highlighted_runs(&everything, None, DEFAULT_PRESELECT),
        recommendations: recommend(tasks, enc, table)?,
    })
}

async fn get_overview(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
) -> ApiResult<Overview> {
    with_session(&store, &id, |s| {
        overview(&s.table, &s.enc, &s.tasks, &s.data_ref)
    })
}

async fn put_encoding(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    payload: Result<Json<EncodingState>, JsonRejection>,
) -> ApiResult<Overview> {
    let enc = body(payload)?;
    with_session(&store, &id, |s| {
        let view = overview(&s.table, &enc, &s.tasks, &s.data_ref)?;
        s.enc = enc;
        Ok(view)
    })
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TaskList {
    Bare(Vec<Task>),
    Wrapped { tasks: Vec<Task> },
}

async fn put_tasks(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    payload: Result<Json<TaskList>, JsonRejection>,
) -> ApiResult<RecommendationSet> {
    let (TaskList::Bare(tasks) | TaskList::Wrapped { tasks }) = body(payload)?;
    with_session(&store, &id, |s| {
        let set = recommend(&tasks, &s.enc, &s.table)?;
        s.tasks = set.tasks.clone();
        Ok(set)
    })
}

#[derive(Debug, Deserialize)]
struct ExplainQuery {
    task: String,
    option: String,
}

#[derive(Debug, Serialize)]
struct Explanation {
    task: Task,
    option: VisOption,
    text: String,
}

async fn get_explain(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    Query(q): Query<ExplainQuery>,
) -> ApiResult<Explanation> {
    let task: Task = q.task.parse()?;
    let option: VisOption = q.option.parse()?;
    with_session(&store, &id, |s| {
        let set = recommend(&s.tasks, &s.enc, &s.table)?;
        Ok(Explanation {
            task,
            option,
            text: set.explain(task, option)?,
        })
    })
}

async fn get_dashboard(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
) -> ApiResult<Emission> {
    with_session(&store, &id, |s| {
        Ok(s.doc.emit_specs(&s.table, &s.data_ref)?)
    })
}

/// A small multiple or chart in the overview area.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverviewRef {
    option: VisOption,
    #[serde(default)]
    row: usize,
    #[serde(default)]
    col: usize,
    /// Dimension of a histogram chart.
    #[serde(default)]
    dimension: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AddView {
    #[serde(default)]
    content: Option<ViewContent>,
    #[serde(default)]
    from_overview: Option<OverviewRef>,
    #[serde(default)]
    rect: Option<Rect>,
}

#[derive(Debug, Serialize)]
struct ViewAdded {
    view_id: u32,
    dashboard: DashboardDoc,
}

fn resolve_overview(s: &Session, r: &OverviewRef) -> Result<ViewContent, ApiError> {
    if r.option == VisOption::Hist {
        let dim = r
            .dimension
            .as_deref()
            .ok_or_else(|| ApiError::invalid_request("a histogram copy needs `dimension`"))?;
        return Ok(ViewContent::chart(VisOption::Hist, &[dim]));
    }
    if let Some(dtype) = r.option.object_dtype() {
        let object = s.enc.object_of(&s.table, dtype).ok_or_else(|| {
            ApiError::new(
                "IncompatibleCell",
                format!("no object dimension encoded for {}", r.option),
            )
        })?;
        return Ok(ViewContent::object(r.option, object));
    }
    let mut layout = layout_smd(r.option, &s.enc)?;
    let cell = layout.detail_for(rsvp_core::layout::GridPos {
        row: r.row,
        col: r.col,
    })?;
    Ok(ViewContent::Cell { cell: cell.clone() })
}

async fn add_view(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    payload: Result<Json<AddView>, JsonRejection>,
) -> Result<(StatusCode, Json<ViewAdded>), ApiError> {
    let req = body(payload)?;
    let Json(added) = with_session(&store, &id, |s| {
        let content = match (req.content, &req.from_overview) {
            (Some(c), None) => c,
            (None, Some(r)) => resolve_overview(s, r)?,
            _ => {
                return Err(ApiError::invalid_request(
                    "give exactly one of `content` and `from_overview`",
                ))
            }
        };
        let mut doc = s.doc.clone();
        let view_id = doc.add_view(&s.table, &s.enc, content)?;
        if let Some(rect) = req.rect {
            doc.move_resize(view_id, rect)?;
        }
        s.doc = doc;
        Ok(ViewAdded {
            view_id,
            dashboard: s.doc.clone(),
        })
    })?;
    Ok((StatusCode::CREATED, Json(added)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchView {
    #[serde(default)]
    rect: Option<Rect>,
    #[serde(default)]
    style: Option<serde_json::Value>,
}

async fn patch_view(
    State(store): State<Arc<SessionStore>>,
    Path((id, vid)): Path<(String, u32)>,
    payload: Result<Json<PatchView>, JsonRejection>,
) -> ApiResult<DashboardDoc> {
    let req = body(payload)?;
    with_session(&store, &id, |s| {
        let mut doc = s.doc.clone();
        if let Some(rect) = req.rect {
            doc.move_resize(vid, rect)?;
        }
        if let Some(style) = req.style {
            doc.edit_attributes(&s.table, vid, &StylePatch::from_json(style)?)?;
        }
        s.doc = doc;
        Ok(s.doc.clone())
    })
}

async fn delete_view(
    State(store): State<Arc<SessionStore>>,
    Path((id, vid)): Path<(String, u32)>,
) -> ApiResult<DashboardDoc> {
    with_session(&store, &id, |s| {
        let remove = StylePatch {
            remove: true,
            ..StylePatch::default()
        };
        s.doc.edit_attributes(&s.table, vid, &remove)?;
        Ok(s.doc.clone())
    })
}

/// Change to the dashboard filters. Absent parts are left as they are.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterDelta {
    /// Drop every range before applying `ranges`.
    #[serde(default)]
    pub reset: bool,
    /// New range per dimension; `null` removes the range.
    #[serde(default)]
    pub ranges: BTreeMap<String, Option<(f64, f64)>>,
    #[serde(default)]
    pub selected_run: Option<usize>,
    #[serde(default)]
    pub clear_selection: bool,
}

#[derive(Debug, Serialize)]
pub struct FilterResponse {
    pub run_count: usize,
    pub pass_count: usize,
    #[serde(flatten)]
    pub emission: Emission,
}

pub fn apply_delta(s: &mut Session, delta: FilterDelta) -> Result<FilterResponse, ApiError> {
    let mut f = s.doc.filter_state.clone();
    if delta.reset {
        f.ranges.clear();
    }
    for (dim, range) in delta.ranges {
        match range {
            Some(r) => f.ranges.insert(dim, r),
            None => f.ranges.remove(&dim),
        };
    }
    if delta.clear_selection {
        f = clear_selection(&f);
    }
    if let Some(run) = delta.selected_run {
        f = select_run(&f, &s.table, run)?;
    }
    s.doc.set_filters(&s.table, f)?;
    let emission = s.doc.emit_specs(&s.table, &s.data_ref)?;
    Ok(FilterResponse {
        run_count: s.table.run_count(),
        pass_count: emission.filter.pass_count,
        emission,
    })
}

async fn put_filters(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    payload: Result<Json<FilterDelta>, JsonRejection>,
) -> ApiResult<FilterResponse> {
    let delta = body(payload)?;
    with_session(&store, &id, |s| apply_delta(s, delta))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeBody {
    mode: Mode,
}

async fn put_mode(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    payload: Result<Json<ModeBody>, JsonRejection>,
) -> ApiResult<DashboardDoc> {
    let req = body(payload)?;
    with_session(&store, &id, |s| {
        s.doc.set_mode(req.mode);
        Ok(s.doc.clone())
    })
}

async fn export_dashboard(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
) -> ApiResult<DashboardDoc> {
    with_session(&store, &id, |s| Ok(s.doc.clone()))
}
