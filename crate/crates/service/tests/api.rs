use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use rsvp_core::dashboard::DashboardDoc;
use rsvp_core::fixture;
use rsvp_service::api::router;
use rsvp_service::session::{SessionStore, StoreConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(Arc::new(SessionStore::new(StoreConfig::default())))
}

async fn raw(
    app: &Router,
    method: Method,
    uri: &str,
    body: Option<String>,
) -> (StatusCode, String) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map_or_else(Body::empty, Body::from)).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, text) = raw(app, method, uri, body.map(|b| b.to_string())).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::Null))
}

async fn edge_session(app: &Router) -> String {
    let fx = fixture::edge(27, 3);
    let sidecar: Value = serde_json::from_str(&fx.sidecar.to_json()).unwrap();
    let (status, body) = call(
        app,
        Method::POST,
        "/session",
        Some(json!({"csv": fx.csv, "sidecar": sidecar, "name": "edge"})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["session_id"].as_str().unwrap().to_string()
}

fn encoding() -> Value {
    json!({"s1": ["low", "high", "sigma"], "s2": ["sep", "chi2"], "color": [], "object": ["dtco", "co"]})
}

#[tokio::test]
async fn create_session_summarizes_dimensions() {
    let app = app();
    let fx = fixture::edge(27, 3);
    let (status, body) = call(
        &app,
        Method::POST,
        "/session",
        Some(json!({"csv": fx.csv, "sidecar": fx.sidecar.to_json()})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    let dims = body["dimensions"].as_array().unwrap();
    assert_eq!(dims.len(), 7);
    assert_eq!(body["run_count"], 27);
    let names: Vec<&str> = dims.iter().map(|d| d["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["low", "high", "sigma", "sep", "co", "dtco", "chi2"]);
    assert_eq!(dims[0]["role"], "InputControl");
    assert_eq!(dims[4]["dtype"], "ImageRef2D");
    let id = body["session_id"].as_str().unwrap();
    let (status, again) = call(&app, Method::GET, &format!("/session/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again["dimensions"], body["dimensions"]);
}

#[tokio::test]
async fn errors_carry_codes() {
    let app = app();
    let (status, body) = call(
        &app,
        Method::POST,
        "/session",
        Some(json!({"csv": "a,a\n1,2\n"})),
    )
    .await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("DuplicateHeader"))
    );
    assert!(body["message"].as_str().unwrap().contains('a'));
    let (status, body) = raw(&app, Method::POST, "/session", Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(
        serde_json::from_str::<Value>(&body).unwrap()["code"],
        "InvalidRequest"
    );
    let (status, body) = call(&app, Method::GET, "/session/nope/overview", None).await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::NOT_FOUND, Some("SessionNotFound"))
    );
    let id = edge_session(&app).await;
    let (status, body) = call(
        &app,
        Method::PUT,
        &format!("/session/{id}/encoding"),
        Some(json!({"s1": ["co"]})),
    )
    .await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("IncompatibleField"))
    );
    let (status, body) = call(
        &app,
        Method::PUT,
        &format!("/session/{id}/tasks"),
        Some(json!(["juggling"])),
    )
    .await;
    assert_eq!(
        (status, body["code"].as_str()),
        (StatusCode::BAD_REQUEST, Some("InvalidRequest"))
    );
    let (status, _) = call(&app, Method::DELETE, &format!("/session/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, Method::GET, &format!("/session/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn overview_follows_the_encoding() {
    let app = app();
    let id = edge_session(&app).await;
    let (status, ov) = call(
        &app,
        Method::PUT,
        &format!("/session/{id}/encoding"),
        Some(encoding()),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{ov}");
    assert_eq!(ov["applicable"].as_array().unwrap().len(), 13);
    let layouts = ov["layouts"].as_array().unwrap();
    assert_eq!(layouts.len(), 6);
    for l in layouts {
        let cells = l["layout"]["cells"].as_array().unwrap();
        let specs = l["specs"].as_array().unwrap();
        assert_eq!(cells.len(), specs.len());
        for (row, specs) in cells.iter().zip(specs) {
            assert_eq!(
                row.as_array().unwrap().len(),
                specs.as_array().unwrap().len()
            );
            for s in specs.as_array().unwrap() {
                assert_eq!(s["vis_type"], l["option"]);
                assert_eq!(s["data_ref"], "edge");
            }
        }
    }
    let hist = ov["charts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["option"] == "Hist")
        .count();
    assert_eq!(hist, 5);
    assert_eq!(ov["preselected"], json!([0, 1, 2]));
    let (_, again) = call(&app, Method::GET, &format!("/session/{id}/overview"), None).await;
    assert_eq!(again, ov);
}

#[tokio::test]
async fn tasks_add_optimization_and_explain() {
    let app = app();
    let id = edge_session(&app).await;
    call(
        &app,
        Method::PUT,
        &format!("/session/{id}/encoding"),
        Some(encoding()),
    )
    .await;
    let (status, set) = call(
        &app,
        Method::PUT,
        &format!("/session/{id}/tasks"),
        Some(json!(["fitting"])),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{set}");
    assert_eq!(set["tasks"], json!(["Optimization", "Fitting"]));
    let (_, wrapped) = call(
        &app,
        Method::PUT,
        &format!("/session/{id}/tasks"),
        Some(json!({"tasks": ["Fitting"]})),
    )
    .await;
    assert_eq!(wrapped, set);
    let (_, ov) = call(&app, Method::GET, &format!("/session/{id}/overview"), None).await;
    assert_eq!(ov["recommendations"], set);
    let (status, text) = call(
        &app,
        Method::GET,
        &format!("/session/{id}/explain?task=fitting&option=Jux2D"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert!(text["text"].as_str().unwrap().contains("co"), "{text}");
    let (status, err) = call(
        &app,
        Method::GET,
        &format!("/session/{id}/explain?task=fitting&option=PC"),
        None,
    )
    .await;
    assert_eq!(
        (status, err["code"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("NotRecommended"))
    );
    let (status, err) = call(
        &app,
        Method::PUT,
        &format!("/session/{id}/tasks"),
        Some(json!(["fitting", "uncertainty", "outliers", "sensitivity"])),
    )
    .await;
    assert_eq!(
        (status, err["code"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("TooManyTasks"))
    );
}

#[tokio::test]
async fn dashboard_lifecycle() {
    let app = app();
    let id = edge_session(&app).await;
    let base = format!("/session/{id}");
    call(
        &app,
        Method::PUT,
        &format!("{base}/encoding"),
        Some(encoding()),
    )
    .await;

    let views = format!("{base}/dashboard/views");
    let (status, added) = call(
        &app,
        Method::POST,
        &views,
        Some(json!({"from_overview": {"option": "PC", "row": 0, "col": 2}})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{added}");
    assert_eq!(added["view_id"], 1);
    assert_eq!(added["dashboard"]["sliders"].as_array().unwrap().len(), 5);
    let (_, added) = call(&app, Method::POST, &views, Some(json!({"from_overview": {"option": "Grid2D"}, "rect": {"x": 4, "y": 0, "w": 4, "h": 4}}))).await;
    assert_eq!(added["dashboard"]["views"][1]["rect"]["x"], 4);
    let (_, added) = call(
        &app,
        Method::POST,
        &views,
        Some(json!({"content": {"kind": "object", "option": "Box1D", "object": "dtco"}})),
    )
    .await;
    assert_eq!(added["view_id"], 3);
    let (status, err) = call(&app, Method::POST, &views, Some(json!({}))).await;
    assert_eq!(
        (status, err["code"].as_str()),
        (StatusCode::BAD_REQUEST, Some("InvalidRequest"))
    );

    let (status, doc) = call(
        &app,
        Method::PATCH,
        &format!("{views}/2"),
        Some(json!({"style": {"hide_filtered": true}})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{doc}");
    assert_eq!(doc["views"][1]["style"]["hide_filtered"], true);
    let (status, err) = call(
        &app,
        Method::PATCH,
        &format!("{views}/1"),
        Some(json!({"style": {"blend_mode": "screen"}})),
    )
    .await;
    assert_eq!(
        (status, err["code"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("InvalidPatch"))
    );
    let (status, err) = call(
        &app,
        Method::PATCH,
        &format!("{views}/9"),
        Some(json!({"rect": {"x": 0, "y": 0, "w": 1, "h": 1}})),
    )
    .await;
    assert_eq!(
        (status, err["code"].as_str()),
        (StatusCode::NOT_FOUND, Some("UnknownView"))
    );

    let filters = format!("{base}/filters");
    let (status, full) = call(
        &app,
        Method::PUT,
        &filters,
        Some(json!({"ranges": {"sigma": [0.5, 3.0]}})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{full}");
    assert_eq!(full["pass_count"], full["run_count"]);
    assert_eq!(full["views"].as_array().unwrap().len(), 3);
    let (_, narrow) = call(
        &app,
        Method::PUT,
        &filters,
        Some(json!({"ranges": {"low": [0.0, 0.1]}, "selected_run": 26})),
    )
    .await;
    let pass = narrow["pass_count"].as_u64().unwrap();
    assert!(pass > 0 && pass < 27);
    assert_eq!(
        narrow["filter"]["pass"].as_array().unwrap().len() as u64,
        pass
    );
    for v in narrow["views"].as_array().unwrap() {
        assert_eq!(v["highlighted"][0], 26);
    }
    let grid = &narrow["views"][1]["payload"]["images"];
    assert_eq!(grid.as_array().unwrap().len() as u64, pass);
    let (_, cleared) = call(
        &app,
        Method::PUT,
        &filters,
        Some(json!({"ranges": {"low": null}, "clear_selection": true})),
    )
    .await;
    assert_eq!(cleared["pass_count"], 27);
    assert_eq!(cleared["selected_run"], Value::Null);
    let (status, err) = call(
        &app,
        Method::PUT,
        &filters,
        Some(json!({"ranges": {"co": [0, 1]}})),
    )
    .await;
    assert_eq!(
        (status, err["code"].as_str()),
        (
            StatusCode::UNPROCESSABLE_ENTITY,
            Some("NonQuantitativeFilter")
        )
    );

    let (_, doc) = call(
        &app,
        Method::PUT,
        &format!("{base}/mode"),
        Some(json!({"mode": "analyze"})),
    )
    .await;
    assert_eq!(doc["mode"], "analyze");
    let (status, err) = call(
        &app,
        Method::POST,
        &views,
        Some(json!({"from_overview": {"option": "SP"}})),
    )
    .await;
    assert_eq!(
        (status, err["code"].as_str()),
        (StatusCode::CONFLICT, Some("NotEditMode"))
    );
    let (status, _) = call(
        &app,
        Method::PUT,
        &filters,
        Some(json!({"ranges": {"high": [0.3, 0.5]}})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    call(
        &app,
        Method::PUT,
        &format!("{base}/mode"),
        Some(json!({"mode": "edit"})),
    )
    .await;

    let (status, doc) = call(&app, Method::DELETE, &format!("{views}/3"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["views"].as_array().unwrap().len(), 2);

    let (_, exported) = raw(&app, Method::GET, &format!("{base}/dashboard/export"), None).await;
    let parsed = DashboardDoc::from_json(&exported).unwrap();
    assert_eq!(parsed.filter_state.ranges.len(), 2);
    assert_eq!(
        serde_json::to_value(&parsed).unwrap(),
        serde_json::from_str::<Value>(&exported).unwrap()
    );
    let (_, emitted) = call(&app, Method::GET, &format!("{base}/dashboard"), None).await;
    assert_eq!(emitted["views"].as_array().unwrap().len(), 2);
}

/// Replays one request script against a fresh service and collects every response body.
async fn script() -> Vec<String> {
    let app = app();
    let id = edge_session(&app).await;
    let base = format!("/session/{id}");
    let steps: Vec<(Method, String, Option<Value>)> = vec![
        (Method::PUT, format!("{base}/encoding"), Some(encoding())),
        (
            Method::PUT,
            format!("{base}/tasks"),
            Some(json!(["sensitivity", "uncertainty"])),
        ),
        (
            Method::POST,
            format!("{base}/dashboard/views"),
            Some(json!({"from_overview": {"option": "wDCP", "row": 0, "col": 0}})),
        ),
        (
            Method::POST,
            format!("{base}/dashboard/views"),
            Some(json!({"from_overview": {"option": "CHist1D"}})),
        ),
        (
            Method::PUT,
            format!("{base}/filters"),
            Some(json!({"ranges": {"high": [0.3, 0.6]}, "selected_run": 4})),
        ),
        (Method::GET, format!("{base}/overview"), None),
        (Method::GET, format!("{base}/dashboard/export"), None),
    ];
    let mut out = Vec::new();
    for (method, uri, body) in steps {
        let (status, text) = raw(&app, method, &uri, body.map(|b| b.to_string())).await;
        assert!(status.is_success(), "{uri}: {text}");
        out.push(text);
    }
    out
}

#[tokio::test]
async fn identical_requests_give_identical_bytes() {
    assert_eq!(script().await, script().await);
}
