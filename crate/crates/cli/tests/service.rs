use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use proptest::prelude::*;
use serde_json::{json, Value};
use sleec_cli::service::router;
use tower::ServiceExt;

const CORPUS: &str = include_str!("../../../corpus/assistive.sleec");

async fn call(method: &str, path: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(path)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, Body::from))
        .unwrap();
    let resp = router().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn post(path: &str, body: Value) -> (StatusCode, Value) {
    call("POST", path, Some(body.to_string())).await
}

#[tokio::test]
async fn health() {
    let (s, v) = call("GET", "/api/health", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, json!({"status": "ok"}));
}

#[tokio::test]
async fn parse_returns_diagnostics_and_symbols() {
    let (s, v) = post("/api/parse", json!({"text": CORPUS})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["diagnostics"], json!([]));
    let names: Vec<&str> = v["symbols"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"HumanOnFloor") && names.contains(&"MIN_TEMP"));

    let broken = CORPUS.replace("event OpenCurtain\n", "");
    let (_, v) = post("/api/parse", json!({"text": broken})).await;
    let d = v["diagnostics"].as_array().unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[0]["code"], "SLEEC-E001");
}

#[tokio::test]
async fn complete_after_when_lists_events() {
    let offset = CORPUS.find("r1 := when ").unwrap() + "r1 := when ".len();
    let (s, v) = post("/api/complete", json!({"text": CORPUS, "offset": offset})).await;
    assert_eq!(s, StatusCode::OK);
    let items = v["items"].as_array().unwrap();
    assert!(!items.is_empty());
    assert!(items.iter().all(|i| i["kind"] == "Event"));
    assert!(items.iter().any(|i| i["label"] == "HumanOnFloor"));
}

#[tokio::test]
async fn complete_clamps_offset() {
    let (s, _) = post("/api/complete", json!({"text": "def_start é", "offset": 11})).await;
    assert_eq!(s, StatusCode::OK);
    let (s, _) = post("/api/complete", json!({"text": "x", "offset": 99})).await;
    assert_eq!(s, StatusCode::OK);
}

#[tokio::test]
async fn check_insufficient_c1() {
    let (s, v) = post(
        "/api/check",
        json!({"text": CORPUS, "property": "insufficient", "target": "c1"}),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    let verdict = &v["verdicts"][0];
    assert_eq!(verdict["status"], "issue_found");
    let d = &verdict["diagnosis"];
    assert_eq!(d["type"], "insufficiency");
    assert_eq!(d["rules"], json!(["r1", "r3"]));
    assert!(v["timing"]["elapsed_ms"].is_number());
}

#[tokio::test]
async fn check_modes_change_only_measures() {
    let req = |mode: &str| json!({"text": CORPUS, "property": "situational", "target": "r1", "mode": mode});
    let (_, raw) = post("/api/check", req("raw")).await;
    let (_, filtered) = post("/api/check", req("filtered")).await;
    let rows = |v: &Value| v["verdicts"][0]["diagnosis"]["trace"].as_array().unwrap().clone();
    let (r, f) = (rows(&raw), rows(&filtered));
    assert_eq!(r.len(), f.len());
    for (a, b) in r.iter().zip(&f) {
        assert!(a["t"].is_u64());
        assert_eq!(a["t"], b["t"]);
        assert_eq!(a["events"], b["events"]);
    }
    assert_eq!(
        raw["verdicts"][0]["diagnosis"]["counts"],
        json!({"shown": 8, "total": 8})
    );
    assert_eq!(
        filtered["verdicts"][0]["diagnosis"]["counts"],
        json!({"shown": 1, "total": 8})
    );
}

#[tokio::test]
async fn check_with_errors_has_no_verdicts() {
    let broken = CORPUS.replace("event OpenCurtain\n", "");
    let (s, v) = post("/api/check", json!({"text": broken, "property": "all"})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["verdicts"], json!([]));
    assert_eq!(v["diagnostics"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn check_budget_field() {
    let body = json!({"text": CORPUS, "property": "situational", "target": "r1", "bounds": {"budget": 1}});
    let (_, v) = post("/api/check", body).await;
    assert_eq!(v["verdicts"][0]["budget_exhausted"], true);
}

#[tokio::test]
async fn malformed_bodies_are_400() {
    for (path, body) in [
        ("/api/parse", "{"),
        ("/api/parse", "{\"txt\": \"\"}"),
        ("/api/complete", "{\"text\": \"\", \"offset\": -1}"),
        ("/api/check", "[]"),
        ("/api/check", "{\"text\": \"\", \"property\": \"shiny\"}"),
        ("/api/check", "{\"text\": \"\", \"property\": \"all\", \"mode\": \"x\"}"),
    ] {
        let (s, v) = call("POST", path, Some(body.to_string())).await;
        assert_eq!(s, StatusCode::BAD_REQUEST, "{path} {body}");
        assert!(v["error"].is_string());
    }
}

#[tokio::test]
async fn unresolvable_target_is_422() {
    let (s, v) = post(
        "/api/check",
        json!({"text": CORPUS, "property": "vacuous", "target": "c1"}),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].as_str().unwrap().contains("c1"));
}

fn strip_timing(mut v: Value) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("timing");
    }
    v
}

fn request() -> impl Strategy<Value = (&'static str, Value)> {
    let rule = prop::sample::select(vec!["r1", "r2", "r3", "r4"]);
    prop_oneof![
        Just(("/api/parse", json!({"text": CORPUS}))),
        (0..CORPUS.len())
            .prop_filter("char boundary", |o| CORPUS.is_char_boundary(*o))
            .prop_map(|o| ("/api/complete", json!({"text": CORPUS, "offset": o}))),
        rule.prop_map(|r| (
            "/api/check",
            json!({"text": CORPUS, "property": "situational", "target": r})
        )),
        Just((
            "/api/check",
            json!({"text": CORPUS, "property": "insufficient", "target": "c1"})
        )),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]
    #[test]
    fn responses_do_not_depend_on_history(seq in prop::collection::vec(request(), 1..6)) {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async {
            let app = router();
            for (path, body) in &seq {
                let req = Request::builder().method("POST").uri(*path).body(Body::from(body.to_string())).unwrap();
                let resp = app.clone().oneshot(req).await.unwrap();
                let bytes = resp.into_body().collect().await.unwrap().to_bytes();
                let shared: Value = serde_json::from_slice(&bytes).unwrap();
                let (_, fresh) = post(path, body.clone()).await;
                assert_eq!(strip_timing(shared), strip_timing(fresh));
            }
        });
    }
}
